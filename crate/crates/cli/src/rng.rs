use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RNG_DESCRIPTION: &str = "ChaCha8Rng::seed_from_u64(seed), stream = instance index";

/// Independent generator for instance `index`, so results do not depend on
/// scheduling.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
