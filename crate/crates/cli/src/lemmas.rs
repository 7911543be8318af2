//! Randomized fuzzing of the three geometric inequalities.

use std::time::Instant;

use errtrade::geometry::{lemma_slack, planted_instance, random_instance, saturation_witness, LemmaId, LemmaInstance};
use errtrade::tolerances;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{check_dims, hex_digest};
use crate::error::CliResult;
use crate::output::Num;
use crate::record::{LemmaRecord, RunRecord, Tally, WorstInstance};
use crate::rng::{instance_rng, RNG_DESCRIPTION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaConfig {
    pub seed: u64,
    pub n_instances: usize,
    pub dims: Vec<usize>,
    pub lemmas: Vec<LemmaId>,
    /// Every `planted_every`-th instance is a planted saturating one; 0
    /// disables planting.
    pub planted_every: usize,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_instances: 100_000,
            dims: (3..=8).collect(),
            lemmas: LemmaId::ALL.to_vec(),
            planted_every: 16,
        }
    }
}

impl LemmaConfig {
    pub fn validate(&self) -> CliResult<()> {
        // Orthogonal pairs need at least two dimensions.
        check_dims(&self.dims, 2)?;
        if self.n_instances == 0 {
            return Err(crate::error::CliError::config("n_instances must be at least 1"));
        }
        Ok(())
    }

    pub fn hash(&self) -> String {
        hex_digest(
            serde_json::to_string(&("lemmas", self))
                .expect("config serializes")
                .as_bytes(),
        )
    }
}

fn lemma_ordinal(lemma: LemmaId) -> u64 {
    match lemma {
        LemmaId::Distances => 0,
        LemmaId::Perpendicular => 1,
        LemmaId::Mixed => 2,
    }
}

/// Instance `index` for `lemma`, and whether it was planted.
pub fn lemma_instance(config: &LemmaConfig, lemma: LemmaId, index: u64) -> (LemmaInstance, bool) {
    let mut rng = instance_rng(config.seed, 3 * index + lemma_ordinal(lemma));
    let n = config.dims[rng.random_range(0..config.dims.len())];
    let planted = config.planted_every > 0 && index.is_multiple_of(config.planted_every as u64);
    let inst = if planted {
        planted_instance(&mut rng, n, lemma)
    } else {
        random_instance(&mut rng, n, lemma)
    };
    (inst, planted)
}

fn to_record(inst: &LemmaInstance, index: u64, planted: bool, slack: f64) -> LemmaRecord {
    let nums = |v: &errtrade::geometry::RealVec| v.iter().map(|&x| Num(x)).collect();
    LemmaRecord {
        index,
        planted,
        a_hat: nums(&inst.a_hat),
        b_hat: nums(&inst.b_hat),
        x_vec: nums(&inst.x_vec),
        y_vec: nums(&inst.y_vec),
        slack: Num(slack),
    }
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    slack: Option<f64>,
    witness_ok: bool,
}

/// Fuzzes each lemma and checks that every (near-)saturated instance passes
/// the coplanarity witness.
pub fn cmd_lemmas(config: &LemmaConfig) -> CliResult<RunRecord> {
    config.validate()?;
    let start = Instant::now();
    let t = tolerances();
    let mut summaries = Vec::new();
    let mut passed = true;
    for &lemma in &config.lemmas {
        let outcomes: Vec<Outcome> = (0..config.n_instances as u64)
            .into_par_iter()
            .map(|i| {
                let (inst, _) = lemma_instance(config, lemma, i);
                let slack = lemma_slack(&inst, lemma).ok();
                let witness_ok = match slack {
                    Some(s) if s <= t.sat => {
                        let w = saturation_witness(&inst, lemma);
                        w.coplanar && w.projection != Some(false)
                    }
                    _ => true,
                };
                Outcome { slack, witness_ok }
            })
            .collect();
        let mut tally = Tally::new(lemma.name(), true);
        let mut witness_failures = 0;
        for (i, o) in outcomes.iter().enumerate() {
            let Some(slack) = o.slack else {
                tally.skip();
                continue;
            };
            let satisfied = slack >= -t.num;
            tally.add(slack, satisfied, satisfied && slack <= t.sat, || {
                let (inst, planted) = lemma_instance(config, lemma, i as u64);
                WorstInstance::Lemma(to_record(&inst, i as u64, planted, slack))
            });
            if !o.witness_ok {
                witness_failures += 1;
            }
        }
        let mut summary = tally.summary;
        summary.witness_failures = Some(witness_failures);
        passed &= summary.violations == 0 && witness_failures == 0;
        summaries.push(summary);
    }
    Ok(RunRecord {
        command: "lemmas".into(),
        config_hash: config.hash(),
        rng: RNG_DESCRIPTION.into(),
        seed: config.seed,
        n_instances: config.n_instances,
        summaries,
        chain_failures: None,
        dropped_product_violations: None,
        passed,
        wall_time: start.elapsed(),
    })
}
