//! Command-line front end for `errtrade`: verification sweeps, boundary
//! curves, experimental prediction sweeps and lemma fuzzing.

pub mod config;
pub mod curve;
pub mod error;
pub mod lemmas;
pub mod output;
pub mod record;
pub mod rng;
pub mod verify;

pub use config::{StrategyKind, SweepConfig};
pub use curve::{cmd_curve, cmd_experiments, Experiment};
pub use error::{CliError, CliResult};
pub use lemmas::{cmd_lemmas, LemmaConfig};
pub use output::Format;
pub use record::RunRecord;
pub use verify::cmd_verify;
