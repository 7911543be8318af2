use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::output::Num;

/// One random instance of a verification sweep, as needed to re-evaluate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: u64,
    pub family: String,
    pub dim: usize,
    pub ancilla_dim: usize,
    pub delta_a: Num,
    pub delta_b: Num,
    pub c_ab: Num,
    pub eps_a: Num,
    pub eps_b: Num,
    pub slack: Num,
}

/// One lemma instance: the four vectors and its slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRecord {
    pub index: u64,
    pub planted: bool,
    pub a_hat: Vec<Num>,
    pub b_hat: Vec<Num>,
    pub x_vec: Vec<Num>,
    pub y_vec: Vec<Num>,
    pub slack: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WorstInstance {
    Sweep(InstanceRecord),
    Lemma(LemmaRecord),
}

/// Per-relation (or per-lemma) outcome of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub universal: bool,
    pub evaluated: usize,
    /// Instances outside the relation's hypotheses.
    pub skipped: usize,
    pub violations: usize,
    pub saturated: usize,
    pub min_slack: Option<Num>,
    pub worst: Option<WorstInstance>,
    /// Saturated instances whose coplanarity witness failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_failures: Option<usize>,
}

impl Summary {
    pub fn violation_rate(&self) -> f64 {
        if self.evaluated == 0 {
            0.0
        } else {
            self.violations as f64 / self.evaluated as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub config_hash: String,
    pub rng: String,
    pub seed: u64,
    pub n_instances: usize,
    pub summaries: Vec<Summary>,
    /// Instances where a link of the chain from the sharp bound to the Ozawa
    /// form failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_failures: Option<usize>,
    /// Violations of the Ozawa form with the product term dropped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropped_product_violations: Option<usize>,
    pub passed: bool,
    /// Kept out of the serialized record so that output files are
    /// byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunRecord {
    pub fn summary(&self, name: &str) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.name == name)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,universal,evaluated,skipped,violations,saturated,min_slack\n");
        for s in &self.summaries {
            let min = s.min_slack.map(|m| crate::output::fmt_num(m.0)).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.name, s.universal, s.evaluated, s.skipped, s.violations, s.saturated, min
            ));
        }
        out
    }
}

/// Accumulates slacks for one relation, in instance order.
#[derive(Debug, Clone)]
pub(crate) struct Tally {
    pub summary: Summary,
    worst_slack: f64,
}

impl Tally {
    pub fn new(name: &str, universal: bool) -> Self {
        Self {
            summary: Summary {
                name: name.to_string(),
                universal,
                evaluated: 0,
                skipped: 0,
                violations: 0,
                saturated: 0,
                min_slack: None,
                worst: None,
                witness_failures: None,
            },
            worst_slack: f64::INFINITY,
        }
    }

    pub fn skip(&mut self) {
        self.summary.skipped += 1;
    }

    /// Strictly smaller slacks replace the worst instance, so ties keep the
    /// lowest index.
    pub fn add(&mut self, slack: f64, satisfied: bool, saturated: bool, worst: impl FnOnce() -> WorstInstance) {
        let s = &mut self.summary;
        s.evaluated += 1;
        if !satisfied {
            s.violations += 1;
        }
        if saturated {
            s.saturated += 1;
        }
        if slack < self.worst_slack {
            self.worst_slack = slack;
            s.min_slack = Some(Num(slack));
            s.worst = Some(worst());
        }
    }
}
