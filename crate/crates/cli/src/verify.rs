//! Randomized verification sweeps over the relations.

use std::f64::consts::PI;
use std::time::Instant;

use errtrade::constructions::{
    degenerate_strategy, dichotomic_saturating, general_saturating_corr1, general_saturating_corr_lt1, ShapeParams,
};
use errtrade::joint::{dichotomic_outputs, optimal_outputs};
use errtrade::random::{
    dichotomic_swap, dichotomic_swap_with_phase, gaussian_hermitian, haar_basis, haar_ket, near_identity_unitary,
    orthogonal_unit,
};
use errtrade::relations::{evaluate, ozawa_implied_check, ozawa_without_product_slack, RegimeFlags};
use errtrade::stats::tensor_extend;
use errtrade::{
    ApproxJointMeasurement, Basis, ErrorPair, HermitianOperator, Ket, RelationId, RelationReport, StateStatistics,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{StrategyKind, SweepConfig};
use crate::error::CliResult;
use crate::output::Num;
use crate::record::{InstanceRecord, RunRecord, Tally, WorstInstance};
use crate::rng::{instance_rng, RNG_DESCRIPTION};

/// Kind of observables drawn for an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Gaussian Hermitian `A`, `B`.
    General,
    /// `A² = B² = 1` with zero means and `±1` outputs.
    Dichotomic,
    /// Gaussian `A`, dichotomic `B` with `±1` outputs for `B` only.
    BOnly,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::General => "general",
            Family::Dichotomic => "dichotomic",
            Family::BOnly => "b_only",
        }
    }

    /// Whether instances of this family meet the relation's hypotheses.
    pub fn supports(self, relation: RelationId) -> bool {
        match relation {
            RelationId::SameSpectrum => self == Family::Dichotomic,
            RelationId::BOnlySpectrum => self != Family::General,
            _ => true,
        }
    }
}

/// Families sampled round-robin by instance index.
pub fn families(relations: &[RelationId]) -> Vec<Family> {
    let mut f = vec![Family::General];
    if relations.contains(&RelationId::SameSpectrum) {
        f.push(Family::Dichotomic);
    }
    if relations.contains(&RelationId::BOnlySpectrum) {
        f.push(Family::BOnly);
    }
    f
}

/// A generated instance reduced to the numbers the relations need.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepInstance {
    pub index: u64,
    pub family: Family,
    pub dim: usize,
    pub ancilla_dim: usize,
    pub stats: StateStatistics,
    pub errors: ErrorPair,
    pub regime: Option<RegimeFlags>,
}

impl SweepInstance {
    pub fn record(&self, slack: f64) -> InstanceRecord {
        InstanceRecord {
            index: self.index,
            family: self.family.name().to_string(),
            dim: self.dim,
            ancilla_dim: self.ancilla_dim,
            delta_a: Num(self.stats.delta_a),
            delta_b: Num(self.stats.delta_b),
            c_ab: Num(self.stats.c_ab),
            eps_a: Num(self.errors.eps_a),
            eps_b: Num(self.errors.eps_b),
            slack: Num(slack),
        }
    }

    /// `None` when the instance is outside the relation's hypotheses.
    pub fn evaluate(&self, relation: RelationId) -> Option<RelationReport> {
        if !self.family.supports(relation) {
            return None;
        }
        evaluate(relation, &self.errors, &self.stats, self.regime).ok()
    }
}

fn draw_observables(
    rng: &mut ChaCha8Rng,
    family: Family,
    saturating: bool,
    d: usize,
) -> (HermitianOperator, HermitianOperator, Ket) {
    let psi = haar_ket(rng, d);
    match family {
        Family::General => (gaussian_hermitian(rng, d), gaussian_hermitian(rng, d), psi),
        Family::Dichotomic => {
            let u = orthogonal_unit(rng, &psi);
            let a = dichotomic_swap(rng, &psi, &u);
            let b = if saturating {
                // B|ψ⟩ = e^{iφ}A|ψ⟩, so |⟨AB⟩| = 1.
                let phase = rng.random_range(-PI..PI);
                dichotomic_swap_with_phase(rng, &psi, &u, phase)
            } else {
                let v = orthogonal_unit(rng, &psi);
                dichotomic_swap(rng, &psi, &v)
            };
            (a, b, psi)
        }
        Family::BOnly => {
            let a = gaussian_hermitian(rng, d);
            let v = orthogonal_unit(rng, &psi);
            (a, dichotomic_swap(rng, &psi, &v), psi)
        }
    }
}

/// Haar basis, or with probability 1/4 a small rotation of an eigenbasis of
/// `A ⊗ 1`, which gives strategies with small `ε̃_𝒜`.
fn draw_basis(rng: &mut ChaCha8Rng, a: &HermitianOperator, ancilla_dim: usize) -> CliResult<Basis> {
    let dim = a.dim() * ancilla_dim;
    if rng.random_bool(0.25) {
        let (_, vecs) = tensor_extend(a, ancilla_dim)?.eigen();
        let delta = rng.random_range(0.0..0.1);
        let rot = near_identity_unitary(rng, dim, delta);
        Ok(Basis::from_unitary(vecs * rot)?)
    } else {
        Ok(haar_basis(rng, dim))
    }
}

fn random_outputs(rng: &mut ChaCha8Rng, op: &HermitianOperator, dichotomic: bool, n: usize) -> Vec<f64> {
    if dichotomic {
        return (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    }
    let eig = op.eigenvalues();
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
}

fn outputs_for(basis: &Basis, op: &HermitianOperator, joint: &Ket, dichotomic: bool) -> CliResult<Vec<f64>> {
    Ok(if dichotomic {
        dichotomic_outputs(basis, op, joint)?
    } else {
        optimal_outputs(basis, op, joint)?.values
    })
}

fn saturating_measurement(
    rng: &mut ChaCha8Rng,
    family: Family,
    a: &HermitianOperator,
    b: &HermitianOperator,
    psi: &Ket,
    stats: &StateStatistics,
) -> CliResult<Option<ApproxJointMeasurement>> {
    if stats.is_degenerate() {
        return Ok(Some(degenerate_strategy(a, b, psi)?));
    }
    let varphi = rng.random_range(-PI..PI);
    let built = match family {
        Family::General if psi.dim() == 2 => {
            let q = rng.random_range(0.3..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            general_saturating_corr1(a, b, psi, q, varphi)?
        }
        Family::General => {
            let (q, r) = (rng.random_range(0.3..2.0), rng.random_range(0.3..2.0));
            let params = ShapeParams::balanced(a, b, psi, q, r, varphi)?;
            general_saturating_corr_lt1(a, b, psi, params, varphi)?
        }
        Family::Dichotomic => {
            let q = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let flips = (rng.random_bool(0.5), rng.random_bool(0.5));
            dichotomic_saturating(a, b, psi, q, varphi, flips)?
        }
        Family::BOnly => return Ok(None),
    };
    Ok(Some(built.measurement))
}

/// Builds instance `index` of the sweep. Deterministic in `(config, index)`.
pub fn generate_instance(config: &SweepConfig, index: u64) -> CliResult<SweepInstance> {
    let mut rng = instance_rng(config.seed, index);
    let fams = families(&config.relations);
    let family = fams[(index % fams.len() as u64) as usize];
    let d = config.dims[rng.random_range(0..config.dims.len())];
    let saturating = config.strategy == StrategyKind::Saturating;
    let (a, b, psi) = draw_observables(&mut rng, family, saturating, d);
    let stats = StateStatistics::compute(&a, &b, &psi)?;
    let a_dich = family == Family::Dichotomic;
    let b_dich = family != Family::General;

    let constructed = if saturating {
        saturating_measurement(&mut rng, family, &a, &b, &psi, &stats)?
    } else {
        None
    };
    let (measurement, joint, ancilla_dim) = match constructed {
        Some(m) => (m, psi.clone(), 1),
        None => {
            let k = rng.random_range(1..=2);
            let joint = psi.tensor(&haar_ket(&mut rng, k));
            let basis = draw_basis(&mut rng, &a, k)?;
            let n = basis.len();
            let (f, g) = match config.strategy {
                StrategyKind::RandomBasis => (
                    random_outputs(&mut rng, &a, a_dich, n),
                    random_outputs(&mut rng, &b, b_dich, n),
                ),
                _ => (
                    outputs_for(&basis, &a, &joint, a_dich)?,
                    outputs_for(&basis, &b, &joint, b_dich)?,
                ),
            };
            (ApproxJointMeasurement::new(basis, f, g)?, joint, k)
        }
    };
    let (ea, eb) = measurement.errors(&a, &b, &joint)?;
    let regime = if family == Family::General {
        None
    } else {
        let (xa, xb) = (measurement.approx_a(), measurement.approx_b());
        Some(RegimeFlags::detect(&a, &b, &psi, Some((&xa, &xb)))?)
    };
    Ok(SweepInstance {
        index,
        family,
        dim: d,
        ancilla_dim,
        stats,
        errors: ErrorPair::new(ea, eb, &stats),
        regime,
    })
}

/// Generates all instances in parallel; the result is ordered by index.
pub fn generate_all(config: &SweepConfig) -> CliResult<Vec<SweepInstance>> {
    (0..config.n_instances as u64)
        .into_par_iter()
        .map(|i| generate_instance(config, i))
        .collect()
}

/// Runs the sweep and reduces it by instance index.
pub fn cmd_verify(config: &SweepConfig) -> CliResult<RunRecord> {
    config.validate()?;
    let start = Instant::now();
    let instances = generate_all(config)?;
    let mut tallies: Vec<Tally> = config
        .relations
        .iter()
        .map(|r| Tally::new(r.name(), r.is_universal()))
        .collect();
    let mut chain_failures = 0;
    let mut dropped_product_violations = 0;
    let tau = errtrade::tolerances().num;
    for inst in &instances {
        for (rel, tally) in config.relations.iter().zip(tallies.iter_mut()) {
            match inst.evaluate(*rel) {
                Some(r) => tally.add(r.slack, r.satisfied, r.saturated, || {
                    WorstInstance::Sweep(inst.record(r.slack))
                }),
                None => tally.skip(),
            }
        }
        if !ozawa_implied_check(&inst.errors, &inst.stats) {
            chain_failures += 1;
        }
        let (e, s) = (&inst.errors, &inst.stats);
        if ozawa_without_product_slack(e.eps_a, e.eps_b, s.delta_a, s.delta_b, s.c_ab) < -tau {
            dropped_product_violations += 1;
        }
    }
    let summaries: Vec<_> = tallies.into_iter().map(|t| t.summary).collect();
    let passed = summaries.iter().all(|s| !s.universal || s.violations == 0);
    Ok(RunRecord {
        command: "verify".into(),
        config_hash: config.hash("verify"),
        rng: RNG_DESCRIPTION.into(),
        seed: config.seed,
        n_instances: config.n_instances,
        summaries,
        chain_failures: Some(chain_failures),
        dropped_product_violations: Some(dropped_product_violations),
        passed,
        wall_time: start.elapsed(),
    })
}
