//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, SQRT_2};
use std::time::{Duration, Instant};

use errtrade::constructions::{
    commutator_angles, general_saturating_corr1, general_saturating_corr_lt1, lt1_scale_product, qubit_ed_saturating,
    qubit_joint_saturating, QubitPair, ShapeParams,
};
use errtrade::geometry::LemmaId;
use errtrade::joint::{neumark_extend, optimal_outputs, povm_rms_error, rms_error, WeakValueData};
use errtrade::random::{gaussian_hermitian, haar_basis, haar_ket, random_povm, unit_correlation_partner};
use errtrade::relations::{
    dimless_slack, ozawa_implied_check, ozawa_without_product_slack, same_spectrum_slack, RelationId,
};
use errtrade::stats::normalized_observable;
use errtrade::{ErrorPair, HermitianOperator, StateStatistics};
use errtrade_cli::curve::experiment_rows;
use errtrade_cli::{
    cmd_experiments, cmd_lemmas, cmd_verify, Experiment, Format, LemmaConfig, StrategyKind, SweepConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAT: f64 = 1e-7;
const NUM: f64 = 1e-9;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn run(id: u32, name: &str, budget: Option<Duration>, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = check();
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed < b);
    let passed = out.passed && in_time;
    let limit = budget
        .map(|b| format!(" (limit {:.0} s)", b.as_secs_f64()))
        .unwrap_or_default();
    println!(
        "criterion {id} {name}: {} [{}; {:.3} s{limit}]",
        if passed { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64()
    );
    passed
}

const ANGLES: [f64; 4] = [FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2];
const GRID: usize = 50;

fn grid(pair: &QubitPair, phi: f64, i: usize) -> f64 {
    pair.phi_a + phi * i as f64 / (GRID - 1) as f64
}

/// Error pairs and statistics collected for the implication-chain check.
type Collected = Vec<(ErrorPair, StateStatistics)>;

fn qubit_joint(collected: &mut Collected) -> Outcome {
    let mut worst_slack = 0.0f64;
    let mut worst_pred = 0.0f64;
    for &phi in &ANGLES {
        let pair = QubitPair::equatorial(0.25, 0.25 + phi);
        let s = pair.stats().unwrap();
        let ct = s.c_tilde().unwrap();
        for i in 0..GRID {
            let varphi = grid(&pair, phi, i);
            let c = qubit_joint_saturating(&pair, 1.1, varphi).unwrap();
            let (ea, eb) = c
                .measurement
                .errors_by_operator(&pair.a(), &pair.b(), &pair.state())
                .unwrap();
            let ep = ErrorPair::new(ea, eb, &s);
            let (x, y) = (ep.eps_a_tilde.unwrap(), ep.eps_b_tilde.unwrap());
            worst_pred = worst_pred
                .max((x - (varphi - pair.phi_a).sin()).abs())
                .max((y - (pair.phi_b - varphi).sin()).abs());
            worst_slack = worst_slack.max(dimless_slack(x, y, ct).abs());
            collected.push((ep, s));
        }
    }
    Outcome::new(
        worst_slack <= SAT && worst_pred <= NUM,
        format!("max |slack| {worst_slack:.2e}, max deviation from (sin, sin) {worst_pred:.2e}"),
    )
}

fn qubit_ed(collected: &mut Collected) -> Outcome {
    let mut worst_slack = 0.0f64;
    let mut worst_pred = 0.0f64;
    let mut worst_square = 0.0f64;
    for &phi in &ANGLES {
        let pair = QubitPair::equatorial(-0.4, -0.4 + phi);
        let s = pair.stats().unwrap();
        for i in 0..GRID {
            let varphi = grid(&pair, phi, i);
            let (real, _) = qubit_ed_saturating(&pair, varphi).unwrap();
            let joint = real.joint_state(&pair.state());
            let eps = rms_error(&real.approx_a(), &pair.a(), &joint).unwrap();
            let eta = rms_error(&real.approx_b(), &pair.b(), &joint).unwrap();
            worst_pred = worst_pred
                .max((eps - 2.0 * ((varphi - pair.phi_a) / 2.0).sin()).abs())
                .max((eta - 2.0 * ((pair.phi_b - varphi) / 2.0).sin()).abs());
            worst_square = worst_square
                .max(real.approx_a().involution_residual())
                .max(real.approx_b().involution_residual());
            worst_slack = worst_slack.max(same_spectrum_slack(eps, eta, s.c_ab).abs());
            collected.push((ErrorPair::new(eps, eta, &s), s));
        }
    }
    Outcome::new(
        worst_slack <= SAT && worst_pred <= NUM && worst_square <= 1e-10,
        format!("max |slack| {worst_slack:.2e}, max |𝒜²−1|,|ℬ²−1| {worst_square:.2e}, max deviation {worst_pred:.2e}"),
    )
}

fn universality_sweep() -> (Outcome, Option<errtrade_cli::RunRecord>) {
    let config = SweepConfig {
        seed: 2024,
        dims: (2..=6).collect(),
        n_instances: 100_000,
        relations: vec![
            RelationId::Robertson,
            RelationId::OzawaJoint,
            RelationId::Branciard,
            RelationId::BranciardDimless,
            RelationId::Hak,
        ],
        strategy: StrategyKind::OptimalOutputs,
    };
    let record = cmd_verify(&config).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for s in &record.summaries {
        let min = s.min_slack.map_or(f64::NAN, |m| m.0);
        if s.universal {
            ok &= s.violations == 0 && min >= -NUM && s.evaluated == config.n_instances;
            parts.push(format!("{} {} violations", s.name, s.violations));
        } else {
            ok &= s.violation_rate() >= 0.01;
            parts.push(format!("{} {:.2}% violated", s.name, 100.0 * s.violation_rate()));
        }
    }
    (Outcome::new(ok && record.passed, parts.join(", ")), Some(record))
}

fn lemma_fuzz() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for lemma in LemmaId::ALL {
        let config = LemmaConfig {
            seed: 99,
            n_instances: 1_000_000,
            dims: (3..=8).collect(),
            lemmas: vec![lemma],
            planted_every: 16,
        };
        let record = cmd_lemmas(&config).unwrap();
        let s = &record.summaries[0];
        let min = s.min_slack.map_or(f64::NAN, |m| m.0);
        let failures = s.witness_failures.unwrap_or(usize::MAX);
        let secs = record.wall_time.as_secs_f64();
        ok &= min >= -NUM && failures == 0 && s.saturated > 0 && s.evaluated == config.n_instances && secs < 60.0;
        parts.push(format!(
            "{}: min slack {min:.2e}, {} saturated, {failures} non-coplanar, {secs:.1} s",
            s.name, s.saturated
        ));
    }
    Outcome::new(ok, parts.join("; "))
}

fn route_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let d = rng.random_range(2..=4);
        let n = rng.random_range(1..=6);
        let rank = rng.random_range(1..=d);
        let povm = random_povm(&mut rng, d, n, rank).unwrap();
        let a = gaussian_hermitian(&mut rng, d);
        let psi = haar_ket(&mut rng, d);
        let outputs: Vec<f64> = if rng.random_bool(0.5) {
            povm.optimal_outputs(&a, &psi).unwrap()
        } else {
            (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
        };
        let direct = povm_rms_error(&povm, &outputs, &a, &psi).unwrap();
        let ext = neumark_extend(&povm).unwrap();
        let joint = ext.joint_state(&psi).unwrap();
        let m = ext.joint_measurement(&outputs, &outputs).unwrap();
        let via = rms_error(&m.approx_a(), &a, &joint).unwrap();
        worst = worst.max((direct - via).abs());
    }
    Outcome::new(worst <= NUM, format!("max route difference {worst:.2e}"))
}

fn parameter_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_spread = 0.0f64;
    let mut worst_pred = 0.0f64;
    let mut worst_constraint = 0.0f64;

    for dim in [2, 3, 4] {
        let psi = haar_ket(&mut rng, dim);
        let a = gaussian_hermitian(&mut rng, dim);
        let a0_psi = normalized_observable(&a, &psi).unwrap().apply(psi.amplitudes());
        let b = unit_correlation_partner(&mut rng, &a0_psi, &psi, 0.3, 1.7, 0.9);
        let s = StateStatistics::compute(&a, &b, &psi).unwrap();
        let phi = s.corr_a0b0.unwrap().arg();
        for &varphi in &[-phi / 2.0, 0.1, phi / 2.0] {
            let expect = (
                s.delta_a * (varphi + phi / 2.0).sin().abs(),
                s.delta_b * (phi / 2.0 - varphi).sin().abs(),
            );
            let errs: Vec<(f64, f64)> = [0.5, -0.5, 1.0, -1.0, 3.0]
                .iter()
                .map(|&q| {
                    let c = general_saturating_corr1(&a, &b, &psi, q, varphi).unwrap();
                    c.measurement.errors_by_operator(&a, &b, &psi).unwrap()
                })
                .collect();
            for e in &errs {
                worst_spread = worst_spread.max((e.0 - errs[0].0).abs()).max((e.1 - errs[0].1).abs());
                worst_pred = worst_pred.max((e.0 - expect.0).abs()).max((e.1 - expect.1).abs());
            }
        }
    }

    for dim in [3, 4, 5] {
        let (a, b, psi) = (
            gaussian_hermitian(&mut rng, dim),
            gaussian_hermitian(&mut rng, dim),
            haar_ket(&mut rng, dim),
        );
        let s = StateStatistics::compute(&a, &b, &psi).unwrap();
        let z = s.corr_a0b0.unwrap();
        let phi = z.im.asin();
        assert!((commutator_angles(z).0 - phi).abs() < 1e-15);
        for &varphi in &[-phi.abs() / 2.0, 0.2 * phi, phi.abs() / 2.0] {
            let expect = (
                s.delta_a * (varphi + phi / 2.0).sin().abs(),
                s.delta_b * (phi / 2.0 - varphi).sin().abs(),
            );
            let mut errs = Vec::new();
            for _ in 0..5 {
                let q = rng.random_range(-2.0..2.0);
                let r = rng.random_range(-2.0..2.0);
                let sv = rng.random_range(0.2..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let params = ShapeParams::with_s(&a, &b, &psi, q, r, sv, varphi).unwrap();
                let required = lt1_scale_product(&a, &b, &psi, q, r, varphi).unwrap();
                worst_constraint = worst_constraint.max((params.s * params.t - required).abs() / required);
                let c = general_saturating_corr_lt1(&a, &b, &psi, params, varphi).unwrap();
                errs.push(c.measurement.errors_by_operator(&a, &b, &psi).unwrap());
            }
            for e in &errs {
                worst_spread = worst_spread.max((e.0 - errs[0].0).abs()).max((e.1 - errs[0].1).abs());
                worst_pred = worst_pred.max((e.0 - expect.0).abs()).max((e.1 - expect.1).abs());
            }
        }
    }
    Outcome::new(
        worst_spread <= NUM && worst_pred <= NUM && worst_constraint <= 1e-12,
        format!(
            "max spread {worst_spread:.2e}, max deviation from prediction {worst_pred:.2e}, s·t residual {worst_constraint:.2e}"
        ),
    )
}

fn experiments() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("erhart.csv");
    let erhart = cmd_experiments(Experiment::Erhart, 101, Format::Csv, Some(&path)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let mut worst_curve = 0.0f64;
    for (row, p) in erhart.iter().zip(&parsed) {
        let t = row.parameter.0;
        worst_curve = worst_curve
            .max((p[1] - 2.0 * (t / 2.0).sin()).abs())
            .max((p[2] - SQRT_2 * t.cos()).abs());
    }
    let at = |t: f64| {
        erhart
            .iter()
            .find(|r| (r.parameter.0 - t).abs() < 1e-15)
            .map(|r| r.slack.0)
            .unwrap()
    };
    let (s0, s_mid, s_end) = (at(0.0), at(FRAC_PI_4), at(FRAC_PI_2));
    let rozema = experiment_rows(Experiment::Rozema, 101).unwrap();
    let rozema_max = rozema.iter().map(|r| r.slack.0.abs()).fold(0.0, f64::max);
    Outcome::new(
        worst_curve <= 1e-15 * 4.0
            && parsed.len() == 101
            && s0.abs() <= SAT
            && s_end.abs() <= SAT
            && s_mid > 1e-3
            && rozema_max <= SAT,
        format!(
            "erhart slack {s0:.2e} at 0, {s_mid:.4} at π/4, {s_end:.2e} at π/2; rozema max |slack| {rozema_max:.2e}"
        ),
    )
}

fn implication_chain(collected: &Collected, sweep: Option<&errtrade_cli::RunRecord>) -> Outcome {
    let mut chain = 0;
    let mut dropped = 0;
    for (e, s) in collected {
        if !ozawa_implied_check(e, s) {
            chain += 1;
        }
        if ozawa_without_product_slack(e.eps_a, e.eps_b, s.delta_a, s.delta_b, s.c_ab) < -NUM {
            dropped += 1;
        }
    }
    let (sweep_chain, sweep_dropped) = match sweep {
        Some(r) => (
            r.chain_failures.unwrap_or(usize::MAX),
            r.dropped_product_violations.unwrap_or(usize::MAX),
        ),
        None => (usize::MAX, usize::MAX),
    };
    let total = collected.len() + sweep.map_or(0, |r| r.n_instances);
    Outcome::new(
        chain + dropped + sweep_chain + sweep_dropped == 0,
        format!(
            "{total} instances: {} chain failures, {} product-dropped violations",
            chain.saturating_add(sweep_chain),
            dropped.saturating_add(sweep_dropped)
        ),
    )
}

fn weak_value_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    let mut not_increasing = 0usize;
    for _ in 0..1000 {
        let d = rng.random_range(2..=5);
        let a = gaussian_hermitian(&mut rng, d);
        let psi = haar_ket(&mut rng, d);
        let basis = haar_basis(&mut rng, d);
        let f = optimal_outputs(&basis, &a, &psi).unwrap().values;
        let wv = WeakValueData::compute(&basis, &a, &psi).unwrap();
        let squared = |out: &[f64]| {
            let op = HermitianOperator::spectral(basis.matrix(), out).unwrap();
            rms_error(&op, &a, &psi).unwrap().powi(2)
        };
        let base = squared(&f);
        for m in 0..d {
            let p = wv.probability(m);
            if p <= 1e-6 {
                continue;
            }
            for delta in [0.05, -0.05] {
                let mut g = f.clone();
                g[m] += delta;
                let grown = squared(&g) - base;
                worst = worst.max((grown - p * 0.0025).abs());
                if grown <= 0.0 {
                    not_increasing += 1;
                }
                checked += 1;
            }
        }
    }
    Outcome::new(
        worst <= NUM && not_increasing == 0,
        format!("{checked} perturbations, max deviation from p·0.0025 {worst:.2e}"),
    )
}

fn main() {
    let mut collected = Collected::new();
    let mut sweep = None;
    let second = Some(Duration::from_secs(1));
    let results = [
        run(1, "qubit joint saturation", second, || qubit_joint(&mut collected)),
        run(2, "same-spectrum saturation", second, || qubit_ed(&mut collected)),
        run(3, "universality sweep", Some(Duration::from_secs(120)), || {
            let (out, record) = universality_sweep();
            sweep = record;
            out
        }),
        run(4, "lemma fuzzing", Some(Duration::from_secs(180)), lemma_fuzz),
        run(5, "POVM and extension routes", None, route_equivalence),
        run(6, "parameter independence", None, parameter_independence),
        run(7, "experiment reproduction", None, experiments),
        run(8, "implication chain", None, || {
            implication_chain(&collected, sweep.as_ref())
        }),
        run(9, "weak-value optimality", None, weak_value_optimality),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
