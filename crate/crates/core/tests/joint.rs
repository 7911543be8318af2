use errtrade::joint::*;
use errtrade::linalg::{Basis, HermitianOperator, Ket};
use errtrade::random::{dichotomic_swap, gaussian_hermitian, haar_basis, haar_ket, orthogonal_unit, random_povm};
use errtrade::relations::{branciard_slack, dimless_slack, ozawa_slack, robertson_slack};
use errtrade::stats::{tensor_extend, StateStatistics};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn trine() -> Povm {
    let elements = (0..3)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            let v = Ket::from_slice(&[
                Complex64::from((angle / 2.0).cos()),
                Complex64::from((angle / 2.0).sin()),
            ])
            .unwrap();
            HermitianOperator::projector(&v).scaled(2.0 / 3.0)
        })
        .collect();
    Povm::new(elements, vec![0.0, 1.0, 2.0]).unwrap()
}

#[test]
fn trine_extension_uses_a_qubit_ancilla() {
    let ext = neumark_extend(&trine()).unwrap();
    assert_eq!(ext.ancilla_dim, 2);
    assert_eq!(ext.basis.dim(), 4);
    assert!(ext.residual < 1e-12);
    let rebuilt = ext.reconstruct(3);
    for (r, e) in rebuilt.iter().zip(trine().elements()) {
        assert!((r - e.matrix()).norm() < 1e-12);
    }
}

#[test]
fn povm_and_extension_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..200 {
        let d = rng.random_range(2..=4);
        let n = rng.random_range(1..=6);
        let rank = rng.random_range(1..=d);
        let povm = random_povm(&mut rng, d, n, rank).unwrap();
        let a = gaussian_hermitian(&mut rng, d);
        let b = gaussian_hermitian(&mut rng, d);
        let psi = haar_ket(&mut rng, d);
        let f = povm.optimal_outputs(&a, &psi).unwrap();
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let ea = povm_rms_error(&povm, &f, &a, &psi).unwrap();
        let eb = povm_rms_error(&povm, &g, &b, &psi).unwrap();

        let ext = neumark_extend(&povm).unwrap();
        let joint = ext.joint_state(&psi).unwrap();
        let m = ext.joint_measurement(&f, &g).unwrap();
        let (xa, xb) = m.errors(&a, &b, &joint).unwrap();
        let (ya, yb) = m.errors_by_operator(&a, &b, &joint).unwrap();
        assert!((ea - xa).abs() < 1e-9 && (eb - xb).abs() < 1e-9, "d={d} n={n}");
        assert!((ea - ya).abs() < 1e-9 && (eb - yb).abs() < 1e-9);
    }
}

#[test]
fn extension_of_projective_povm_is_its_basis() {
    let a = HermitianOperator::from_real_diagonal(&[0.5, -1.0, 2.0]);
    let povm = Povm::from_eigenbasis(&a);
    let ext = neumark_extend(&povm).unwrap();
    assert_eq!(ext.ancilla_dim, 1);
    let psi = Ket::normalized(nalgebra::DVector::from_element(3, Complex64::from(1.0))).unwrap();
    let e = povm_rms_error(&povm, povm.labels(), &a, &psi).unwrap();
    assert!(e < 1e-12);
}

#[test]
fn operator_and_outcome_routes_agree_with_ancilla() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let d = rng.random_range(2..=4);
        let k = rng.random_range(1..=3);
        let a = gaussian_hermitian(&mut rng, d);
        let b = gaussian_hermitian(&mut rng, d);
        let joint = haar_ket(&mut rng, d).tensor(&haar_ket(&mut rng, k));
        let basis = haar_basis(&mut rng, d * k);
        let f: Vec<f64> = (0..d * k).map(|_| rng.random_range(-3.0..3.0)).collect();
        let g: Vec<f64> = (0..d * k).map(|_| rng.random_range(-3.0..3.0)).collect();
        let m = ApproxJointMeasurement::new(basis, f, g).unwrap();
        let x = m.errors(&a, &b, &joint).unwrap();
        let y = m.errors_by_operator(&a, &b, &joint).unwrap();
        assert!((x.0 - y.0).abs() < 1e-10 && (x.1 - y.1).abs() < 1e-10);
        assert!(m.approx_a().commutes_with(&m.approx_b()).unwrap() < 1e-10);
    }
}

#[test]
fn minimal_error_formula_matches_optimal_outputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..100 {
        let d = rng.random_range(2..=5);
        let a = gaussian_hermitian(&mut rng, d);
        let psi = haar_ket(&mut rng, d);
        let basis = haar_basis(&mut rng, d);
        let f = optimal_outputs(&basis, &a, &psi).unwrap();
        let direct = rms_error(
            &HermitianOperator::spectral(basis.matrix(), &f.values).unwrap(),
            &a,
            &psi,
        )
        .unwrap();
        assert!((optimal_rms_error(&basis, &a, &psi).unwrap() - direct).abs() < 1e-10);
    }
}

#[test]
fn zero_probability_outcomes_use_the_numerator() {
    // Basis containing ψ itself: every other outcome has p = 0.
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let d = 4;
    let psi = haar_ket(&mut rng, d);
    let basis = errtrade::linalg::complete_basis(&[psi.amplitudes().clone()], d).unwrap();
    let a = gaussian_hermitian(&mut rng, d);
    let out = optimal_outputs(&basis, &a, &psi).unwrap();
    assert_eq!(out.zero_probability, vec![false, true, true, true]);
    // The measurement only reveals ⟨A⟩, so the error is ΔA.
    let s = StateStatistics::compute(&a, &a, &psi).unwrap();
    assert!((optimal_rms_error(&basis, &a, &psi).unwrap() - s.delta_a).abs() < 1e-10);
}

#[test]
fn perturbing_an_optimal_output_costs_its_probability() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for _ in 0..200 {
        let d = rng.random_range(2..=5);
        let a = gaussian_hermitian(&mut rng, d);
        let psi = haar_ket(&mut rng, d);
        let basis = haar_basis(&mut rng, d);
        let wv = WeakValueData::compute(&basis, &a, &psi).unwrap();
        let f = optimal_outputs(&basis, &a, &psi).unwrap().values;
        let base = wv.squared_error(&f);
        for m in 0..d {
            let p = wv.probability(m);
            for delta in [0.05, -0.05] {
                let mut g = f.clone();
                g[m] += delta;
                let grown = wv.squared_error(&g) - base;
                assert!((grown - p * delta * delta).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn sign_outputs_follow_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    for _ in 0..100 {
        let d = rng.random_range(2..=5);
        let psi = haar_ket(&mut rng, d);
        let u = orthogonal_unit(&mut rng, &psi);
        let a = dichotomic_swap(&mut rng, &psi, &u);
        let basis = haar_basis(&mut rng, d);
        let signs = dichotomic_outputs(&basis, &a, &psi).unwrap();
        let wv = WeakValueData::compute(&basis, &a, &psi).unwrap();
        let sum: f64 = (0..d)
            .filter_map(|m| wv.weak_value(m).map(|w| wv.probability(m) * w.re.abs()))
            .sum();
        assert!((wv.squared_error(&signs) - (2.0 - 2.0 * sum)).abs() < 1e-10);
    }
}

#[test]
fn random_strategies_never_beat_the_universal_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for _ in 0..2000 {
        let d = rng.random_range(2..=4);
        let k = rng.random_range(1..=2);
        let a = gaussian_hermitian(&mut rng, d);
        let b = gaussian_hermitian(&mut rng, d);
        let psi = haar_ket(&mut rng, d);
        let joint = psi.tensor(&haar_ket(&mut rng, k));
        let s = StateStatistics::compute(&a, &b, &psi).unwrap();
        let m = ApproxJointMeasurement::with_optimal_outputs(haar_basis(&mut rng, d * k), &a, &b, &joint).unwrap();
        let (ea, eb) = m.errors(&a, &b, &joint).unwrap();
        let ep = ErrorPair::new(ea, eb, &s);
        assert!(robertson_slack(s.delta_a, s.delta_b, s.c_ab) >= -1e-9);
        assert!(ozawa_slack(ea, eb, s.delta_a, s.delta_b, s.c_ab) >= -1e-9);
        assert!(branciard_slack(ea, eb, s.delta_a, s.delta_b, s.c_ab) >= -1e-9);
        let ct = s.c_tilde().unwrap();
        assert!(dimless_slack(ep.eps_a_tilde.unwrap(), ep.eps_b_tilde.unwrap(), ct) >= -1e-9);
    }
}

#[test]
fn extended_observable_matches_tensor_product() {
    let a = HermitianOperator::pauli_y();
    let e = extend_to(&a, 6).unwrap();
    assert_eq!(e, tensor_extend(&a, 3).unwrap());
    let b = Basis::computational(6);
    assert_eq!(b.len(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimal_outputs_are_minimal(seed in any::<u64>(), d in 2usize..5, shift in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = gaussian_hermitian(&mut rng, d);
        let psi = haar_ket(&mut rng, d);
        let basis = haar_basis(&mut rng, d);
        let wv = WeakValueData::compute(&basis, &a, &psi).unwrap();
        let f = optimal_outputs(&basis, &a, &psi).unwrap().values;
        let g: Vec<f64> = f.iter().enumerate().map(|(i, v)| v + shift * (i as f64 - 1.0)).collect();
        prop_assert!(wv.squared_error(&g) >= wv.squared_error(&f) - 1e-12);
    }

    #[test]
    fn povm_elements_sum_to_identity(seed in any::<u64>(), d in 2usize..5, n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let povm = random_povm(&mut rng, d, n, 1).unwrap();
        let probs = povm.probabilities(&haar_ket(&mut rng, d)).unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(probs.iter().all(|&p| p >= -1e-12));
    }
}
