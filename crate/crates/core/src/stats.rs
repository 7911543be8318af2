//! State-dependent statistics of one or two observables in a pure state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, HermitianOperator, Ket};
use crate::tol::tolerances;

/// `⟨ψ|op|ψ⟩`. The imaginary part is checked against `τ_num` and dropped.
pub fn expectation(op: &HermitianOperator, state: &Ket) -> Result<f64> {
    op.check_state(state)?;
    let psi = state.amplitudes();
    let v = inner(psi, &op.apply(psi));
    let scale = 1.0 + op.matrix().norm();
    if v.im.abs() > tolerances().num * scale {
        return Err(Error::ImaginaryResidue { residue: v.im });
    }
    Ok(v.re)
}

/// `‖(op − ⟨op⟩)|ψ⟩‖`, the standard deviation.
pub fn std_dev(op: &HermitianOperator, state: &Ket) -> Result<f64> {
    let mean = expectation(op, state)?;
    let psi = state.amplitudes();
    let centered = op.apply(psi) - psi * Complex64::from(mean);
    Ok(centered.norm())
}

/// `C_AB = ⟨ψ|[A,B]|ψ⟩ / 2i = Im⟨Aψ|Bψ⟩`.
pub fn commutator_value(a: &HermitianOperator, b: &HermitianOperator, state: &Ket) -> Result<f64> {
    a.check_same_dim(b)?;
    a.check_state(state)?;
    let psi = state.amplitudes();
    Ok(inner(&a.apply(psi), &b.apply(psi)).im)
}

/// `A₀ = (A − ⟨A⟩)/ΔA`. Fails when `ΔA ≤ τ_deg`.
pub fn normalized_observable(op: &HermitianOperator, state: &Ket) -> Result<HermitianOperator> {
    let mean = expectation(op, state)?;
    let delta = std_dev(op, state)?;
    if delta <= tolerances().deg {
        return Err(Error::Degenerate {
            what: "standard deviation",
            value: delta,
        });
    }
    Ok(op.shifted(-mean).scaled(1.0 / delta))
}

/// `op ⊗ 1_ancilla_dim`.
pub fn tensor_extend(op: &HermitianOperator, ancilla_dim: usize) -> Result<HermitianOperator> {
    if ancilla_dim == 0 {
        return Err(Error::InvalidParameter("ancilla dimension must be ≥ 1".into()));
    }
    if ancilla_dim == 1 {
        return Ok(op.clone());
    }
    let id = DMatrix::<Complex64>::identity(ancilla_dim, ancilla_dim);
    HermitianOperator::new(op.matrix().kronecker(&id))
}

/// Everything the relations need to know about `(A, B, ψ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateStatistics {
    pub mean_a: f64,
    pub mean_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub c_ab: f64,
    /// `⟨A₀B₀⟩`; `None` when either standard deviation is degenerate.
    pub corr_a0b0: Option<Complex64>,
}

impl StateStatistics {
    pub fn compute(a: &HermitianOperator, b: &HermitianOperator, state: &Ket) -> Result<Self> {
        a.check_same_dim(b)?;
        let mean_a = expectation(a, state)?;
        let mean_b = expectation(b, state)?;
        let psi = state.amplitudes();
        let ca = a.apply(psi) - psi * Complex64::from(mean_a);
        let cb = b.apply(psi) - psi * Complex64::from(mean_b);
        let delta_a = ca.norm();
        let delta_b = cb.norm();
        // ⟨(A−⟨A⟩)(B−⟨B⟩)⟩ has the same imaginary part as ⟨AB⟩.
        let cov = inner(&ca, &cb);
        let deg = tolerances().deg;
        let corr_a0b0 = (delta_a > deg && delta_b > deg).then(|| cov / (delta_a * delta_b));
        Ok(Self {
            mean_a,
            mean_b,
            delta_a,
            delta_b,
            c_ab: cov.im,
            corr_a0b0,
        })
    }

    /// Builds statistics from raw numbers (no `⟨A₀B₀⟩`).
    pub fn from_values(delta_a: f64, delta_b: f64, c_ab: f64) -> Self {
        Self {
            mean_a: 0.0,
            mean_b: 0.0,
            delta_a,
            delta_b,
            c_ab,
            corr_a0b0: None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        let deg = tolerances().deg;
        self.delta_a <= deg || self.delta_b <= deg
    }

    /// `C̃_AB = C_AB/(ΔA ΔB)`, clamped to `[−1, 1]`.
    pub fn c_tilde(&self) -> Option<f64> {
        (!self.is_degenerate()).then(|| (self.c_ab / (self.delta_a * self.delta_b)).clamp(-1.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_expectations() {
        let z = HermitianOperator::pauli_z();
        let x = HermitianOperator::pauli_x();
        let up = Ket::plus_z();
        assert_eq!(expectation(&z, &up).unwrap(), 1.0);
        assert_eq!(expectation(&x, &up).unwrap(), 0.0);
        assert!((std_dev(&x, &up).unwrap() - 1.0).abs() < 1e-15);
        assert!(std_dev(&z, &up).unwrap() < 1e-15);
    }

    #[test]
    fn sigma_x_sigma_y_commutator_is_one() {
        let c = commutator_value(
            &HermitianOperator::pauli_x(),
            &HermitianOperator::pauli_y(),
            &Ket::plus_z(),
        )
        .unwrap();
        assert!((c - 1.0).abs() < 1e-15);
        let same = commutator_value(
            &HermitianOperator::pauli_x(),
            &HermitianOperator::pauli_x(),
            &Ket::plus_z(),
        )
        .unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn qubit_closed_forms() {
        let (ta, pa, tb, pb) = (0.7_f64, 0.2_f64, 1.9_f64, 1.1_f64);
        let a = HermitianOperator::bloch([ta.sin() * pa.cos(), ta.sin() * pa.sin(), ta.cos()]);
        let b = HermitianOperator::bloch([tb.sin() * pb.cos(), tb.sin() * pb.sin(), tb.cos()]);
        let psi = Ket::plus_z();
        assert!((std_dev(&a, &psi).unwrap() - ta.sin()).abs() < 1e-14);
        let c = commutator_value(&a, &b, &psi).unwrap();
        assert!((c - ta.sin() * tb.sin() * (pb - pa).sin()).abs() < 1e-14);
    }

    #[test]
    fn shift_and_scale_are_removed() {
        let a = HermitianOperator::pauli_z().shifted(2.0);
        let a0 = normalized_observable(&a, &Ket::plus_x()).unwrap();
        let diff = a0.matrix() - HermitianOperator::pauli_z().matrix();
        assert!(diff.norm() < 1e-14);
    }

    #[test]
    fn normalizing_an_eigenstate_fails() {
        let err = normalized_observable(&HermitianOperator::pauli_z(), &Ket::plus_z());
        assert!(matches!(err, Err(Error::Degenerate { .. })));
    }

    #[test]
    fn extension_of_sigma_z() {
        let ext = tensor_extend(&HermitianOperator::pauli_z(), 2).unwrap();
        let expect = HermitianOperator::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(ext.matrix(), expect.matrix());
        let same = tensor_extend(&HermitianOperator::pauli_z(), 1).unwrap();
        assert_eq!(same, HermitianOperator::pauli_z());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let psi = Ket::basis(3, 0);
        assert!(matches!(
            expectation(&HermitianOperator::pauli_z(), &psi),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
