//! Approximate joint measurements.
//!
//! A strategy is a projective measurement on `H ⊗ K` (an orthonormal basis
//! `{|m⟩}`) together with two real output functions `f(m)`, `g(m)`. The
//! approximating observables `𝒜 = Σ f(m)|m⟩⟨m|` and `ℬ = Σ g(m)|m⟩⟨m|`
//! commute by construction. Equivalent POVM descriptions on `H` alone are
//! related to this picture by a Neumark extension.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{complete_basis, orthonormalize, Basis, CMatrix, CVector, HermitianOperator, Ket};
use crate::stats::{tensor_extend, StateStatistics};
use crate::tol::tolerances;

/// Embeds `ideal` (acting on the system) into a joint space of dimension
/// `joint_dim` as `ideal ⊗ 1`.
pub fn extend_to(ideal: &HermitianOperator, joint_dim: usize) -> Result<HermitianOperator> {
    let d = ideal.dim();
    if !joint_dim.is_multiple_of(d) {
        return Err(Error::DimensionMismatch {
            expected: d * joint_dim.div_ceil(d),
            found: joint_dim,
        });
    }
    tensor_extend(ideal, joint_dim / d)
}

/// `ε = ⟨ψ,ξ|(approx − ideal⊗1)²|ψ,ξ⟩^{1/2}`.
pub fn rms_error(approx: &HermitianOperator, ideal: &HermitianOperator, joint_state: &Ket) -> Result<f64> {
    approx.check_state(joint_state)?;
    let ext = extend_to(ideal, approx.dim())?;
    let diff = approx.matrix() - ext.matrix();
    Ok((diff * joint_state.amplitudes()).norm())
}

/// Per-outcome overlaps for a basis, an ideal observable and a joint state.
#[derive(Debug, Clone)]
pub struct WeakValueData {
    /// `⟨m|ψ,ξ⟩`.
    pub amplitude: Vec<Complex64>,
    /// `⟨m|A⊗1|ψ,ξ⟩`.
    pub numerator: Vec<Complex64>,
}

impl WeakValueData {
    pub fn compute(basis: &Basis, ideal: &HermitianOperator, joint_state: &Ket) -> Result<Self> {
        if basis.dim() != joint_state.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: joint_state.dim(),
            });
        }
        let ext = extend_to(ideal, basis.dim())?;
        let psi = joint_state.amplitudes();
        let amplitude = basis.coefficients(psi).iter().copied().collect();
        let numerator = basis.coefficients(&ext.apply(psi)).iter().copied().collect();
        Ok(Self { amplitude, numerator })
    }

    pub fn probability(&self, m: usize) -> f64 {
        self.amplitude[m].norm_sqr()
    }

    /// `⟨m|A|ψ⟩/⟨m|ψ⟩`, or `None` when `p(m) ≤ τ_p`.
    pub fn weak_value(&self, m: usize) -> Option<Complex64> {
        (self.probability(m) > tolerances().p).then(|| self.numerator[m] / self.amplitude[m])
    }

    pub fn len(&self) -> usize {
        self.amplitude.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitude.is_empty()
    }

    /// `ε² = Σ_m |f(m)⟨m|ψ⟩ − ⟨m|A|ψ⟩|²`, exact for any outputs.
    pub fn squared_error(&self, outputs: &[f64]) -> f64 {
        self.amplitude
            .iter()
            .zip(&self.numerator)
            .zip(outputs)
            .map(|((a, n), &f)| (a * f - n).norm_sqr())
            .sum()
    }
}

/// Outputs `f(m)` that minimize the rms error on a fixed basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalOutputs {
    pub values: Vec<f64>,
    /// Outcomes with `p(m) ≤ τ_p`; their value is set to 0 and does not
    /// affect the error.
    pub zero_probability: Vec<bool>,
}

/// `f_opt(m) = Re ⟨m|A⊗1|ψ,ξ⟩ / ⟨m|ψ,ξ⟩`, the real part of the weak value.
pub fn optimal_outputs(basis: &Basis, ideal: &HermitianOperator, joint_state: &Ket) -> Result<OptimalOutputs> {
    let wv = WeakValueData::compute(basis, ideal, joint_state)?;
    Ok(optimal_from(&wv))
}

fn optimal_from(wv: &WeakValueData) -> OptimalOutputs {
    let mut values = Vec::with_capacity(wv.len());
    let mut zero_probability = Vec::with_capacity(wv.len());
    for m in 0..wv.len() {
        match wv.weak_value(m) {
            Some(w) => {
                values.push(w.re);
                zero_probability.push(false);
            }
            None => {
                values.push(0.0);
                zero_probability.push(true);
            }
        }
    }
    OptimalOutputs {
        values,
        zero_probability,
    }
}

/// Minimal rms error on a basis: the weak values' imaginary parts on
/// `p(m) > τ_p`, plus `|⟨m|A⊗1|ψ,ξ⟩|²` on the remaining outcomes.
pub fn optimal_rms_error(basis: &Basis, ideal: &HermitianOperator, joint_state: &Ket) -> Result<f64> {
    let wv = WeakValueData::compute(basis, ideal, joint_state)?;
    let mut sum = 0.0;
    for m in 0..wv.len() {
        match wv.weak_value(m) {
            Some(w) => sum += wv.probability(m) * w.im * w.im,
            None => sum += wv.numerator[m].norm_sqr(),
        }
    }
    Ok(sum.sqrt())
}

/// `sign(Re weak value)` per outcome, for an involutory ideal (`A² = 1`).
/// Ties, including undefined weak values, resolve to `+1`.
pub fn dichotomic_outputs(basis: &Basis, ideal: &HermitianOperator, joint_state: &Ket) -> Result<Vec<f64>> {
    let residual = ideal.involution_residual();
    if residual > tolerances().num {
        return Err(Error::NotInvolutory { residual });
    }
    let wv = WeakValueData::compute(basis, ideal, joint_state)?;
    let tau = tolerances().num;
    Ok((0..wv.len())
        .map(|m| match wv.weak_value(m) {
            Some(w) if w.re < -tau => -1.0,
            _ => 1.0,
        })
        .collect())
}

/// Commuting approximations `(𝒜, ℬ)` given as a shared eigenbasis on the
/// joint space plus output values.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxJointMeasurement {
    pub basis: Basis,
    pub f_out: Vec<f64>,
    pub g_out: Vec<f64>,
}

impl ApproxJointMeasurement {
    pub fn new(basis: Basis, f_out: Vec<f64>, g_out: Vec<f64>) -> Result<Self> {
        for (what, v) in [("f outputs", &f_out), ("g outputs", &g_out)] {
            if v.len() != basis.len() {
                return Err(Error::LengthMismatch {
                    what,
                    expected: basis.len(),
                    found: v.len(),
                });
            }
        }
        Ok(Self { basis, f_out, g_out })
    }

    /// Basis with weak-value-optimal outputs for both observables.
    pub fn with_optimal_outputs(
        basis: Basis,
        a: &HermitianOperator,
        b: &HermitianOperator,
        joint_state: &Ket,
    ) -> Result<Self> {
        let f = optimal_outputs(&basis, a, joint_state)?.values;
        let g = optimal_outputs(&basis, b, joint_state)?.values;
        Self::new(basis, f, g)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `𝒜 = Σ f(m)|m⟩⟨m|`.
    pub fn approx_a(&self) -> HermitianOperator {
        HermitianOperator::spectral(self.basis.matrix(), &self.f_out).expect("lengths checked")
    }

    /// `ℬ = Σ g(m)|m⟩⟨m|`.
    pub fn approx_b(&self) -> HermitianOperator {
        HermitianOperator::spectral(self.basis.matrix(), &self.g_out).expect("lengths checked")
    }

    /// `(ε_𝒜, ε_ℬ)` from the outcome-wise expansion.
    pub fn errors(&self, a: &HermitianOperator, b: &HermitianOperator, joint_state: &Ket) -> Result<(f64, f64)> {
        let wa = WeakValueData::compute(&self.basis, a, joint_state)?;
        let wb = WeakValueData::compute(&self.basis, b, joint_state)?;
        Ok((
            wa.squared_error(&self.f_out).sqrt(),
            wb.squared_error(&self.g_out).sqrt(),
        ))
    }

    /// `(ε_𝒜, ε_ℬ)` from the operator definition, via `rms_error`.
    pub fn errors_by_operator(
        &self,
        a: &HermitianOperator,
        b: &HermitianOperator,
        joint_state: &Ket,
    ) -> Result<(f64, f64)> {
        Ok((
            rms_error(&self.approx_a(), a, joint_state)?,
            rms_error(&self.approx_b(), b, joint_state)?,
        ))
    }

    pub fn error_pair(
        &self,
        a: &HermitianOperator,
        b: &HermitianOperator,
        joint_state: &Ket,
        stats: &StateStatistics,
    ) -> Result<ErrorPair> {
        let (ea, eb) = self.errors(a, b, joint_state)?;
        Ok(ErrorPair::new(ea, eb, stats))
    }
}

/// rms errors with their normalized counterparts `ε̃ = ε/Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    pub eps_a: f64,
    pub eps_b: f64,
    /// `None` when `ΔA ≤ τ_deg`.
    pub eps_a_tilde: Option<f64>,
    /// `None` when `ΔB ≤ τ_deg`.
    pub eps_b_tilde: Option<f64>,
}

impl ErrorPair {
    pub fn new(eps_a: f64, eps_b: f64, stats: &StateStatistics) -> Self {
        let deg = tolerances().deg;
        Self {
            eps_a,
            eps_b,
            eps_a_tilde: (stats.delta_a > deg).then(|| eps_a / stats.delta_a),
            eps_b_tilde: (stats.delta_b > deg).then(|| eps_b / stats.delta_b),
        }
    }

    /// Dimensionless pair where `ΔA = ΔB = 1` by assumption.
    pub fn normalized(eps_a: f64, eps_b: f64) -> Self {
        Self {
            eps_a,
            eps_b,
            eps_a_tilde: Some(eps_a),
            eps_b_tilde: Some(eps_b),
        }
    }
}

/// Positive operator-valued measure on the system space.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
    labels: Vec<f64>,
}

impl Povm {
    /// Checks positivity (min eigenvalue ≥ −τ_num) and completeness.
    pub fn new(elements: Vec<HermitianOperator>, labels: Vec<f64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::LengthMismatch {
                what: "POVM elements",
                expected: 1,
                found: 0,
            });
        }
        if labels.len() != elements.len() {
            return Err(Error::LengthMismatch {
                what: "outcome labels",
                expected: elements.len(),
                found: labels.len(),
            });
        }
        let d = elements[0].dim();
        let tau = tolerances().num;
        let mut sum = CMatrix::zeros(d, d);
        for (index, e) in elements.iter().enumerate() {
            if e.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.dim(),
                });
            }
            let min = e.eigenvalues()[0];
            if min < -tau {
                return Err(Error::NotPositive {
                    index,
                    min_eigenvalue: min,
                });
            }
            sum += e.matrix();
        }
        let residual = crate::linalg::max_abs_diff(&sum, &CMatrix::identity(d, d));
        if residual > tau {
            return Err(Error::Incomplete { residual });
        }
        Ok(Self { elements, labels })
    }

    /// Projective measurement onto the eigenspaces of `op`, labelled by
    /// eigenvalue (one rank-1 element per eigenvector).
    pub fn from_eigenbasis(op: &HermitianOperator) -> Self {
        let (vals, vecs) = op.eigen();
        let elements = (0..vals.len())
            .map(|j| {
                let v = vecs.column(j).into_owned();
                HermitianOperator::hermitian_part(&v * v.adjoint())
            })
            .collect();
        Self { elements, labels: vals }
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// `p(m) = ⟨ψ|M_m|ψ⟩`.
    pub fn probabilities(&self, state: &Ket) -> Result<Vec<f64>> {
        self.elements
            .iter()
            .map(|e| crate::stats::expectation(e, state))
            .collect()
    }

    /// `f_opt(m) = Re⟨M_m A⟩/⟨M_m⟩`; 0 where `⟨M_m⟩ ≤ τ_p`.
    pub fn optimal_outputs(&self, ideal: &HermitianOperator, state: &Ket) -> Result<Vec<f64>> {
        ideal.check_state(state)?;
        let psi = state.amplitudes();
        let a_psi = ideal.apply(psi);
        Ok(self
            .elements
            .iter()
            .map(|e| {
                let m_psi = e.apply(psi);
                let p = crate::linalg::inner(psi, &m_psi).re;
                if p > tolerances().p {
                    crate::linalg::inner(&m_psi, &a_psi).re / p
                } else {
                    0.0
                }
            })
            .collect())
    }
}

/// `ε² = Σ_m ⟨ψ|(A − f(m)) M_m (A − f(m))|ψ⟩`.
pub fn povm_rms_error(povm: &Povm, outputs: &[f64], ideal: &HermitianOperator, state: &Ket) -> Result<f64> {
    if outputs.len() != povm.len() {
        return Err(Error::LengthMismatch {
            what: "outputs",
            expected: povm.len(),
            found: outputs.len(),
        });
    }
    ideal.check_state(state)?;
    if povm.dim() != ideal.dim() {
        return Err(Error::DimensionMismatch {
            expected: ideal.dim(),
            found: povm.dim(),
        });
    }
    let psi = state.amplitudes();
    let a_psi = ideal.apply(psi);
    let mut sum = 0.0;
    for (e, &f) in povm.elements.iter().zip(outputs) {
        let w = &a_psi - psi * Complex64::from(f);
        sum += crate::linalg::inner(&w, &e.apply(&w)).re;
    }
    Ok(sum.max(0.0).sqrt())
}

/// Projective realization of a POVM on `H ⊗ K` with ancilla state `|ξ⟩`.
#[derive(Debug, Clone)]
pub struct NeumarkExtension {
    pub basis: Basis,
    pub ancilla: Ket,
    /// POVM outcome index for each basis vector. Padding vectors, which
    /// never fire on `|ψ⟩⊗|ξ⟩`, are attached to outcome 0.
    pub outcome_of: Vec<usize>,
    pub system_dim: usize,
    pub ancilla_dim: usize,
    /// `max_m ‖M_m − (1⊗⟨ξ|) Σ_{j→m} |j⟩⟨j| (1⊗|ξ⟩)‖` (entrywise max).
    pub residual: f64,
}

impl NeumarkExtension {
    pub fn joint_state(&self, state: &Ket) -> Result<Ket> {
        if state.dim() != self.system_dim {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim,
                found: state.dim(),
            });
        }
        Ok(state.tensor(&self.ancilla))
    }

    /// Lifts per-outcome outputs onto the extension's basis vectors.
    pub fn lift_outputs(&self, outputs: &[f64]) -> Vec<f64> {
        self.outcome_of.iter().map(|&m| outputs[m]).collect()
    }

    pub fn joint_measurement(&self, f: &[f64], g: &[f64]) -> Result<ApproxJointMeasurement> {
        ApproxJointMeasurement::new(self.basis.clone(), self.lift_outputs(f), self.lift_outputs(g))
    }

    /// Reconstructs `M_m = (1⊗⟨ξ|) Σ_{j→m} |j⟩⟨j| (1⊗|ξ⟩)`.
    pub fn reconstruct(&self, n_outcomes: usize) -> Vec<CMatrix> {
        let d = self.system_dim;
        let k = self.ancilla_dim;
        let xi = self.ancilla.amplitudes();
        let mut out = vec![CMatrix::zeros(d, d); n_outcomes];
        for (j, &m) in self.outcome_of.iter().enumerate() {
            let v = self.basis.vector(j);
            // (1⊗⟨ξ|)|j⟩: contract the ancilla index.
            let mut w = CVector::zeros(d);
            for i in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..k {
                    acc += xi[a].conj() * v[i * k + a];
                }
                w[i] = acc;
            }
            out[m] += &w * w.adjoint();
        }
        out
    }
}

/// Neumark extension with ancilla `|ξ⟩ = |0⟩` of the smallest dimension
/// `k = ⌈N/d⌉`, where `N` is the number of rank-1 pieces of the elements.
///
/// Each element is split as `M_m = Σ_j |w_j⟩⟨w_j|`. The `d × N` matrix
/// `W = [w_1 … w_N]` has orthonormal rows; placing them at the rows
/// `i·k` of a `dk × dk` matrix and completing to a unitary gives basis
/// vectors with `(1⊗⟨0|)|m_j⟩ = |w_j⟩`.
pub fn neumark_extend(povm: &Povm) -> Result<NeumarkExtension> {
    let d = povm.dim();
    let tau = tolerances().num;
    let mut pieces: Vec<CVector> = Vec::new();
    let mut piece_outcome: Vec<usize> = Vec::new();
    for (m, e) in povm.elements.iter().enumerate() {
        let (vals, vecs) = e.eigen();
        for (j, &lam) in vals.iter().enumerate() {
            if lam > tau {
                pieces.push(vecs.column(j) * Complex64::from(lam.sqrt()));
                piece_outcome.push(m);
            }
        }
    }
    let n = pieces.len();
    if n < d {
        return Err(Error::DefectiveCompletion {
            residual: (d - n) as f64,
        });
    }
    let k = n.div_ceil(d);
    let big = d * k;

    // Rows i·k of U are the rows of W, zero-padded to length `big`.
    let w_rows: Vec<CVector> = (0..d)
        .map(|i| {
            let mut r = CVector::zeros(big);
            for (j, p) in pieces.iter().enumerate() {
                r[j] = p[i];
            }
            r
        })
        .collect();
    // Conjugated rows so that the completion works on column vectors.
    let conj_rows: Vec<CVector> = w_rows.iter().map(|r| r.map(|z| z.conj())).collect();
    let conj_rows = orthonormalize(&conj_rows)?;
    let full = complete_basis(&conj_rows, big)?;
    let mut u = CMatrix::zeros(big, big);
    let mut next_free = d;
    for i in 0..big {
        let src = if i % k == 0 {
            i / k
        } else {
            let s = next_free;
            next_free += 1;
            s
        };
        let row = full.vector(src);
        for j in 0..big {
            u[(i, j)] = row[j].conj();
        }
    }
    let basis = Basis::from_unitary(u)?;
    let mut outcome_of = piece_outcome;
    outcome_of.resize(big, 0);
    let ancilla = Ket::basis(k, 0);

    let mut ext = NeumarkExtension {
        basis,
        ancilla,
        outcome_of,
        system_dim: d,
        ancilla_dim: k,
        residual: 0.0,
    };
    let rebuilt = ext.reconstruct(povm.len());
    let residual = rebuilt
        .iter()
        .zip(&povm.elements)
        .map(|(r, e)| crate::linalg::max_abs_diff(r, e.matrix()))
        .fold(0.0, f64::max);
    if residual > tau {
        return Err(Error::DefectiveCompletion { residual });
    }
    ext.residual = residual;
    Ok(ext)
}
