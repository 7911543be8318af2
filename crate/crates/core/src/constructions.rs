//! Explicit measurement strategies that reach the error-trade-off bounds.
//!
//! The general constructions build a projective measurement on the system
//! alone, with eigenvectors in `span{ψ, Aψ, Bψ}` and the remaining basis
//! vectors orthogonal to it. Error-disturbance realizations copy such a
//! basis onto a probe and rotate the system back onto the eigenbasis of `B`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::joint::{dichotomic_outputs, rms_error, ApproxJointMeasurement};
use crate::linalg::{complete_basis, inner, kron, unitarity_residual, Basis, CMatrix, CVector, HermitianOperator, Ket};
use crate::stats::{expectation, normalized_observable, StateStatistics};
use crate::tol::tolerances;

/// A strategy together with the error pair its closed form predicts.
#[derive(Debug, Clone)]
pub struct Construction {
    pub measurement: ApproxJointMeasurement,
    /// `(ε_𝒜, ε_ℬ)` from the closed-form expressions.
    pub predicted: (f64, f64),
    /// Whether the angle lies on the branch where the pair reaches the bound.
    pub saturating: bool,
}

/// Two qubit observables `A = â·σ`, `B = b̂·σ` probed in `|+z⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitPair {
    pub theta_a: f64,
    pub phi_a: f64,
    pub theta_b: f64,
    pub phi_b: f64,
}

fn bloch_vector(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn dot3(u: [f64; 3], v: [f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

impl QubitPair {
    pub fn new(theta_a: f64, phi_a: f64, theta_b: f64, phi_b: f64) -> Self {
        Self {
            theta_a,
            phi_a,
            theta_b,
            phi_b,
        }
    }

    /// Both Bloch vectors on the equator.
    pub fn equatorial(phi_a: f64, phi_b: f64) -> Self {
        let half_pi = std::f64::consts::FRAC_PI_2;
        Self::new(half_pi, phi_a, half_pi, phi_b)
    }

    pub fn a_vector(&self) -> [f64; 3] {
        bloch_vector(self.theta_a, self.phi_a)
    }

    pub fn b_vector(&self) -> [f64; 3] {
        bloch_vector(self.theta_b, self.phi_b)
    }

    pub fn a(&self) -> HermitianOperator {
        HermitianOperator::bloch(self.a_vector())
    }

    pub fn b(&self) -> HermitianOperator {
        HermitianOperator::bloch(self.b_vector())
    }

    pub fn state(&self) -> Ket {
        Ket::plus_z()
    }

    /// `φ = φ_b − φ_a`.
    pub fn angle(&self) -> f64 {
        self.phi_b - self.phi_a
    }

    pub fn delta_a(&self) -> f64 {
        self.theta_a.sin()
    }

    pub fn delta_b(&self) -> f64 {
        self.theta_b.sin()
    }

    /// `C_AB = sin θ_a sin θ_b sin(φ_b − φ_a)`.
    pub fn commutator(&self) -> f64 {
        self.theta_a.sin() * self.theta_b.sin() * self.angle().sin()
    }

    pub fn stats(&self) -> Result<StateStatistics> {
        StateStatistics::compute(&self.a(), &self.b(), &self.state())
    }

    fn in_branch(&self, varphi: f64) -> bool {
        let tau = tolerances().num;
        let phi = self.angle();
        (-tau..=std::f64::consts::FRAC_PI_2 + tau).contains(&phi)
            && varphi >= self.phi_a - tau
            && varphi <= self.phi_b + tau
    }
}

/// Eigenvectors of `m̂·σ` for `m̂ = (sin θ cos φ, sin θ sin φ, cos θ)`,
/// eigenvalue `+1` first.
pub fn qubit_axis_basis(theta: f64, phi: f64) -> Basis {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Complex64::from_polar(1.0, phi);
    let plus = Ket::from_slice(&[Complex64::from(c), e * s]).expect("unit vector");
    let minus = Ket::from_slice(&[Complex64::from(s), -e * c]).expect("unit vector");
    Basis::from_kets(&[plus, minus]).expect("orthonormal pair")
}

/// Qubit strategy measuring along `m̂(θ, ϕ)` and outputting the
/// eigenvalues of `𝒜 = [(cos θ_a − cos θ m̂·â)𝟙 + (m̂·â − cos θ_a cos θ) m̂·σ]/sin²θ`
/// and its counterpart for `B`. The errors do not depend on `θ`.
pub fn qubit_joint_saturating(pair: &QubitPair, theta: f64, varphi: f64) -> Result<Construction> {
    let deg = tolerances().deg;
    if pair.theta_a.sin().abs() <= deg || pair.theta_b.sin().abs() <= deg {
        return Err(Error::Degenerate {
            what: "sin θ of an observable",
            value: pair.theta_a.sin().abs().min(pair.theta_b.sin().abs()),
        });
    }
    let sin2 = theta.sin().powi(2);
    if sin2 <= deg {
        return Err(Error::Degenerate {
            what: "sin² θ of the measurement axis",
            value: sin2,
        });
    }
    let m = bloch_vector(theta, varphi);
    let outputs = |obs: [f64; 3], theta_obs: f64| {
        let proj = dot3(m, obs);
        let identity_part = theta_obs.cos() - theta.cos() * proj;
        let axis_part = proj - theta_obs.cos() * theta.cos();
        vec![(identity_part + axis_part) / sin2, (identity_part - axis_part) / sin2]
    };
    let f = outputs(pair.a_vector(), pair.theta_a);
    let g = outputs(pair.b_vector(), pair.theta_b);
    let measurement = ApproxJointMeasurement::new(qubit_axis_basis(theta, varphi), f, g)?;
    Ok(Construction {
        measurement,
        predicted: (
            pair.delta_a() * (varphi - pair.phi_a).sin().abs(),
            pair.delta_b() * (pair.phi_b - varphi).sin().abs(),
        ),
        saturating: pair.in_branch(varphi),
    })
}

/// Interaction-based measurement of `A` followed by the disturbed `B`:
/// `𝒜 = U†(𝟙 ⊗ M_A)U` and `ℬ = U†(B ⊗ 𝟙)U`.
#[derive(Debug, Clone)]
pub struct EdRealization {
    /// `U` on system ⊗ probe.
    pub interaction: CMatrix,
    /// `M_A`, read out on the probe.
    pub probe_obs: HermitianOperator,
    /// `|ξ⟩`.
    pub probe_state: Ket,
    /// `B`, measured on the system after the interaction.
    pub system_obs: HermitianOperator,
}

impl EdRealization {
    pub fn new(
        interaction: CMatrix,
        probe_obs: HermitianOperator,
        probe_state: Ket,
        system_obs: HermitianOperator,
    ) -> Result<Self> {
        let dim = system_obs.dim() * probe_obs.dim();
        if interaction.nrows() != dim || interaction.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: interaction.nrows(),
            });
        }
        if probe_state.dim() != probe_obs.dim() {
            return Err(Error::DimensionMismatch {
                expected: probe_obs.dim(),
                found: probe_state.dim(),
            });
        }
        let residual = unitarity_residual(&interaction);
        if residual > tolerances().num {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self {
            interaction,
            probe_obs,
            probe_state,
            system_obs,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_obs.dim()
    }

    pub fn probe_dim(&self) -> usize {
        self.probe_obs.dim()
    }

    pub fn approx_a(&self) -> HermitianOperator {
        let lifted = HermitianOperator::identity(self.system_dim()).tensor(&self.probe_obs);
        lifted.conjugate_by(&self.interaction).expect("dimensions checked")
    }

    pub fn approx_b(&self) -> HermitianOperator {
        let lifted = self.system_obs.tensor(&HermitianOperator::identity(self.probe_dim()));
        lifted.conjugate_by(&self.interaction).expect("dimensions checked")
    }

    pub fn joint_state(&self, state: &Ket) -> Ket {
        state.tensor(&self.probe_state)
    }

    /// `(ε_𝒜, η_ℬ)` for the ideal pair `(a, system_obs)`.
    pub fn errors(&self, a: &HermitianOperator, state: &Ket) -> Result<(f64, f64)> {
        let joint = self.joint_state(state);
        Ok((
            rms_error(&self.approx_a(), a, &joint)?,
            rms_error(&self.approx_b(), &self.system_obs, &joint)?,
        ))
    }
}

/// Equatorial qubit realization: probe `|ξ⟩ = |m₊⟩`, a CNOT in the `m̂`
/// eigenbasis, then `U_R = exp(−i(φ_b − ϕ)σ_z/2)` on the system.
/// Gives `ε = 2 sin((ϕ−φ_a)/2)` and `η = 2 sin((φ_b−ϕ)/2)` with `𝒜² = ℬ² = 𝟙`.
pub fn qubit_ed_saturating(pair: &QubitPair, varphi: f64) -> Result<(EdRealization, (f64, f64))> {
    let tau = tolerances().num;
    let half_pi = std::f64::consts::FRAC_PI_2;
    if (pair.theta_a - half_pi).abs() > tau || (pair.theta_b - half_pi).abs() > tau {
        return Err(Error::Regime(format!(
            "Bloch vectors must lie on the equator (θ_a = {}, θ_b = {})",
            pair.theta_a, pair.theta_b
        )));
    }
    let basis = qubit_axis_basis(half_pi, varphi);
    let probe_obs = HermitianOperator::spectral(basis.matrix(), &[1.0, -1.0])?;
    let probe_state = basis.kets().remove(0);
    let copy = basis_copy_unitary(&basis);
    let gamma = (pair.phi_b - varphi) / 2.0;
    let mut rot = CMatrix::zeros(2, 2);
    rot[(0, 0)] = Complex64::from_polar(1.0, -gamma);
    rot[(1, 1)] = Complex64::from_polar(1.0, gamma);
    let u = kron(&rot, &CMatrix::identity(2, 2)) * copy;
    let real = EdRealization::new(u, probe_obs, probe_state, pair.b())?;
    let predicted = (
        2.0 * ((varphi - pair.phi_a) / 2.0).sin().abs(),
        2.0 * ((pair.phi_b - varphi) / 2.0).sin().abs(),
    );
    Ok((real, predicted))
}

/// `U_copy |m_i⟩|m_j⟩ = |m_i⟩|m_{i+j mod d}⟩`, written in the computational
/// product basis. With the probe in `|m_0⟩` it copies the basis label.
pub fn basis_copy_unitary(basis: &Basis) -> CMatrix {
    let d = basis.dim();
    let m = basis.matrix();
    let mut u = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        let mi = m.column(i).into_owned();
        let proj = &mi * mi.adjoint();
        // Cyclic shift by i in the m-basis.
        let mut shift = CMatrix::zeros(d, d);
        for j in 0..d {
            let target = m.column((i + j) % d);
            let source = m.column(j);
            shift += target * source.adjoint();
        }
        u += kron(&proj, &shift);
    }
    u
}

/// Error-disturbance realization of a system-space strategy whose
/// `g`-outputs are a rearrangement of the spectrum of `b`.
///
/// The probe is a copy of the system space prepared in `|m_0⟩`; `U_R` sends
/// `|m⟩` to an eigenvector of `b` with eigenvalue `g(m)`, so that
/// `U_R† b U_R = Σ g(m)|m⟩⟨m|`.
pub fn ed_realize(strategy: &ApproxJointMeasurement, b: &HermitianOperator) -> Result<EdRealization> {
    let d = strategy.dim();
    if b.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.dim(),
        });
    }
    if strategy.basis.len() != d {
        return Err(Error::Unsupported(
            "ed_realize needs a strategy on the system space".into(),
        ));
    }
    let tau = tolerances().num;
    let (vals, vecs) = b.eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| strategy.g_out[x].total_cmp(&strategy.g_out[y]));
    // Ascending eigenvalues pair off with ascending outputs.
    let mut rot = CMatrix::zeros(d, d);
    for (rank, &m) in order.iter().enumerate() {
        if (strategy.g_out[m] - vals[rank]).abs() > tau {
            return Err(Error::Unsatisfiable(format!(
                "outputs of ℬ do not match the spectrum of B ({} vs {})",
                strategy.g_out[m], vals[rank]
            )));
        }
        rot += vecs.column(rank) * strategy.basis.matrix().column(m).adjoint();
    }
    let copy = basis_copy_unitary(&strategy.basis);
    let u = kron(&rot, &CMatrix::identity(d, d)) * copy;
    let probe_obs = HermitianOperator::spectral(strategy.basis.matrix(), &strategy.f_out)?;
    let probe_state = strategy.basis.kets().remove(0);
    EdRealization::new(u, probe_obs, probe_state, b.clone())
}

/// Reassigns `g` on outcomes that carry no weight (`⟨m|ψ⟩ = ⟨m|B|ψ⟩ = 0`)
/// so that the outputs become a rearrangement of the spectrum of `b`. The
/// error of `ℬ` is unchanged, and [`ed_realize`] then applies.
pub fn match_spectrum(
    strategy: &ApproxJointMeasurement,
    b: &HermitianOperator,
    psi: &Ket,
) -> Result<ApproxJointMeasurement> {
    let d = strategy.dim();
    if b.dim() != d || psi.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.dim(),
        });
    }
    let tau = tolerances().num;
    let amp = strategy.basis.coefficients(psi.amplitudes());
    let b_amp = strategy.basis.coefficients(&b.apply(psi.amplitudes()));
    let free: Vec<usize> = (0..d)
        .filter(|&m| amp[m].norm() <= tau && b_amp[m].norm() <= tau)
        .collect();
    let mut remaining = b.eigenvalues();
    for m in (0..d).filter(|m| !free.contains(m)) {
        let g = strategy.g_out[m];
        let pos = remaining
            .iter()
            .position(|&v| (v - g).abs() <= tau)
            .ok_or_else(|| Error::Unsatisfiable(format!("output {g} is not an available eigenvalue of B")))?;
        remaining.remove(pos);
    }
    let mut g_out = strategy.g_out.clone();
    for (m, v) in free.into_iter().zip(remaining) {
        g_out[m] = v;
    }
    ApproxJointMeasurement::new(strategy.basis.clone(), strategy.f_out.clone(), g_out)
}

fn normalize(v: &CVector) -> Result<CVector> {
    let n = v.norm();
    if n <= tolerances().deg {
        return Err(Error::Degenerate {
            what: "construction vector norm",
            value: n,
        });
    }
    Ok(v / Complex64::from(n))
}

fn orthogonality_residual(vs: &[CVector]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            worst = worst.max(inner(&vs[i], &vs[j]).norm());
        }
    }
    worst
}

fn basis_on_span(unnormalized: &[CVector], dim: usize) -> Result<Basis> {
    let units = unnormalized.iter().map(normalize).collect::<Result<Vec<_>>>()?;
    let residual = orthogonality_residual(&units);
    if residual > tolerances().num {
        return Err(Error::ConstructionResidual {
            what: "orthogonality of constructed eigenvectors",
            residual,
        });
    }
    complete_basis(&units, dim)
}

/// `A₀|ψ⟩`, `B₀|ψ⟩` and `⟨A₀B₀⟩`.
struct Normalized {
    stats: StateStatistics,
    a0_psi: CVector,
    b0_psi: CVector,
    corr: Complex64,
}

fn normalized_pair(a: &HermitianOperator, b: &HermitianOperator, psi: &Ket) -> Result<Normalized> {
    let stats = StateStatistics::compute(a, b, psi)?;
    let corr = stats.corr_a0b0.ok_or(Error::Degenerate {
        what: "standard deviation",
        value: stats.delta_a.min(stats.delta_b),
    })?;
    let a0 = normalized_observable(a, psi)?;
    let b0 = normalized_observable(b, psi)?;
    Ok(Normalized {
        stats,
        a0_psi: a0.apply(psi.amplitudes()),
        b0_psi: b0.apply(psi.amplitudes()),
        corr,
    })
}

/// Angles `(φ, φ_a, φ_b)` with `φ = arg⟨A₀B₀⟩`, `φ_a = −φ/2`, `φ_b = φ/2`.
pub fn unit_correlation_angles(corr: Complex64) -> (f64, f64, f64) {
    let phi = corr.arg();
    (phi, -phi / 2.0, phi / 2.0)
}

fn corr1_basis(n: &Normalized, psi: &Ket, q: f64, varphi: f64) -> Result<Basis> {
    let (_, phi_a, phi_b) = unit_correlation_angles(n.corr);
    let p = psi.amplitudes();
    let m1 = p + &n.a0_psi * Complex64::from_polar(q, varphi - phi_a);
    let m2 = p - &n.b0_psi * Complex64::from_polar(1.0 / q, -(phi_b - varphi));
    basis_on_span(&[m1, m2], psi.dim())
}

fn check_unit_correlation(corr: Complex64) -> Result<()> {
    let gap = (corr.norm() - 1.0).abs();
    if gap > tolerances().num {
        return Err(Error::Regime(format!("|⟨A₀B₀⟩| = {} is not 1", corr.norm())));
    }
    Ok(())
}

/// Saturating strategy when `|⟨A₀B₀⟩| = 1`, with eigenvectors from
/// `(𝟙 + q e^{i(ϕ−φ_a)}A₀)|ψ⟩` and `(𝟙 − q⁻¹e^{−i(φ_b−ϕ)}B₀)|ψ⟩`
/// and optimal outputs. The errors `ΔA|sin(ϕ−φ_a)|`, `ΔB|sin(φ_b−ϕ)|` do not
/// depend on `q`.
pub fn general_saturating_corr1(
    a: &HermitianOperator,
    b: &HermitianOperator,
    psi: &Ket,
    q: f64,
    varphi: f64,
) -> Result<Construction> {
    if q == 0.0 || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("q = {q} must be finite and nonzero")));
    }
    let n = normalized_pair(a, b, psi)?;
    check_unit_correlation(n.corr)?;
    let basis = corr1_basis(&n, psi, q, varphi)?;
    let measurement = ApproxJointMeasurement::with_optimal_outputs(basis, a, b, psi)?;
    let (phi, phi_a, phi_b) = unit_correlation_angles(n.corr);
    let (sa, sb) = ((varphi - phi_a).sin(), (phi_b - varphi).sin());
    Ok(Construction {
        measurement,
        predicted: (n.stats.delta_a * sa.abs(), n.stats.delta_b * sb.abs()),
        saturating: phi.cos() * sa * sb >= -tolerances().num,
    })
}

/// Nuisance parameters of the `|⟨A₀B₀⟩| < 1` construction. `s·t` must equal
/// `⟨m̄₁|m̄₁⟩/(1 − |⟨A₀B₀⟩|²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

/// Angles `(φ', φ_a', φ_b')` with `φ' = arcsin Im⟨A₀B₀⟩`.
pub fn commutator_angles(corr: Complex64) -> (f64, f64, f64) {
    let phi = corr.im.clamp(-1.0, 1.0).asin();
    (phi, -phi / 2.0, phi / 2.0)
}

fn lt1_first_vector(n: &Normalized, psi: &Ket, q: f64, r: f64, varphi: f64) -> CVector {
    let (_, phi_a, phi_b) = commutator_angles(n.corr);
    let alpha = Complex64::new(q * (varphi - phi_a).cos(), r * (varphi - phi_a).sin());
    let beta = Complex64::new(r * (phi_b - varphi).cos(), -q * (phi_b - varphi).sin());
    psi.amplitudes() + &n.a0_psi * beta + &n.b0_psi * alpha
}

/// `⟨m̄₁|m̄₁⟩/(1 − |⟨A₀B₀⟩|²)`, the required value of `s·t`.
pub fn lt1_scale_product(
    a: &HermitianOperator,
    b: &HermitianOperator,
    psi: &Ket,
    q: f64,
    r: f64,
    varphi: f64,
) -> Result<f64> {
    let n = normalized_pair(a, b, psi)?;
    let m1 = lt1_first_vector(&n, psi, q, r, varphi);
    Ok(m1.norm_squared() / (1.0 - n.corr.norm_sqr()))
}

impl ShapeParams {
    /// `s = t = √(⟨m̄₁|m̄₁⟩/(1 − |⟨A₀B₀⟩|²))` for the given `q`, `r`.
    pub fn balanced(
        a: &HermitianOperator,
        b: &HermitianOperator,
        psi: &Ket,
        q: f64,
        r: f64,
        varphi: f64,
    ) -> Result<Self> {
        let st = lt1_scale_product(a, b, psi, q, r, varphi)?;
        Ok(Self {
            q,
            r,
            s: st.sqrt(),
            t: st.sqrt(),
        })
    }

    /// Fixes `s` and solves the constraint for `t`.
    pub fn with_s(
        a: &HermitianOperator,
        b: &HermitianOperator,
        psi: &Ket,
        q: f64,
        r: f64,
        s: f64,
        varphi: f64,
    ) -> Result<Self> {
        if s == 0.0 {
            return Err(Error::InvalidParameter("s must be nonzero".into()));
        }
        let st = lt1_scale_product(a, b, psi, q, r, varphi)?;
        Ok(Self { q, r, s, t: st / s })
    }
}

/// Saturating strategy when `|⟨A₀B₀⟩| < 1`, built from three orthogonal
/// vectors in `span{ψ, A₀ψ, B₀ψ}`. Needs dimension ≥ 3. The errors
/// `ΔA|sin(ϕ−φ_a')|`, `ΔB|sin(φ_b'−ϕ)|` do not depend on `(q, r, s, t)`.
pub fn general_saturating_corr_lt1(
    a: &HermitianOperator,
    b: &HermitianOperator,
    psi: &Ket,
    params: ShapeParams,
    varphi: f64,
) -> Result<Construction> {
    if psi.dim() < 3 {
        return Err(Error::DimensionTooSmall { dim: psi.dim(), min: 3 });
    }
    let tau = tolerances().num;
    let n = normalized_pair(a, b, psi)?;
    let gap = 1.0 - n.corr.norm_sqr();
    if gap <= tau {
        return Err(Error::Regime(format!("|⟨A₀B₀⟩| = {} is not below 1", n.corr.norm())));
    }
    let ShapeParams { q, r, s, t } = params;
    let m1 = lt1_first_vector(&n, psi, q, r, varphi);
    let n1 = m1.norm_squared();
    let required = n1 / gap;
    if (s * t - required).abs() > tau * required.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "s·t = {} but the construction needs {required}",
            s * t
        )));
    }
    let p = psi.amplitudes();
    let d_psi = &n.a0_psi * inner(&m1, &n.b0_psi) - &n.b0_psi * inner(&m1, &n.a0_psi);
    let base = p * Complex64::from(n1) - &m1;
    let m2 = &base + &d_psi * Complex64::from(s);
    let m3 = &base - &d_psi * Complex64::from(t);
    let basis = basis_on_span(&[m1, m2, m3], psi.dim())?;
    let measurement = ApproxJointMeasurement::with_optimal_outputs(basis, a, b, psi)?;
    let (phi, phi_a, phi_b) = commutator_angles(n.corr);
    let half = phi.abs() / 2.0;
    Ok(Construction {
        measurement,
        predicted: (
            n.stats.delta_a * (varphi - phi_a).sin().abs(),
            n.stats.delta_b * (phi_b - varphi).sin().abs(),
        ),
        saturating: (-half - tau..=half + tau).contains(&varphi),
    })
}

/// Strategy with `±1` outputs for dichotomic `A`, `B` (`A² = B² = 𝟙`,
/// `⟨A⟩ = ⟨B⟩ = 0`, `|⟨AB⟩| = 1`), on the basis of
/// [`general_saturating_corr1`] with `q = ±1`. Flipping the sign of an output
/// function sends `ε` to `√(4 − ε²)`.
pub fn dichotomic_saturating(
    a: &HermitianOperator,
    b: &HermitianOperator,
    psi: &Ket,
    q: f64,
    varphi: f64,
    flip_signs: (bool, bool),
) -> Result<Construction> {
    let tau = tolerances().num;
    if (q.abs() - 1.0).abs() > tau {
        return Err(Error::InvalidParameter(format!("q = {q} must be ±1")));
    }
    for (name, op) in [("A", a), ("B", b)] {
        let residual = op.involution_residual();
        if residual > tau {
            return Err(Error::NotInvolutory { residual });
        }
        let mean = expectation(op, psi)?;
        if mean.abs() > tau {
            return Err(Error::Regime(format!("⟨{name}⟩ = {mean} is not 0")));
        }
    }
    let n = normalized_pair(a, b, psi)?;
    check_unit_correlation(n.corr)?;
    let basis = corr1_basis(&n, psi, q, varphi)?;
    let sign = |flip: bool| if flip { -1.0 } else { 1.0 };
    let f: Vec<f64> = dichotomic_outputs(&basis, a, psi)?
        .into_iter()
        .map(|v| v * sign(flip_signs.0))
        .collect();
    let g: Vec<f64> = dichotomic_outputs(&basis, b, psi)?
        .into_iter()
        .map(|v| v * sign(flip_signs.1))
        .collect();
    let (_, phi_a, phi_b) = unit_correlation_angles(n.corr);
    let err = |angle: f64, flip: bool| {
        let c = angle.cos().abs();
        if flip {
            (2.0 + 2.0 * c).sqrt()
        } else {
            (2.0 - 2.0 * c).max(0.0).sqrt()
        }
    };
    let predicted = (err(varphi - phi_a, flip_signs.0), err(phi_b - varphi, flip_signs.1));
    let saturating = (varphi - phi_a).cos() >= -tau && (phi_b - varphi).cos() >= -tau;
    Ok(Construction {
        measurement: ApproxJointMeasurement::new(basis, f, g)?,
        predicted,
        saturating,
    })
}

/// Zero-error strategy when one standard deviation vanishes: `𝒜 = ⟨A⟩`,
/// `ℬ = B` if `ΔA = 0`, otherwise `𝒜 = A`, `ℬ = ⟨B⟩`.
pub fn degenerate_strategy(a: &HermitianOperator, b: &HermitianOperator, psi: &Ket) -> Result<ApproxJointMeasurement> {
    let stats = StateStatistics::compute(a, b, psi)?;
    let deg = tolerances().deg;
    if stats.delta_a <= deg {
        let (vals, vecs) = b.eigen();
        let basis = Basis::from_unitary(vecs)?;
        ApproxJointMeasurement::new(basis, vec![stats.mean_a; vals.len()], vals)
    } else if stats.delta_b <= deg {
        let (vals, vecs) = a.eigen();
        let basis = Basis::from_unitary(vecs)?;
        ApproxJointMeasurement::new(basis, vals.clone(), vec![stats.mean_b; vals.len()])
    } else {
        Err(Error::Regime(format!(
            "neither standard deviation vanishes (ΔA = {}, ΔB = {})",
            stats.delta_a, stats.delta_b
        )))
    }
}

/// Classical mixture of two strategies on the same joint space, realized
/// with a two-level coin ancilla in `√λ|0⟩ + √(1−λ)|1⟩`. The squared errors
/// mix linearly: `ε² = λε₁² + (1−λ)ε₂²`.
#[derive(Debug, Clone)]
pub struct MixedStrategy {
    pub measurement: ApproxJointMeasurement,
    pub coin: Ket,
}

impl MixedStrategy {
    pub fn new(first: &ApproxJointMeasurement, second: &ApproxJointMeasurement, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter(format!("weight {weight} outside [0, 1]")));
        }
        if first.dim() != second.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: second.dim(),
            });
        }
        let d = first.dim();
        let mut u = CMatrix::zeros(2 * d, 2 * d);
        for (coin, strat) in [first, second].into_iter().enumerate() {
            for j in 0..d {
                let v = strat.basis.vector(j);
                for i in 0..d {
                    u[(2 * i + coin, coin * d + j)] = v[i];
                }
            }
        }
        let basis = Basis::from_unitary(u)?;
        let f = first.f_out.iter().chain(&second.f_out).copied().collect();
        let g = first.g_out.iter().chain(&second.g_out).copied().collect();
        let coin = Ket::from_slice(&[Complex64::from(weight.sqrt()), Complex64::from((1.0 - weight).sqrt())])?;
        Ok(Self {
            measurement: ApproxJointMeasurement::new(basis, f, g)?,
            coin,
        })
    }

    /// `|ψ,ξ⟩ ⊗ |coin⟩`.
    pub fn joint_state(&self, component_state: &Ket) -> Ket {
        component_state.tensor(&self.coin)
    }
}
