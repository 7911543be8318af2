//! Real Euclidean vector inequalities behind the error-trade-off bounds, and
//! the embedding of complex kets into real space that connects them.
//!
//! With `â = (Re a, Im a)` and `b̂ = (Im b, −Re b)`, the real dot product
//! `â·b̂` equals `Im⟨a|b⟩`, so commutator expectations become angles.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::tol::tolerances;

pub type RealVec = DVector<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Embedding {
    /// `(Re v, Im v)`.
    AType,
    /// `(Im v, −Re v)`.
    BType,
}

pub fn embed(v: &CVector, convention: Embedding) -> RealVec {
    let n = v.len();
    RealVec::from_fn(2 * n, |i, _| {
        let z = v[i % n];
        match (convention, i < n) {
            (Embedding::AType, true) => z.re,
            (Embedding::AType, false) => z.im,
            (Embedding::BType, true) => z.im,
            (Embedding::BType, false) => -z.re,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    /// Distances from unit `â`, `b̂` to orthogonal `x⃗`, `y⃗`.
    Distances,
    /// Perpendicular components of `â`, `b̂` with respect to orthogonal unit
    /// `x̂`, `ŷ`.
    Perpendicular,
    /// Distance for `â`, perpendicular component for `b̂`.
    Mixed,
}

impl LemmaId {
    pub const ALL: [LemmaId; 3] = [LemmaId::Distances, LemmaId::Perpendicular, LemmaId::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Distances => "distances",
            LemmaId::Perpendicular => "perpendicular",
            LemmaId::Mixed => "mixed",
        }
    }
}

impl std::str::FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "distances" => Ok(LemmaId::Distances),
            "perpendicular" => Ok(LemmaId::Perpendicular),
            "mixed" => Ok(LemmaId::Mixed),
            other => Err(Error::InvalidParameter(format!("unknown lemma `{other}`"))),
        }
    }
}

/// Four vectors in `ℝⁿ`: unit `â`, `b̂` and a pair `x⃗`, `y⃗` whose meaning
/// depends on the inequality (arbitrary, unit, or one of each).
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaInstance {
    pub a_hat: RealVec,
    pub b_hat: RealVec,
    pub x_vec: RealVec,
    pub y_vec: RealVec,
}

impl LemmaInstance {
    /// Checks that `â` and `b̂` are unit vectors of a common dimension.
    pub fn new(a_hat: RealVec, b_hat: RealVec, x_vec: RealVec, y_vec: RealVec) -> Result<Self> {
        let n = a_hat.len();
        for v in [&b_hat, &x_vec, &y_vec] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let tau = tolerances().num;
        for v in [&a_hat, &b_hat] {
            let norm = v.norm();
            if (norm - 1.0).abs() > tau {
                return Err(Error::NotNormalized { norm });
            }
        }
        Ok(Self {
            a_hat,
            b_hat,
            x_vec,
            y_vec,
        })
    }

    pub fn dim(&self) -> usize {
        self.a_hat.len()
    }

    /// `χ = â·b̂`, clamped to `[−1, 1]`.
    pub fn chi(&self) -> f64 {
        self.a_hat.dot(&self.b_hat).clamp(-1.0, 1.0)
    }

    /// `√(1 − (â·x̂)²)` with `x̂ = x⃗/‖x⃗‖`; 1 when `x⃗ = 0`.
    pub fn a_perp(&self) -> f64 {
        perp(&self.a_hat, &self.x_vec)
    }

    /// `√(1 − (b̂·ŷ)²)` with `ŷ = y⃗/‖y⃗‖`; 1 when `y⃗ = 0`.
    pub fn b_perp(&self) -> f64 {
        perp(&self.b_hat, &self.y_vec)
    }

    pub fn dist_a(&self) -> f64 {
        (&self.a_hat - &self.x_vec).norm()
    }

    pub fn dist_b(&self) -> f64 {
        (&self.b_hat - &self.y_vec).norm()
    }

    fn check_orthogonal(&self) -> Result<()> {
        let dot = self.x_vec.dot(&self.y_vec);
        if dot.abs() > tolerances().num {
            return Err(Error::InvalidParameter(format!("x·y = {dot:e} is not zero")));
        }
        Ok(())
    }

    fn check_unit(which: &str, v: &RealVec) -> Result<()> {
        let norm = v.norm();
        if (norm - 1.0).abs() > tolerances().num {
            return Err(Error::InvalidParameter(format!("‖{which}‖ = {norm} is not 1")));
        }
        Ok(())
    }
}

fn perp(unit: &RealVec, dir: &RealVec) -> f64 {
    let n = dir.norm();
    if n == 0.0 {
        return 1.0;
    }
    let c = (unit.dot(dir) / n).clamp(-1.0, 1.0);
    (1.0 - c * c).max(0.0).sqrt()
}

fn two_term_slack(p: f64, q: f64, chi: f64) -> f64 {
    p * p + q * q + 2.0 * (1.0 - chi * chi).max(0.0).sqrt() * p * q - chi * chi
}

/// `‖â−x⃗‖² + ‖b̂−y⃗‖² + 2√(1−χ²)‖â−x⃗‖‖b̂−y⃗‖ − χ²` for orthogonal `x⃗`, `y⃗`.
pub fn distance_slack(inst: &LemmaInstance) -> Result<f64> {
    inst.check_orthogonal()?;
    Ok(two_term_slack(inst.dist_a(), inst.dist_b(), inst.chi()))
}

/// `a⊥² + b⊥² + 2√(1−χ²) a⊥ b⊥ − χ²` for orthonormal `x̂`, `ŷ`.
pub fn perpendicular_slack(inst: &LemmaInstance) -> Result<f64> {
    LemmaInstance::check_unit("x", &inst.x_vec)?;
    LemmaInstance::check_unit("y", &inst.y_vec)?;
    inst.check_orthogonal()?;
    Ok(two_term_slack(inst.a_perp(), inst.b_perp(), inst.chi()))
}

/// `‖â−x⃗‖² + b⊥² + 2√(1−χ²)‖â−x⃗‖ b⊥ − χ²` for unit `ŷ` orthogonal to `x⃗`.
pub fn mixed_slack(inst: &LemmaInstance) -> Result<f64> {
    LemmaInstance::check_unit("y", &inst.y_vec)?;
    inst.check_orthogonal()?;
    Ok(two_term_slack(inst.dist_a(), inst.b_perp(), inst.chi()))
}

pub fn lemma_slack(inst: &LemmaInstance, lemma: LemmaId) -> Result<f64> {
    match lemma {
        LemmaId::Distances => distance_slack(inst),
        LemmaId::Perpendicular => perpendicular_slack(inst),
        LemmaId::Mixed => mixed_slack(inst),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationDiagnosis {
    /// Numerical rank of `[â b̂ x⃗ y⃗]` at cutoff `τ_rank`.
    pub rank: usize,
    pub coplanar: bool,
    /// Whether `x⃗` is the orthogonal projection of `â` onto its own
    /// direction. `None` for the perpendicular-component inequality, where
    /// `x̂` is a unit vector by hypothesis.
    pub projection: Option<bool>,
}

/// Tests the necessary conditions for equality: coplanarity of the four
/// vectors and, where distances enter, `x⃗ = (â·x̂)x̂`.
pub fn saturation_witness(inst: &LemmaInstance, lemma: LemmaId) -> SaturationDiagnosis {
    let t = tolerances();
    let n = inst.dim();
    let m = nalgebra::DMatrix::from_columns(&[
        inst.a_hat.clone(),
        inst.b_hat.clone(),
        inst.x_vec.clone(),
        inst.y_vec.clone(),
    ]);
    let rank = if n == 0 {
        0
    } else {
        m.singular_values().iter().filter(|&&s| s > t.rank).count()
    };
    let projection = match lemma {
        LemmaId::Perpendicular => None,
        LemmaId::Distances | LemmaId::Mixed => {
            let nx = inst.x_vec.norm();
            if nx == 0.0 {
                Some(true)
            } else {
                let dir = &inst.x_vec / nx;
                let proj = &dir * inst.a_hat.dot(&dir);
                // The slack is quadratic in the offset, so compare against √τ_sat.
                Some((proj - &inst.x_vec).norm() <= t.sat.sqrt())
            }
        }
    };
    SaturationDiagnosis {
        rank,
        coplanar: rank <= 2,
        projection,
    }
}

fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RealVec {
    RealVec::from_fn(n, |_, _| StandardNormal.sample(rng))
}

fn unit_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RealVec {
    loop {
        let v = gaussian_vec(rng, n);
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

fn unit_orthogonal_to<R: Rng + ?Sized>(rng: &mut R, v: &RealVec) -> RealVec {
    let vn = v.normalize();
    loop {
        let g = gaussian_vec(rng, v.len());
        let w = &g - &vn * vn.dot(&g);
        let norm = w.norm();
        if norm > 1e-6 {
            return w / norm;
        }
    }
}

/// Random orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> nalgebra::DMatrix<f64> {
    let g = nalgebra::DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col *= -1.0;
        }
    }
    q
}

/// Random instance satisfying the hypotheses of `lemma` in `ℝⁿ`.
///
/// Lengths of `x⃗`, `y⃗` (where free) are drawn from `[0, 1.5]` so that
/// both near and far configurations are sampled.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, lemma: LemmaId) -> LemmaInstance {
    let a = unit_vec(rng, n);
    let b = unit_vec(rng, n);
    let x_dir = unit_vec(rng, n);
    let y_dir = unit_orthogonal_to(rng, &x_dir);
    let (x, y) = match lemma {
        LemmaId::Distances => (x_dir * rng.random_range(0.0..1.5), y_dir * rng.random_range(0.0..1.5)),
        LemmaId::Perpendicular => (x_dir, y_dir),
        LemmaId::Mixed => (x_dir * rng.random_range(0.0..1.5), y_dir),
    };
    LemmaInstance {
        a_hat: a,
        b_hat: b,
        x_vec: x,
        y_vec: y,
    }
}

/// Planar configuration on the equality curve, rotated randomly into `ℝⁿ`.
///
/// In the plane, `â = (cos α, sin α)`, `b̂ = (sin β, −cos β)`,
/// `x̂ = (cos γ, sin γ)`, `ŷ = (sin γ, −cos γ)` with `α ≤ γ ≤ β`; `x⃗`, `y⃗`
/// are the projections of `â`, `b̂` where the inequality uses distances.
pub fn planted_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, lemma: LemmaId) -> LemmaInstance {
    let spread = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    let alpha = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let beta = alpha + spread;
    let gamma = rng.random_range(alpha..=beta);
    planted_with_angles(rng, n, lemma, alpha, beta, gamma)
}

pub fn planted_with_angles<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    lemma: LemmaId,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> LemmaInstance {
    assert!(n >= 2, "a planar configuration needs n ≥ 2");
    let plane = |u: f64, v: f64| {
        let mut out = RealVec::zeros(n);
        out[0] = u;
        out[1] = v;
        out
    };
    let a = plane(alpha.cos(), alpha.sin());
    let b = plane(beta.sin(), -beta.cos());
    let x_hat = plane(gamma.cos(), gamma.sin());
    let y_hat = plane(gamma.sin(), -gamma.cos());
    let x_proj = &x_hat * a.dot(&x_hat);
    let y_proj = &y_hat * b.dot(&y_hat);
    let (x, y) = match lemma {
        LemmaId::Distances => (x_proj, y_proj),
        LemmaId::Perpendicular => (x_hat, y_hat),
        LemmaId::Mixed => (x_proj, y_hat),
    };
    let rot = random_rotation(rng, n);
    LemmaInstance {
        a_hat: &rot * a,
        b_hat: &rot * b,
        x_vec: &rot * x,
        y_vec: &rot * y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, ONE};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rv(v: &[f64]) -> RealVec {
        RealVec::from_column_slice(v)
    }

    #[test]
    fn embedding_of_basis_vector() {
        let e0 = CVector::from_column_slice(&[ONE, Complex64::new(0.0, 0.0)]);
        assert_eq!(embed(&e0, Embedding::AType), rv(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(embed(&e0, Embedding::BType), rv(&[0.0, 0.0, -1.0, 0.0]));
    }

    #[test]
    fn embedding_dot_is_imaginary_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..6 {
            let a = crate::random::gaussian_vector(&mut rng, n);
            let b = crate::random::gaussian_vector(&mut rng, n);
            let dot = embed(&a, Embedding::AType).dot(&embed(&b, Embedding::BType));
            assert!((dot - inner(&a, &b).im).abs() < 1e-12);
            assert!((embed(&a, Embedding::BType).norm() - a.norm()).abs() < 1e-12);
            let same = embed(&a, Embedding::AType).dot(&embed(&b, Embedding::AType));
            assert!((same - inner(&a, &b).re).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_equalities() {
        let a = rv(&[1.0, 0.0, 0.0]);
        let b = rv(&[0.0, 1.0, 0.0]);
        let inst = LemmaInstance::new(a.clone(), b.clone(), a.clone(), b.clone()).unwrap();
        assert_eq!(distance_slack(&inst).unwrap(), 0.0);
        assert_eq!(perpendicular_slack(&inst).unwrap(), 0.0);
        assert_eq!(mixed_slack(&inst).unwrap(), 0.0);
        let d = saturation_witness(&inst, LemmaId::Distances);
        assert!(d.coplanar && d.projection == Some(true));
    }

    #[test]
    fn planted_instances_saturate() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for lemma in LemmaId::ALL {
            for n in 2..9 {
                let inst = planted_instance(&mut rng, n, lemma);
                let s = lemma_slack(&inst, lemma).unwrap();
                assert!(s.abs() < 1e-12, "{lemma:?} n={n} slack={s}");
                let d = saturation_witness(&inst, lemma);
                assert!(d.coplanar);
                assert_ne!(d.projection, Some(false));
            }
        }
    }

    #[test]
    fn planted_distances_match_sines() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (alpha, beta, gamma) = (0.2, 1.3, 0.6);
        let inst = planted_with_angles(&mut rng, 5, LemmaId::Distances, alpha, beta, gamma);
        assert!((inst.chi() - (beta - alpha).sin()).abs() < 1e-12);
        assert!((inst.dist_a() - (gamma - alpha).sin()).abs() < 1e-12);
        assert!((inst.dist_b() - (beta - gamma).sin()).abs() < 1e-12);
        let unit = planted_with_angles(&mut rng, 5, LemmaId::Perpendicular, alpha, beta, gamma);
        let gap = (&unit.a_hat - &unit.x_vec).norm();
        assert!((gap - 2.0 * ((gamma - alpha) / 2.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn preconditions_are_enforced() {
        let a = rv(&[1.0, 0.0]);
        let b = rv(&[0.0, 1.0]);
        let inst = LemmaInstance::new(a.clone(), b.clone(), a.clone(), a.clone()).unwrap();
        assert!(distance_slack(&inst).is_err());
        let short = LemmaInstance::new(a.clone(), b.clone(), a.clone() * 0.5, b.clone()).unwrap();
        assert!(perpendicular_slack(&short).is_err());
        assert!(mixed_slack(&short).is_ok());
        assert!(LemmaInstance::new(a * 2.0, b.clone(), b.clone(), b).is_err());
    }

    #[test]
    fn random_instances_are_valid_and_not_coplanar() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for lemma in LemmaId::ALL {
            let inst = random_instance(&mut rng, 6, lemma);
            assert!(lemma_slack(&inst, lemma).unwrap() >= -1e-12);
            assert!(!saturation_witness(&inst, lemma).coplanar);
        }
    }
}
