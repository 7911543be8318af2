//! Seeded random instances: Haar states and unitaries, Gaussian Hermitian
//! operators, POVMs, and structured observables for the dichotomic regime.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::joint::Povm;
use crate::linalg::{complete_basis, inner, Basis, CMatrix, CVector, HermitianOperator, Ket};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| gaussian(rng))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn haar_ket<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Ket {
    loop {
        if let Ok(k) = Ket::normalized(gaussian_vector(rng, dim)) {
            return k;
        }
    }
}

/// `(G + G†)/2` with complex Gaussian `G`.
pub fn gaussian_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let g = gaussian_matrix(rng, dim, dim);
    HermitianOperator::hermitian_part(g)
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = gaussian_matrix(rng, dim, dim).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_basis<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Basis {
    Basis::from_unitary(haar_unitary(rng, dim)).expect("QR factor is unitary")
}

/// `exp(i·δ·H)` for a Gaussian Hermitian `H` normalized to unit spectral
/// scale; a unitary within roughly `δ` of the identity.
pub fn near_identity_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize, delta: f64) -> CMatrix {
    let h = gaussian_hermitian(rng, dim);
    let (vals, vecs) = h.eigen();
    let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut out = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, delta * v / scale);
        for i in 0..dim {
            out[(i, j)] *= phase;
        }
    }
    out * vecs.adjoint()
}

/// Random POVM with `n_outcomes` elements on `ℂ^dim`.
///
/// Draws positive `G_m = X_m X_m†` (rank `rank ≤ dim`) and whitens by
/// `S^{-1/2}` with `S = Σ G_m`, so the elements sum to the identity.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_outcomes: usize, rank: usize) -> Result<Povm> {
    // Σ G_m must be invertible, so the total rank has to reach `dim`.
    let rank = rank.clamp(1, dim).max(dim.div_ceil(n_outcomes.max(1)));
    let raw: Vec<CMatrix> = (0..n_outcomes)
        .map(|_| {
            let x = gaussian_matrix(rng, dim, rank);
            &x * x.adjoint()
        })
        .collect();
    let mut s = CMatrix::zeros(dim, dim);
    for g in &raw {
        s += g;
    }
    let (vals, vecs) = HermitianOperator::hermitian_part(s).eigen();
    let inv_sqrt: Vec<f64> = vals.iter().map(|v| 1.0 / v.sqrt()).collect();
    let w = HermitianOperator::spectral(&vecs, &inv_sqrt)?.into_matrix();
    let elements = raw
        .iter()
        .map(|g| HermitianOperator::hermitian_part(&w * g * &w))
        .collect();
    let labels = (0..n_outcomes).map(|m| m as f64).collect();
    Povm::new(elements, labels)
}

/// Random dichotomic `A` (`A² = 1`) with `⟨ψ|A|ψ⟩ = 0` and `A|ψ⟩ = |u⟩`,
/// where `u` is a unit vector orthogonal to `ψ`.
///
/// `A = |u⟩⟨ψ| + |ψ⟩⟨u| + R`, with `R` a random reflection on the
/// complement of `span{ψ, u}`.
pub fn dichotomic_swap<R: Rng + ?Sized>(rng: &mut R, psi: &Ket, u: &CVector) -> HermitianOperator {
    dichotomic_swap_with_phase(rng, psi, u, 0.0)
}

/// As [`dichotomic_swap`] but with `A|ψ⟩ = e^{iφ}|u⟩`.
pub fn dichotomic_swap_with_phase<R: Rng + ?Sized>(
    rng: &mut R,
    psi: &Ket,
    u: &CVector,
    phase: f64,
) -> HermitianOperator {
    let p = psi.amplitudes();
    let d = p.len();
    let e = Complex64::from_polar(1.0, phase);
    let mut m = u * p.adjoint() * e + p * u.adjoint() * e.conj();
    if d > 2 {
        let full = complete_basis(&[p.clone(), u.clone()], d).expect("ψ and u are orthonormal");
        let comp = full.matrix().columns(2, d - 2).into_owned();
        let rot = &comp * haar_unitary(rng, d - 2);
        for j in 0..d - 2 {
            let v = rot.column(j);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            m += v * v.adjoint() * Complex64::from(sign);
        }
    }
    HermitianOperator::hermitian_part(m)
}

/// Random unit vector orthogonal to `ψ`.
pub fn orthogonal_unit<R: Rng + ?Sized>(rng: &mut R, psi: &Ket) -> CVector {
    let p = psi.amplitudes();
    loop {
        let g = gaussian_vector(rng, p.len());
        let w = &g - p * inner(p, &g);
        let n = w.norm();
        if n > 1e-6 {
            return w / Complex64::from(n);
        }
    }
}

/// Hermitian `B` with `⟨B⟩ = mean`, `ΔB = delta` and `B₀|ψ⟩ = e^{iφ}A₀|ψ⟩`,
/// so that `⟨A₀B₀⟩ = e^{iφ}` has unit modulus.
pub fn unit_correlation_partner<R: Rng + ?Sized>(
    rng: &mut R,
    a0_psi: &CVector,
    psi: &Ket,
    mean: f64,
    delta: f64,
    phase: f64,
) -> HermitianOperator {
    let p = psi.amplitudes();
    let d = p.len();
    let e = Complex64::from_polar(delta, phase);
    let mut m = p * p.adjoint() * Complex64::from(mean) + a0_psi * p.adjoint() * e + p * a0_psi.adjoint() * e.conj();
    let perp = CMatrix::identity(d, d) - p * p.adjoint();
    let h = gaussian_hermitian(rng, d);
    m += &perp * h.matrix() * &perp;
    HermitianOperator::hermitian_part(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;
    use crate::stats::{expectation, StateStatistics};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..7 {
            assert!(unitarity_residual(&haar_unitary(&mut rng, d)) < 1e-12);
            assert!(unitarity_residual(&near_identity_unitary(&mut rng, d, 0.1)) < 1e-12);
        }
    }

    #[test]
    fn povms_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in 2..5 {
            for n in 1..7 {
                random_povm(&mut rng, d, n, 1 + n % d).unwrap();
            }
        }
    }

    #[test]
    fn dichotomic_swap_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 2..7 {
            let psi = haar_ket(&mut rng, d);
            let u = orthogonal_unit(&mut rng, &psi);
            let a = dichotomic_swap_with_phase(&mut rng, &psi, &u, 0.4);
            assert!(a.involution_residual() < 1e-10, "d={d}");
            assert!(expectation(&a, &psi).unwrap().abs() < 1e-12);
            let apsi = a.apply(psi.amplitudes());
            assert!((apsi - &u * Complex64::from_polar(1.0, 0.4)).norm() < 1e-12);
        }
    }

    #[test]
    fn unit_correlation_partner_has_unimodular_correlation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = haar_ket(&mut rng, 4);
        let a = gaussian_hermitian(&mut rng, 4);
        let a0 = crate::stats::normalized_observable(&a, &psi).unwrap();
        let a0_psi = a0.apply(psi.amplitudes());
        let b = unit_correlation_partner(&mut rng, &a0_psi, &psi, 0.3, 1.7, 0.9);
        let s = StateStatistics::compute(&a, &b, &psi).unwrap();
        let z = s.corr_a0b0.unwrap();
        assert!((z - Complex64::from_polar(1.0, 0.9)).norm() < 1e-12);
        assert!((s.delta_b - 1.7).abs() < 1e-12);
        assert!((s.mean_b - 0.3).abs() < 1e-12);
    }
}
