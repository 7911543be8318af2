//! Dense complex vectors and operators on small finite-dimensional spaces.
//!
//! Product spaces are ordered lexicographically: system index major,
//! ancilla index minor, so `|i⟩⊗|j⟩` sits at position `i * ancilla_dim + j`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::tolerances;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// `⟨u|v⟩`, conjugate-linear in the first argument.
pub fn inner(u: &CVector, v: &CVector) -> Complex64 {
    u.dotc(v)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `u†u - 1`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let g = u.adjoint() * u;
    max_abs_diff(&g, &CMatrix::identity(u.nrows(), u.ncols()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Pure state: a unit vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: CVector,
}

impl Ket {
    /// Accepts amplitudes whose Euclidean norm is 1 within `τ_norm`.
    pub fn new(amps: CVector) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionTooSmall { dim: 0, min: 1 });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > tolerances().norm {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Normalizes `v`; fails on a (numerically) zero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if norm.is_nan() || norm <= tolerances().deg {
            return Err(Error::Degenerate {
                what: "vector norm",
                value: norm,
            });
        }
        Ok(Self {
            amps: v / Complex64::from(norm),
        })
    }

    pub fn from_slice(amps: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    /// Computational basis vector `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amps = CVector::zeros(dim);
        amps[index] = ONE;
        Self { amps }
    }

    /// `|+z⟩`, the north pole of the Bloch sphere.
    pub fn plus_z() -> Self {
        Self::basis(2, 0)
    }

    pub fn plus_x() -> Self {
        let h = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            amps: CVector::from_column_slice(&[h, h]),
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    pub fn inner(&self, other: &Ket) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket {
            amps: kron_vec(&self.amps, &other.amps),
        }
    }
}

/// Hermitian matrix. Non-Hermitian input is rejected, never symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::DimensionTooSmall { dim: 0, min: 1 });
        }
        let residual = hermiticity_residual(&m);
        if residual > tolerances().herm {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self { m })
    }

    /// `(M + M†)/2`. For internal use on matrices that are Hermitian by
    /// construction up to rounding, or on purpose-built Gaussian matrices.
    pub(crate) fn hermitian_part(m: CMatrix) -> Self {
        let h = (&m + m.adjoint()) * Complex64::from(0.5);
        Self { m: h }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = CVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::from(x)));
        Self {
            m: CMatrix::from_diagonal(&d),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            m: CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            m: CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            m: CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }

    /// `n̂·σ` for a real 3-vector `n`.
    pub fn bloch(n: [f64; 3]) -> Self {
        let x = Self::pauli_x();
        let y = Self::pauli_y();
        let z = Self::pauli_z();
        Self {
            m: x.m * Complex64::from(n[0]) + y.m * Complex64::from(n[1]) + z.m * Complex64::from(n[2]),
        }
    }

    /// Rank-one projector `|v⟩⟨v|`.
    pub fn projector(v: &Ket) -> Self {
        let a = v.amplitudes();
        Self { m: a * a.adjoint() }
    }

    /// `Σ_k values[k] |basis_k⟩⟨basis_k|` for the columns of `basis`.
    pub fn spectral(basis: &CMatrix, values: &[f64]) -> Result<Self> {
        if basis.ncols() != values.len() {
            return Err(Error::LengthMismatch {
                what: "spectral values",
                expected: basis.ncols(),
                found: values.len(),
            });
        }
        let mut scaled = basis.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        Ok(Self::hermitian_part(&scaled * basis.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.m * v
    }

    /// `self + c·1`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.m.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += c;
        }
        Self { m }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            m: &self.m * Complex64::from(s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn square(&self) -> Self {
        Self::hermitian_part(&self.m * &self.m)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            m: kron(&self.m, &other.m),
        }
    }

    /// `U† self U`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ok(Self::hermitian_part(u.adjoint() * &self.m * u))
    }

    pub fn commutes_with(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        let c = commutator(&self.m, &other.m);
        Ok(c.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Eigenvalues in ascending order with matching eigenvector columns.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        let eig = SymmetricEigen::new(self.m.clone());
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vecs = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vecs.set_column(dst, &eig.eigenvectors.column(src));
        }
        (values, vecs)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }

    /// Largest entrywise modulus of `self² - 1`.
    pub fn involution_residual(&self) -> f64 {
        let sq = &self.m * &self.m;
        max_abs_diff(&sq, &CMatrix::identity(self.dim(), self.dim()))
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_state(&self, state: &Ket) -> Result<()> {
        if self.dim() != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(())
    }
}

/// Orthonormal basis stored as the columns of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    u: CMatrix,
}

impl Basis {
    /// Checks `U†U = 1` within `τ_num`.
    pub fn from_unitary(u: CMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch {
                expected: u.nrows(),
                found: u.ncols(),
            });
        }
        let residual = unitarity_residual(&u);
        if residual > tolerances().num {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self { u })
    }

    pub fn from_kets(kets: &[Ket]) -> Result<Self> {
        let dim = kets.first().map(Ket::dim).unwrap_or(0);
        if kets.len() != dim || dim == 0 {
            return Err(Error::LengthMismatch {
                what: "basis",
                expected: dim,
                found: kets.len(),
            });
        }
        let mut u = CMatrix::zeros(dim, dim);
        for (j, k) in kets.iter().enumerate() {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.dim(),
                });
            }
            u.set_column(j, k.amplitudes());
        }
        Self::from_unitary(u)
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            u: CMatrix::identity(dim, dim),
        }
    }

    /// Eigenbasis of `op`, ascending eigenvalue order.
    pub fn eigenbasis(op: &HermitianOperator) -> Self {
        Self { u: op.eigen().1 }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn len(&self) -> usize {
        self.u.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.u.ncols() == 0
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn vector(&self, m: usize) -> CVector {
        self.u.column(m).into_owned()
    }

    pub fn kets(&self) -> Vec<Ket> {
        (0..self.len()).map(|m| Ket { amps: self.vector(m) }).collect()
    }

    /// `⟨m|v⟩` for every basis vector, i.e. `U†v`.
    pub fn coefficients(&self, v: &CVector) -> CVector {
        self.u.ad_mul(v)
    }

    /// Largest entrywise deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        unitarity_residual(&self.u)
    }
}

/// Extends `vectors` (assumed orthonormal) to a full orthonormal basis of
/// `ℂ^dim` by Gram-Schmidt over the canonical basis vectors in index order.
pub fn complete_basis(vectors: &[CVector], dim: usize) -> Result<Basis> {
    let mut cols: Vec<CVector> = Vec::with_capacity(dim);
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        cols.push(v.clone());
    }
    // Candidates are accepted only if a healthy fraction survives projection;
    // among `dim` canonical vectors at least `dim - cols.len()` do.
    let accept = 0.5 / (dim as f64).sqrt();
    for e in 0..dim {
        if cols.len() == dim {
            break;
        }
        let mut w = CVector::zeros(dim);
        w[e] = ONE;
        for _ in 0..2 {
            for c in &cols {
                let proj = inner(c, &w);
                w -= c * proj;
            }
        }
        let n = w.norm();
        if n > accept {
            cols.push(w / Complex64::from(n));
        }
    }
    if cols.len() != dim {
        return Err(Error::ConstructionResidual {
            what: "basis completion",
            residual: (dim - cols.len()) as f64,
        });
    }
    Basis::from_unitary(CMatrix::from_columns(&cols))
}

/// Orthonormalizes `vectors` in order (modified Gram-Schmidt, two passes).
pub fn orthonormalize(vectors: &[CVector]) -> Result<Vec<CVector>> {
    let mut out: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for c in &out {
                let proj = inner(c, &w);
                w -= c * proj;
            }
        }
        let n = w.norm();
        if n.is_nan() || n <= tolerances().deg {
            return Err(Error::Degenerate {
                what: "Gram-Schmidt residual",
                value: n,
            });
        }
        out.push(w / Complex64::from(n));
    }
    Ok(out)
}
