use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("vector dimension must be at least {min}, got {dim}")]
    DimensionTooSmall { dim: usize, min: usize },

    #[error("operator is not Hermitian (max residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (max residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("expectation has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("degenerate {what}: {value:e}")]
    Degenerate { what: &'static str, value: f64 },

    #[error("basis is not orthonormal (max residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("POVM element {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { index: usize, min_eigenvalue: f64 },

    #[error("POVM elements do not sum to the identity (max residual {residual:e})")]
    Incomplete { residual: f64 },

    #[error("length mismatch: {what} has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("Neumark completion is numerically defective (residual {residual:e})")]
    DefectiveCompletion { residual: f64 },

    #[error("construction residual {residual:e} exceeds tolerance in {what}")]
    ConstructionResidual { what: &'static str, residual: f64 },

    #[error("operator is not involutory (max residual of op^2 - 1 is {residual:e})")]
    NotInvolutory { residual: f64 },

    #[error("regime violated: {0}")]
    Regime(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsatisfiable: {0}")]
    Unsatisfiable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
