//! Error-disturbance and joint-measurement uncertainty relations for pure
//! states in finite dimension.
//!
//! The crate computes rms errors of commuting approximations to a pair of
//! observables, evaluates the classical lower bounds on those errors, and
//! builds explicit measurements that reach them.

pub mod constructions;
pub mod error;
pub mod geometry;
pub mod joint;
pub mod linalg;
pub mod random;
pub mod relations;
pub mod stats;
pub mod tol;

pub use error::{Error, Result};
pub use joint::{ApproxJointMeasurement, ErrorPair, NeumarkExtension, OptimalOutputs, Povm};
pub use linalg::{Basis, CMatrix, CVector, HermitianOperator, Ket};
pub use relations::{Branch, RelationId, RelationReport, TradeoffCurve};
pub use stats::StateStatistics;
pub use tol::{tolerances, Tolerances};
