//! Exact scalars, truncated jets, ν-series and symmetrization helpers.

pub mod biseries;
pub mod coeff;
pub mod jet;
pub mod matrix;
pub mod nu;
pub mod rational;
pub mod symmetrize;

pub use biseries::BiSeries;
pub use coeff::Coeff;
pub use jet::{Accuracy, Jet};
pub use matrix::{CMatrix, MatrixJet};
pub use nu::NuSeries;
pub use rational::{factorial, factorial_u64, GaussianRational, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable-set mismatch: {0} vs {1} variables")]
    VarMismatch(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("read of degree {degree} beyond accuracy {accuracy}")]
    AccuracyUnderflow { degree: i32, accuracy: i32 },
    #[error("constant term is singular")]
    Singular,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("read of ν-order {order} beyond validity window (max {max})")]
    WindowUnderflow { order: i32, max: i32 },
}
