//! Chart-level geometry: metric, canonical connection, Poisson bracket and
//! formal Calabi functions.

pub mod calabi;
pub mod chart;
pub mod connection;

pub use calabi::{bch_h, calabi_d, calabi_qh};
pub use chart::{poisson_bracket, validate_chart, Chart, ChartData};
pub use connection::ConnectionData;

use thiserror::Error;

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("complex dimension {0} unsupported")]
    Dimension(usize),
    #[error("field '{0}' has the wrong shape")]
    Shape(String),
    #[error("potential of weight -1 is required")]
    MissingPotential,
    #[error("potential weight {0} is below -1")]
    BadWeight(i32),
    #[error("potential of weight {0} is not real")]
    NonRealPotential(i32),
    #[error("bundle metric u is not Hermitian")]
    NonHermitian,
    #[error("bundle metric u is singular at the origin")]
    SingularBundleMetric,
    #[error("metric g is degenerate at the origin")]
    DegenerateMetric,
    #[error("commutator expansion supports orders 1..=3, got {0}")]
    UnsupportedOrder(u32),
    #[error("calabi: {0}")]
    Calabi(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
