//! Exact computation of star products with separation of variables on
//! sections of `End(E*)` over one holomorphic chart.
//!
//! The crate is layered bottom-up:
//!
//! - [`algebra`]: Gaussian rationals, truncated jets, ν-series, η-series.
//! - [`geometry`]: chart data, metric, connection, Calabi functions.
//! - [`graphs`]: Feynman graphs, canonical forms, enumeration, partitions.
//! - [`coefficients`]: graph weights `d`, `e`, `c`.
//! - [`tensors`]: index tensors, graph tensors, Fock-space operators.
//! - [`starprod`]: the star products and their verifiers.

pub mod algebra;
pub mod coefficients;
pub mod config;
pub mod fixtures;
pub mod geometry;
pub mod graphs;
pub mod report;
pub mod starprod;
pub mod tensors;

pub use algebra::{AlgebraError, BiSeries, CMatrix, GaussianRational, Jet, MatrixJet, NuSeries, Rational};
