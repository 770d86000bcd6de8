//! Simulation and analysis of polarization-insensitive quantum frequency
//! conversion: the dual-polarization conversion channel, the atom–photon
//! entangled source, polarization-analyzer tomography with iterative
//! maximum-likelihood reconstruction, and two-qubit entanglement metrics.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar for everyday use.

// Negated comparisons in this crate reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod measurement;
pub mod metrics;
pub mod qfc;
pub mod quantum;
pub mod random;
pub mod scalar;
pub mod source;
pub mod tomography;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix64 = quantum::ComplexMatrix<f64>;
pub type Matrix32 = quantum::ComplexMatrix<f32>;
pub type State64 = quantum::TwoQubitState<f64>;
pub type State32 = quantum::TwoQubitState<f32>;
pub type QfcConfig64 = qfc::QfcConfig<f64>;
pub type QfcConfig32 = qfc::QfcConfig<f32>;
pub type SourceConfig64 = source::SourceConfig<f64>;
pub type SourceConfig32 = source::SourceConfig<f32>;
pub type CountRecord64 = measurement::CountRecord<f64>;
pub type CountRecord32 = measurement::CountRecord<f32>;
pub type Metrics64 = metrics::MetricsReport<f64>;
pub type Metrics32 = metrics::MetricsReport<f32>;
