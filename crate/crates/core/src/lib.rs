//! Metric families, graph geodesics, distance comparisons and Sobolev/trace
//! quadratures for sequences of 2-D Riemannian metrics with Hölder-bounded
//! distances.

pub mod convergence;
pub mod error;
pub mod experiments;
pub mod field;
pub mod geodesic;
pub mod metric;

pub use error::{LabError, Result};
