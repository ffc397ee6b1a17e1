//! Rigorous spectral upper bounds and Monte Carlo estimates for the
//! maximal Lyapunov exponent of i.i.d. random products of nonnegative
//! matrices.
//!
//! The central quantity is `log mu`, where `mu` is the dominant eigenvalue
//! of the expectation matrix of the ensemble: an almost-sure upper bound
//! on the Lyapunov exponent whenever the expectation matrix is entrywise
//! positive. The crate computes that bound exactly, estimates the exponent
//! itself by reproducible simulation, enumerates exact expectations for
//! short products, and compares everything against reference values from
//! the literature.

pub mod bounds;
pub mod cli;
pub mod ensemble;
pub mod enumerate;
pub mod error;
pub mod linalg;
pub mod montecarlo;

pub use error::{Error, Result};
