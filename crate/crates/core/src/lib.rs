//! Steklov–Helmholtz eigenvalues by boundary integral operators.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discretization;
pub mod eigensolver;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod optimize;
pub mod oracle;
pub mod special_fn;
pub mod spectral_geometry;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
