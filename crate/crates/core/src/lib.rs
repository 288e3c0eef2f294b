//! Exact dense state-vector engine for pre- and post-selected quantum
//! scenarios, linear-optical interferometers and local-hidden-variable tests.

pub mod error;
pub mod isomorphism;
pub mod nonlocal;
pub mod optics;
pub mod prepost;
pub mod qcore;
pub mod scenarios;
pub mod serde_complex;

pub use error::{Error, Result};
pub use num_complex::Complex64;
