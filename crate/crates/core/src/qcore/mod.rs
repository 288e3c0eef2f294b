//! Composite Hilbert spaces, dense pure states, operators and projective
//! measurements.

mod measurement;
mod operator;
mod schmidt;
mod space;
mod state;

pub use measurement::ProjectiveMeasurement;
pub use operator::{
    apply, apply_local, basis_projector, embed, is_unitary, projector_onto, LinearOperator, OP_TOL,
};
pub use schmidt::schmidt_coefficients;
pub use space::{CompositeSpace, Subsystem, SubsystemKind};
pub use state::{inner, tensor_state, StateVector, UNIT_NORM_TOL};
