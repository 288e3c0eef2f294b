//! Bell-type behaviors, CHSH optimization and local-polytope membership.

mod behavior;
mod chsh;
mod membership;
pub mod simplex;
mod strategy;

pub use behavior::{BipartiteBehavior, Shape};
pub use chsh::{
    behavior_from_state, chsh_max, chsh_value, correlation_matrix, BlochAngles, SpinMeasurementAngles, GRID_STEP,
    REFINE_SWEEPS, REFINE_TOL,
};
pub use membership::{
    lhv_membership, reconstruct, Certificate, MembershipResult, WeightedStrategy, CERTIFICATE_BOUND,
    CERTIFICATE_MARGIN, FEASIBILITY_TOL,
};
pub use strategy::{enumerate_strategies, DeterministicStrategy, MAX_STRATEGIES};
