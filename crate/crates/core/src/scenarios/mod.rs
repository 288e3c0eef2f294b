//! Built-in constructions: three boxes, the two-site interferometer and the
//! photon-to-spin transfer.

mod hardy;
mod isomorphism_demo;
mod result;
mod three_box;

pub use hardy::{
    hardy_conditionals, hardy_default, Configuration, HardyScenario, SiteOutcome, HARDY_DEFAULT_TAG,
};
pub use isomorphism_demo::isomorphism_demo;
pub use result::{ProbabilityTable, ScenarioResult, TableRow};
pub use three_box::{box_space, three_box, Searched, ThreeBoxScenario, FOUND, NOT_FOUND};

/// Names accepted for built-in scenarios.
pub const BUILTINS: [&str; 3] = ["three-box", "hardy-default", "isomorphism"];
