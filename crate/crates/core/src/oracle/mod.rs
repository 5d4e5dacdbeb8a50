//! Independent references for the perturbation engine and executable checks of
//! the inequalities it relies on.

pub mod contour;
mod exact;
pub mod finite_diff;
pub mod sweep;
pub mod verify;

pub use contour::{contour_projector, contour_series_coefficient, ContourResult, ContourSpec};
pub use exact::{exact_perturbed, ExactPerturbed};
pub use finite_diff::finite_difference_coefficient;
pub use sweep::{run_sweep, SweepConfig, SweepResult};
pub use verify::{
    verify_remainder_identity, verify_separation, verify_weighted_projection_bound, CheckReport,
    RemainderIdentityReport,
};
