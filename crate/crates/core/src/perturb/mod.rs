//! Weighted perturbation sizes, series coefficients and remainder bounds.

pub mod bounds;
mod delta;
mod grouped;
mod instance;
pub mod series;

pub use bounds::{
    eigenvalue_two_term_bound, projection_distance_bounds, remainder_bound_eigenvalue,
    remainder_bound_projection, BoundValue, ProjectionDistanceBounds, TwoTermBound,
};
pub use delta::{delta, delta_for_target, DeltaReport};
pub use grouped::{multiple_group_series, GroupSeries};
pub use instance::PerturbationInstance;
pub use series::{
    partial_sums, projection_coefficient, projection_coefficients, series_coefficient_eigenvalue,
    series_coefficient_projection, CoefficientMethod, SeriesExpansion, SignConvention, N_ENUM_MAX,
};
