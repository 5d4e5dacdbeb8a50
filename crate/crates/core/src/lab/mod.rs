//! Sub-Gaussian data simulation, empirical covariance, relative-rank
//! diagnostics and Monte Carlo error experiments.

mod decay;
mod montecarlo;
mod phase;
mod sampler;
mod stats;

pub use decay::{DecayKind, DecayModel};
pub use montecarlo::{mc_eigen_error, Estimate, MonteCarloRow, MonteCarloSummary, RmsEstimate};
pub use phase::{
    fitted_slope, phase_table_from, phase_transition_experiment, reference_eigenvalue, reference_projection,
    BandFit, ExperimentConfig, PhaseRow, PhaseTable, PHASE_CSV_HEADER,
};
pub use sampler::{empirical_covariance, sample_data, sample_data_with, Distribution, SamplerSpec};
pub use stats::{gaussian_first_two_term_moment, relative_rank_stats, relative_rank_stats_from_logs, RelativeRankStats};
