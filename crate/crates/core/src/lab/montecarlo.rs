//! Monte Carlo estimates of empirical eigenvalue and eigenprojection errors.

use rayon::prelude::*;
use serde::Serialize;

use super::decay::DecayModel;
use super::sampler::{empirical_covariance, sample_data_with, SamplerSpec};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, Mat};
use crate::oracle::sweep::stream_rng;
use crate::perturb::delta_for_target;
use crate::spectral::SpectralModel;

/// Per-replicate measurements for one index `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Measurement {
    abs_err: f64,
    rel_err: f64,
    proj_err: f64,
    delta: f64,
    two_term: f64,
}

/// Mean, and the standard error `sample-std / √M` of that mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    pub fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let m = values.clone().count() as f64;
        let mean = values.clone().sum::<f64>() / m;
        let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        Self {
            mean,
            se: (var / m).sqrt(),
        }
    }
}

/// Root-mean-square `E^{1/2} X²` with a delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RmsEstimate {
    pub rms: f64,
    pub se: f64,
    pub mean_square: Estimate,
}

impl RmsEstimate {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let sq = Estimate::of(values.map(|v| v * v));
        let rms = sq.mean.sqrt();
        let se = if rms > 0.0 { sq.se / (2.0 * rms) } else { 0.0 };
        Self {
            rms,
            se,
            mean_square: sq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloRow {
    pub j: usize,
    pub lambda: f64,
    /// `λ̂_j - λ_j`
    pub bias: Estimate,
    /// `E^{1/2}(λ̂_j - λ_j)²`
    pub abs_err: RmsEstimate,
    /// `E^{1/2}(λ̂_j/λ_j - 1)²`
    pub rel_err: RmsEstimate,
    /// `E^{1/2}‖P̂_j - P_j‖₂²`
    pub proj_err: RmsEstimate,
    /// Empirical `P(δ_j > 1/4)`.
    pub p_delta_gt_quarter: f64,
    /// `E (tr(P_j E P_j) - tr(P_j E R_j E P_j))²`
    pub two_term_moment: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub replicates: usize,
    pub n: usize,
    pub base_seed: u64,
    pub rows: Vec<MonteCarloRow>,
    /// Replicate/index pairs with `|λ̂_j - λ_j| > ‖Σ̂ - Σ‖_∞` (must be zero).
    pub weyl_violations: usize,
}

impl MonteCarloSummary {
    pub fn row(&self, j: usize) -> Option<&MonteCarloRow> {
        self.rows.iter().find(|r| r.j == j)
    }
}

struct Replicate {
    per_j: Vec<Measurement>,
    weyl_violations: usize,
}

fn replicate(
    model: &DecayModel,
    truth: &SpectralModel,
    spec: &SamplerSpec,
    j_list: &[usize],
    r: u64,
) -> Result<Replicate> {
    let mut rng = stream_rng(spec.seed, r);
    let x = sample_data_with(model, spec, &mut rng)?;
    let sigma_hat = empirical_covariance(&x)?;
    // Σ is diagonal, so the eigenbasis of Σ is the coordinate basis.
    let e: Mat = sigma_hat.as_matrix() - truth.reconstruct();
    let hat = SpectralModel::decompose(&sigma_hat)?;
    let e_norm = op_norm(&e);
    let lam = truth.eigenvalues();
    let weyl_violations = (0..truth.dim())
        .filter(|&k| (hat.eigenvalues()[k] - lam[k]).abs() > e_norm * (1.0 + 1e-12) + 1e-15)
        .count();
    let per_j = j_list
        .iter()
        .map(|&j| {
            let target = truth.target(j)?;
            let l = lam[j - 1];
            let lh = hat.eigenvalues()[j - 1];
            let u = hat.basis().column(j - 1);
            // ‖P̂ - P‖₂² = 2 - 2 (u_jᵀ û_j)² for rank-one projectors.
            let overlap = u[j - 1];
            let proj_err = (2.0 - 2.0 * overlap * overlap).max(0.0).sqrt();
            let res = target.resolvent_weights();
            let ej = e.column(j - 1);
            let second: f64 = (0..truth.dim()).map(|k| ej[k] * ej[k] * res[k]).sum();
            Ok(Measurement {
                abs_err: lh - l,
                rel_err: lh / l - 1.0,
                proj_err,
                delta: delta_for_target(&target, &e).delta,
                two_term: e[(j - 1, j - 1)] - second,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Replicate {
        per_j,
        weyl_violations,
    })
}

/// `M` replicates; replicate `r` draws from the stream seeded with `seed + r`.
/// Replicates run in parallel and are reduced in replicate order, so the summary
/// is identical for any thread count.
pub fn mc_eigen_error(
    model: &DecayModel,
    spec: &SamplerSpec,
    j_list: &[usize],
    m: usize,
) -> Result<MonteCarloSummary> {
    if m < 2 {
        return Err(Error::InvalidInput("need at least two replicates".into()));
    }
    spec.validate()?;
    let truth = model.spectral_model();
    for &j in j_list {
        truth.target(j)?;
    }
    let reps: Vec<Replicate> = (0..m as u64)
        .into_par_iter()
        .map(|r| replicate(model, &truth, spec, j_list, r))
        .collect::<Result<_>>()?;
    let rows = j_list
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let col = || reps.iter().map(move |r| r.per_j[i]);
            MonteCarloRow {
                j,
                lambda: model.eigenvalues()[j - 1],
                bias: Estimate::of(col().map(|x| x.abs_err)),
                abs_err: RmsEstimate::of(col().map(|x| x.abs_err)),
                rel_err: RmsEstimate::of(col().map(|x| x.rel_err)),
                proj_err: RmsEstimate::of(col().map(|x| x.proj_err)),
                p_delta_gt_quarter: col().filter(|x| x.delta > 0.25).count() as f64 / m as f64,
                two_term_moment: Estimate::of(col().map(|x| x.two_term * x.two_term)),
            }
        })
        .collect();
    Ok(MonteCarloSummary {
        replicates: m,
        n: spec.n,
        base_seed: spec.seed,
        rows,
        weyl_violations: reps.iter().map(|r| r.weyl_violations).sum(),
    })
}
