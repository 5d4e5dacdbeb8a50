//! Perturbation series for the total projector of a group of equal eigenvalues.

use serde::Serialize;

use super::delta::delta_for_target;
use super::series::{eigenbasis_coefficients, SignConvention};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::matrix::SymmetricMatrix;
use crate::spectral::GroupedSpectrum;

#[derive(Debug, Clone, Serialize)]
pub struct GroupSeries {
    pub r: usize,
    pub rank: usize,
    pub order: usize,
    pub convention: SignConvention,
    /// Weighted perturbation size of the group.
    pub delta: f64,
    /// `(4δ_r)^p`; the bound is `C (4δ_r)^p` with an unstated constant `C`.
    pub bound_factor: f64,
    /// Whether `δ_r < 1/4`.
    pub applicable: bool,
    #[serde(skip)]
    pub coeffs: Vec<Mat>,
    #[serde(skip)]
    pub partial_sum: Mat,
}

/// Grouped coefficients `0..p` and their partial sum for the projector of group `r`.
///
/// Eigenvalues within a group are not exactly equal in floating point; the series
/// is expanded around the matrix in which each group sits exactly at its mean,
/// and the within-group spread is added to `e`.
pub fn multiple_group_series(
    groups: &GroupedSpectrum,
    r: usize,
    e: &SymmetricMatrix,
    p: usize,
    convention: SignConvention,
) -> Result<GroupSeries> {
    let model = groups.model();
    if e.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: e.dim(),
        });
    }
    if p == 0 {
        return Err(Error::InvalidInput("series order p must be at least 1".into()));
    }
    let target = groups.target(r)?;
    let mut e_eig = model.to_eigenbasis(e.as_matrix());
    let mut level = target.pseudo_inverse_weights();
    level.add_scalar_mut(target.center());
    for (k, &lam) in model.eigenvalues().iter().enumerate() {
        e_eig[(k, k)] += lam - level[k];
    }
    let delta = delta_for_target(&target, &e_eig).delta;
    let coeffs: Vec<Mat> = eigenbasis_coefficients(&target, &e_eig, p - 1, convention)
        .iter()
        .map(|c| model.from_eigenbasis(c))
        .collect();
    let d = model.dim();
    let partial_sum = coeffs.iter().fold(Mat::zeros(d, d), |a, c| a + c);
    Ok(GroupSeries {
        r,
        rank: target.rank(),
        order: p,
        convention,
        delta,
        bound_factor: (4.0 * delta).powi(p as i32),
        applicable: delta < 0.25,
        coeffs,
        partial_sum,
    })
}
