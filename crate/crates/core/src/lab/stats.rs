//! Eigenvalue expressions governing the size of empirical-covariance perturbations.
//!
//! All sums are evaluated through the ratios `λ_j / λ_k = exp(ln λ_j - ln λ_k)`,
//! so they stay finite for indices where `λ_k` itself underflows.

use serde::Serialize;

use super::decay::DecayModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeRankStats {
    pub j: usize,
    /// `λ_j / g_j`
    pub ratio_lg: f64,
    /// `Σ_{k≠j} λ_k / |λ_k - λ_j|`
    pub abs_sum: f64,
    /// `Σ_{k≠j} λ_k / (λ_k - λ_j)`
    pub signed_sum: f64,
    /// `Σ_{k≠j} λ_j λ_k / (λ_k - λ_j)²`
    pub proj_sum: f64,
    /// `Σ_{k≠j} λ_k² / (λ_k - λ_j)²`
    pub square_sum: f64,
}

impl RelativeRankStats {
    /// `(λ_j/g_j)(Σ_{k≠j} λ_k/|λ_k - λ_j| + λ_j/g_j) <= c₁ n`.
    pub fn cond_rg(&self, c1: f64, n: usize) -> bool {
        self.ratio_lg * (self.abs_sum + self.ratio_lg) <= c1 * n as f64
    }

    /// `Σ_{k≠j} λ_k/|λ_k - λ_j| + λ_j/g_j <= √(c₁ n)`.
    pub fn cond_rel(&self, c1: f64, n: usize) -> bool {
        self.abs_sum + self.ratio_lg <= (c1 * n as f64).sqrt()
    }
}

/// Statistics for index `j` (1-based) from log-eigenvalues in non-increasing order.
pub fn relative_rank_stats_from_logs(log_lambda: &[f64], j: usize) -> Result<RelativeRankStats> {
    let d = log_lambda.len();
    if j == 0 || j > d {
        return Err(Error::IndexOutOfRange { index: j, dim: d });
    }
    let lj = log_lambda[j - 1];
    let mut ratio_lg = 0.0_f64;
    let (mut abs_sum, mut signed_sum, mut proj_sum, mut square_sum) = (0.0, 0.0, 0.0, 0.0);
    for (k, &lk) in log_lambda.iter().enumerate() {
        if k == j - 1 {
            continue;
        }
        // ρ = λ_j / λ_k
        let rho = (lj - lk).exp();
        if rho == 1.0 {
            return Err(Error::DegenerateGap { index: j, gap: 0.0 });
        }
        let signed = 1.0 / (1.0 - rho);
        abs_sum += signed.abs();
        signed_sum += signed;
        square_sum += signed * signed;
        proj_sum += if rho <= 1.0 {
            rho / (1.0 - rho).powi(2)
        } else {
            let s = 1.0 / rho;
            s / (1.0 - s).powi(2)
        };
        if k + 1 == j - 1 || k == j {
            // λ_j / |λ_k - λ_j| for the two neighbours.
            let ratio = if rho <= 1.0 {
                rho / (1.0 - rho)
            } else {
                1.0 / (1.0 - 1.0 / rho)
            };
            ratio_lg = ratio_lg.max(ratio);
        }
    }
    Ok(RelativeRankStats {
        j,
        ratio_lg,
        abs_sum,
        signed_sum,
        proj_sum,
        square_sum,
    })
}

pub fn relative_rank_stats(model: &DecayModel, j: usize) -> Result<RelativeRankStats> {
    relative_rank_stats_from_logs(model.log_eigenvalues(), j)
}

/// Exact second moment of `tr(P_j E P_j) - tr(P_j E R_j E P_j)` for Gaussian data
/// and `n` samples:
/// `(λ_j²/n) (2 - (4/n) S + ((n+2)/n²) S² + (2(n+2)/n²) Q)` with
/// `S = Σ_{k≠j} λ_k/(λ_k - λ_j)` and `Q = Σ_{k≠j} λ_k²/(λ_k - λ_j)²`.
///
/// Writing `A = n⁻¹ Σ_i (η_ij² - 1)` and `B_k = n⁻¹ Σ_i η_ij η_ik`, the quantity is
/// `λ_j (A - Σ_k w_k B_k²)` with `w_k = λ_k/(λ_k - λ_j)`, and the Gaussian moments
/// `E A² = 2/n`, `E A B_k² = 2/n²`, `E B_k⁴ = 3(n+2)/n³`, `E B_k² B_l² = (n+2)/n³`
/// give the expression above.
pub fn gaussian_first_two_term_moment(model: &DecayModel, j: usize, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let s = relative_rank_stats(model, j)?;
    let nf = n as f64;
    let lj = model.eigenvalues()[j - 1];
    Ok(lj * lj / nf
        * (2.0 - 4.0 / nf * s.signed_sum
            + (nf + 2.0) / (nf * nf) * s.signed_sum.powi(2)
            + 2.0 * (nf + 2.0) / (nf * nf) * s.square_sum))
}
