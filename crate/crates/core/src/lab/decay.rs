use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::SpectralModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayKind {
    /// `λ_j = exp(-j^α)` with `α ∈ (0, 1]`.
    ExponentialAlpha(f64),
    UserList,
}

/// A strictly positive, non-increasing population spectrum with `U = I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayModel {
    kind: DecayKind,
    eigenvalues: Vec<f64>,
    /// `ln λ_j`, kept separately so that ratios stay exact after `λ_j` underflows.
    log_eigenvalues: Vec<f64>,
}

impl DecayModel {
    pub fn exponential(alpha: f64, d: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidInput(format!("alpha = {alpha} not in (0, 1]")));
        }
        if d < 2 {
            return Err(Error::InvalidInput(format!("dimension {d} < 2")));
        }
        let log_eigenvalues: Vec<f64> = (1..=d).map(|j| -(j as f64).powf(alpha)).collect();
        Ok(Self {
            kind: DecayKind::ExponentialAlpha(alpha),
            eigenvalues: log_eigenvalues.iter().map(|l| l.exp()).collect(),
            log_eigenvalues,
        })
    }

    pub fn from_list(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput("need at least two eigenvalues".into()));
        }
        if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("eigenvalues must be positive and finite".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("eigenvalues must be non-increasing".into()));
        }
        Ok(Self {
            kind: DecayKind::UserList,
            eigenvalues: values.to_vec(),
            log_eigenvalues: values.iter().map(|v| v.ln()).collect(),
        })
    }

    pub fn kind(&self) -> DecayKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn log_eigenvalues(&self) -> &[f64] {
        &self.log_eigenvalues
    }

    /// Diagonal ground truth `Σ = diag(λ)`.
    pub fn spectral_model(&self) -> SpectralModel {
        SpectralModel::diagonal(&self.eigenvalues).expect("validated spectrum")
    }

    /// `Σ_{k>d} λ_k / Σ_k λ_k` for the untruncated exponential profile; zero for a
    /// user list.
    pub fn truncation_tail(&self) -> f64 {
        let DecayKind::ExponentialAlpha(alpha) = self.kind else {
            return 0.0;
        };
        let head: f64 = self.eigenvalues.iter().sum();
        let mut tail = 0.0;
        let mut k = self.dim() + 1;
        loop {
            let term = (-(k as f64).powf(alpha)).exp();
            tail += term;
            if term <= 1e-18 * (head + tail) || term == 0.0 {
                break;
            }
            k += 1;
        }
        tail / (head + tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_values() {
        let m = DecayModel::exponential(1.0, 3).unwrap();
        let e = std::f64::consts::E;
        assert_eq!(m.eigenvalues(), &[1.0 / e, (-2.0f64).exp(), (-3.0f64).exp()]);
        assert!(DecayModel::exponential(0.0, 3).is_err());
        assert!(DecayModel::exponential(1.5, 3).is_err());
        assert!(DecayModel::exponential(1.0, 1).is_err());
    }

    #[test]
    fn user_list_and_tail() {
        let m = DecayModel::from_list(&[2.0, 1.0]).unwrap();
        assert_eq!(m.spectral_model().eigenvalues().as_slice(), &[2.0, 1.0]);
        assert_eq!(m.truncation_tail(), 0.0);
        assert!(DecayModel::from_list(&[1.0, 2.0]).is_err());
        assert!(DecayModel::from_list(&[1.0, 0.0]).is_err());
        let tail = DecayModel::exponential(1.0, 10).unwrap().truncation_tail();
        let expected = (-11.0f64).exp() / (1.0 - (-1.0f64).exp()) / (1.0 / (std::f64::consts::E - 1.0));
        assert!((tail / expected - 1.0).abs() < 1e-3);
        assert!(DecayModel::exponential(1.0, 40).unwrap().truncation_tail() < 1e-12);
    }
}
