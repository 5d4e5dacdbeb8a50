use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::matrix::SymmetricMatrix;
use crate::spectral::SpectralModel;

/// A symmetric matrix `Σ` together with a symmetric perturbation `E = Σ̂ - Σ`.
///
/// The decomposition of `Σ` and the rotated perturbation `Uᵀ E U` are computed
/// once at construction.
#[derive(Debug, Clone)]
pub struct PerturbationInstance {
    sigma: SymmetricMatrix,
    base: SpectralModel,
    e: SymmetricMatrix,
    e_eig: Mat,
}

impl PerturbationInstance {
    pub fn new(sigma: SymmetricMatrix, e: SymmetricMatrix) -> Result<Self> {
        let base = SpectralModel::decompose(&sigma)?;
        Self::assemble(sigma, base, e)
    }

    /// Uses an already-known decomposition of `Σ` (for example a diagonal ground truth).
    pub fn from_model(base: SpectralModel, e: SymmetricMatrix) -> Result<Self> {
        let sigma = SymmetricMatrix::symmetrize(base.reconstruct())?;
        Self::assemble(sigma, base, e)
    }

    /// Builds the instance for `Σ̂` given as a second matrix.
    pub fn from_pair(sigma: SymmetricMatrix, sigma_hat: &SymmetricMatrix) -> Result<Self> {
        if sigma.dim() != sigma_hat.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                found: sigma_hat.dim(),
            });
        }
        let e = SymmetricMatrix::symmetrize(sigma_hat.as_matrix() - sigma.as_matrix())?;
        Self::new(sigma, e)
    }

    fn assemble(sigma: SymmetricMatrix, base: SpectralModel, e: SymmetricMatrix) -> Result<Self> {
        if e.dim() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: e.dim(),
            });
        }
        let e_eig = base.to_eigenbasis(e.as_matrix());
        Ok(Self {
            sigma,
            base,
            e,
            e_eig,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn sigma(&self) -> &SymmetricMatrix {
        &self.sigma
    }

    pub fn base(&self) -> &SpectralModel {
        &self.base
    }

    pub fn e(&self) -> &SymmetricMatrix {
        &self.e
    }

    /// `Uᵀ E U` where `U` is the eigenbasis of `Σ`.
    pub fn e_eigenbasis(&self) -> &Mat {
        &self.e_eig
    }

    /// `Σ + E`.
    pub fn perturbed(&self) -> SymmetricMatrix {
        SymmetricMatrix::symmetrize(self.sigma.as_matrix() + self.e.as_matrix())
            .expect("sum of finite symmetric matrices")
    }

    /// The same `Σ` with `E` replaced by `tE`.
    pub fn with_scaled_perturbation(&self, t: f64) -> Self {
        Self {
            sigma: self.sigma.clone(),
            base: self.base.clone(),
            e: self.e.scaled(t),
            e_eig: &self.e_eig * t,
        }
    }

    pub fn with_perturbation(&self, e: SymmetricMatrix) -> Result<Self> {
        Self::assemble(self.sigma.clone(), self.base.clone(), e)
    }
}
