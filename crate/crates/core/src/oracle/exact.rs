use crate::error::Result;
use crate::linalg::Mat;
use crate::perturb::PerturbationInstance;
use crate::spectral::SpectralModel;

/// Full eigendecomposition of `Σ + E`, paired with `Σ` by sorted order.
#[derive(Debug, Clone)]
pub struct ExactPerturbed {
    model: SpectralModel,
    pairing: Vec<usize>,
}

pub fn exact_perturbed(inst: &PerturbationInstance) -> Result<ExactPerturbed> {
    let model = SpectralModel::decompose(&inst.perturbed())?;
    let pairing = (1..=model.dim()).collect();
    Ok(ExactPerturbed { model, pairing })
}

impl ExactPerturbed {
    pub fn model(&self) -> &SpectralModel {
        &self.model
    }

    /// `pairing[j-1]` is the perturbed index matched to unperturbed index `j`.
    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    /// `λ̂_j`.
    pub fn eigenvalue(&self, j: usize) -> Result<f64> {
        self.model.eigenvalue(self.pairing_of(j)?)
    }

    /// `P̂_j`.
    pub fn projector(&self, j: usize) -> Result<Mat> {
        self.model.projector(self.pairing_of(j)?)
    }

    /// `Σ_{j∈members} P̂_j` for 1-based member indices.
    pub fn group_projector(&self, members: &[usize]) -> Result<Mat> {
        let d = self.model.dim();
        let mut out = Mat::zeros(d, d);
        for &j in members {
            out += self.projector(j)?;
        }
        Ok(out)
    }

    fn pairing_of(&self, j: usize) -> Result<usize> {
        self.model.check_index(j)?;
        Ok(self.pairing[j - 1])
    }
}
