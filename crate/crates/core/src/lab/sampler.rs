use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution as _, StandardNormal, StudentT};
use serde::Serialize;

use super::decay::DecayModel;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::matrix::SymmetricMatrix;
use crate::oracle::sweep::stream_rng;

/// Law of the standardized Karhunen-Loève coefficients `η_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Gaussian,
    /// `±1` with equal probability.
    Rademacher,
    /// `√3 · Uniform(-1, 1)`.
    UniformScaled,
    /// Student t with 5 degrees of freedom, scaled to unit variance. Heavy-tailed,
    /// so it is only available when explicitly allowed.
    StudentT5,
}

impl Distribution {
    pub fn is_sub_gaussian(self) -> bool {
        !matches!(self, Distribution::StudentT5)
    }

    fn draw<R: Rng + ?Sized>(self, rng: &mut R, t5: &StudentT<f64>) -> f64 {
        match self {
            Distribution::Gaussian => StandardNormal.sample(rng),
            Distribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Distribution::UniformScaled => 3f64.sqrt() * rng.random_range(-1.0..1.0),
            Distribution::StudentT5 => t5.sample(rng) * (3.0f64 / 5.0).sqrt(),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "rademacher" => Ok(Self::Rademacher),
            "uniform_scaled" | "uniform" => Ok(Self::UniformScaled),
            "student_t5" => Ok(Self::StudentT5),
            _ => Err(Error::Parse(format!("unknown distribution {s:?}"))),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gaussian => "gaussian",
            Self::Rademacher => "rademacher",
            Self::UniformScaled => "uniform_scaled",
            Self::StudentT5 => "student_t5",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerSpec {
    pub distribution: Distribution,
    pub n: usize,
    pub seed: u64,
    pub out_of_assumption: bool,
}

impl SamplerSpec {
    pub fn new(distribution: Distribution, n: usize, seed: u64) -> Self {
        Self {
            distribution,
            n,
            seed,
            out_of_assumption: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("sample size n must be positive".into()));
        }
        if !self.distribution.is_sub_gaussian() && !self.out_of_assumption {
            return Err(Error::InvalidInput(format!(
                "{} is not sub-Gaussian; enable out_of_assumption to use it",
                self.distribution
            )));
        }
        Ok(())
    }
}

/// `n × d` data matrix whose `i`-th row is `X_i = Σ_j √λ_j η_{ij} e_j`, drawn
/// row by row from the seeded stream.
pub fn sample_data_with<R: Rng + ?Sized>(
    model: &DecayModel,
    spec: &SamplerSpec,
    rng: &mut R,
) -> Result<Mat> {
    spec.validate()?;
    let t5 = StudentT::new(5.0).expect("valid degrees of freedom");
    let scale: Vec<f64> = model.eigenvalues().iter().map(|l| l.sqrt()).collect();
    let d = model.dim();
    let mut x = DMatrix::zeros(spec.n, d);
    for i in 0..spec.n {
        for (k, s) in scale.iter().enumerate() {
            x[(i, k)] = s * spec.distribution.draw(rng, &t5);
        }
    }
    Ok(x)
}

pub fn sample_data(model: &DecayModel, spec: &SamplerSpec) -> Result<Mat> {
    sample_data_with(model, spec, &mut stream_rng(spec.seed, 0))
}

/// `Σ̂ = Xᵀ X / n`.
pub fn empirical_covariance(data: &Mat) -> Result<SymmetricMatrix> {
    let n = data.nrows();
    if n == 0 {
        return Err(Error::InvalidInput("empirical covariance needs n >= 1".into()));
    }
    SymmetricMatrix::symmetrize(data.tr_mul(data) / n as f64)
}
