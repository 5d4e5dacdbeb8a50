//! Perturbation series for eigenvalues and eigenprojections of real symmetric
//! matrices, under a perturbation size weighted by the reduced resolvent.
//!
//! * [`spectral`]: eigendecomposition, gaps, projectors, resolvents, groups.
//! * [`perturb`]: `δ_j`, series coefficients, partial sums and remainder bounds.
//! * [`oracle`]: independent references (re-diagonalization, finite differences,
//!   contour integrals) and executable checks of the intermediate inequalities.
//! * [`lab`]: Monte Carlo experiments on empirical covariance matrices.

pub mod config;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod matrix;
pub mod oracle;
pub mod perturb;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{Mat, Vector};
pub use matrix::SymmetricMatrix;
pub use perturb::{DeltaReport, PerturbationInstance, SeriesExpansion};
pub use spectral::{EigenGroup, GroupedSpectrum, SpectralIndex, SpectralModel, SpectralTarget};
