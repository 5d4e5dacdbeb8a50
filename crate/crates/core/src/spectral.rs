//! Symmetric eigendecomposition and the objects derived from it: gaps,
//! eigenprojections, reduced resolvents, weight operators and eigenvalue groups.
//!
//! Every operator here is a spectral function `U diag(w) Uᵀ` of the model. The
//! diagonal weights for a given eigenvalue (or group of eigenvalues) are carried
//! by a [`SpectralTarget`], which the perturbation engine uses directly in the
//! eigenbasis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, spectral_matrix, Mat, Vector};
use crate::matrix::SymmetricMatrix;

/// Gaps at or below this fraction of the spectral radius count as zero.
pub const DEGENERACY_TOL: f64 = 1e-13;

/// Eigenvalues in non-increasing order with orthonormal eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    eigenvalues: Vector,
    basis: Mat,
}

impl SpectralModel {
    /// Dense symmetric eigendecomposition, sorted non-increasing.
    ///
    /// Ties keep the solver's original order (stable sort), and each eigenvector
    /// is signed so that its largest-magnitude entry is positive. Nothing
    /// downstream depends on the sign; it only makes output reproducible.
    pub fn decompose(a: &SymmetricMatrix) -> Result<Self> {
        let m = a.as_matrix();
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let eig = m.clone().symmetric_eigen();
        let d = m.nrows();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &k| {
            eig.eigenvalues[k]
                .partial_cmp(&eig.eigenvalues[i])
                .expect("finite eigenvalues")
        });
        let eigenvalues = Vector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
        let mut basis = Mat::zeros(d, d);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            let pivot = col
                .iter()
                .copied()
                .fold(0.0_f64, |best, x| if x.abs() > best.abs() { x } else { best });
            if pivot < 0.0 {
                col.neg_mut();
            }
            basis.set_column(dst, &col);
        }
        Ok(Self { eigenvalues, basis })
    }

    /// Builds a model from known eigenpairs. Eigenvalues must be non-increasing and
    /// the basis orthonormal to 1e-10.
    pub fn from_parts(eigenvalues: Vector, basis: Mat) -> Result<Self> {
        let d = eigenvalues.len();
        if basis.nrows() != d || basis.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: basis.nrows(),
            });
        }
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite eigenvalue".into()));
        }
        if eigenvalues.as_slice().windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("eigenvalues must be non-increasing".into()));
        }
        let model = Self { eigenvalues, basis };
        if model.orthonormality_error() > 1e-10 {
            return Err(Error::InvalidInput("basis is not orthonormal".into()));
        }
        Ok(model)
    }

    /// Diagonal model with `U = I`.
    pub fn diagonal(eigenvalues: &[f64]) -> Result<Self> {
        let d = eigenvalues.len();
        Self::from_parts(Vector::from_column_slice(eigenvalues), Mat::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &Vector {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    /// `λ_j`, 1-based.
    pub fn eigenvalue(&self, j: usize) -> Result<f64> {
        self.check_index(j)?;
        Ok(self.eigenvalues[j - 1])
    }

    pub fn check_index(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.dim() {
            return Err(Error::IndexOutOfRange {
                index: j,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// Largest eigenvalue magnitude, floored at the smallest normal float.
    pub fn scale(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()))
    }

    /// `‖U diag(λ) Uᵀ - A‖_∞` entrywise.
    pub fn reconstruction_error(&self, a: &SymmetricMatrix) -> f64 {
        max_abs(&(self.reconstruct() - a.as_matrix()))
    }

    pub fn orthonormality_error(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.basis.transpose() * &self.basis - Mat::identity(d, d)))
    }

    pub fn reconstruct(&self) -> Mat {
        spectral_matrix(&self.basis, &self.eigenvalues)
    }

    /// `U diag(w) Uᵀ`.
    pub fn spectral_function(&self, weights: &Vector) -> Mat {
        spectral_matrix(&self.basis, weights)
    }

    /// Rotates `a` into the eigenbasis: `Uᵀ a U`.
    pub fn to_eigenbasis(&self, a: &Mat) -> Mat {
        self.basis.transpose() * a * &self.basis
    }

    pub fn from_eigenbasis(&self, a: &Mat) -> Mat {
        &self.basis * a * self.basis.transpose()
    }

    /// `g_j = min(λ_{j-1} - λ_j, λ_j - λ_{j+1})`, with one-sided gaps at both ends.
    pub fn spectral_gap(&self, j: usize) -> Result<f64> {
        self.check_index(j)?;
        let d = self.dim();
        if d == 1 {
            return Ok(f64::INFINITY);
        }
        let l = &self.eigenvalues;
        let i = j - 1;
        let above = (i > 0).then(|| l[i - 1] - l[i]);
        let below = (i + 1 < d).then(|| l[i] - l[i + 1]);
        let g = match (above, below) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        Ok(g.max(0.0))
    }

    pub fn index(&self, j: usize) -> Result<SpectralIndex> {
        Ok(SpectralIndex {
            j,
            gap: self.spectral_gap(j)?,
        })
    }

    /// Whether `g_j` is indistinguishable from zero at working precision.
    pub fn is_degenerate(&self, j: usize) -> Result<bool> {
        Ok(self.spectral_gap(j)? <= DEGENERACY_TOL * self.scale())
    }

    /// Spectral weights for the simple eigenvalue `λ_j`.
    pub fn target(&self, j: usize) -> Result<SpectralTarget> {
        let gap = self.spectral_gap(j)?;
        if gap <= DEGENERACY_TOL * self.scale() {
            return Err(Error::DegenerateGap { index: j, gap });
        }
        let center = self.eigenvalues[j - 1];
        let shifts = Vector::from_iterator(
            self.dim(),
            self.eigenvalues
                .iter()
                .enumerate()
                .map(|(k, &l)| if k == j - 1 { 0.0 } else { l - center }),
        );
        Ok(SpectralTarget {
            label: j,
            members: vec![j - 1],
            center,
            gap,
            shifts,
        })
    }

    /// `P_j = u_j u_jᵀ`.
    pub fn projector(&self, j: usize) -> Result<Mat> {
        self.check_index(j)?;
        let u = self.basis.column(j - 1);
        Ok(u * u.transpose())
    }

    /// `R_j = Σ_{k≠j} (λ_k - λ_j)^{-1} P_k`.
    pub fn reduced_resolvent(&self, j: usize) -> Result<Mat> {
        Ok(self.spectral_function(&self.target(j)?.resolvent_weights()))
    }

    /// `|R_j|^{1/2} = Σ_{k≠j} |λ_k - λ_j|^{-1/2} P_k`.
    pub fn abs_resolvent_sqrt(&self, j: usize) -> Result<Mat> {
        Ok(self.spectral_function(&self.target(j)?.abs_resolvent_sqrt_weights()))
    }

    /// `|R_j|^{-1/2} = Σ_{k≠j} |λ_k - λ_j|^{1/2} P_k`, the pseudo-inverse of `|R_j|^{1/2}`.
    pub fn abs_resolvent_inv_sqrt(&self, j: usize) -> Result<Mat> {
        Ok(self.spectral_function(&self.target(j)?.abs_resolvent_inv_sqrt_weights()))
    }

    /// `W_j = |R_j|^{1/2} + g_j^{-1/2} P_j`.
    pub fn weight_operator(&self, j: usize) -> Result<Mat> {
        Ok(self.spectral_function(&self.target(j)?.weight_weights()))
    }

    /// `W_j^{-1} = |R_j|^{-1/2} + g_j^{1/2} P_j`.
    pub fn weight_inverse(&self, j: usize) -> Result<Mat> {
        Ok(self.spectral_function(&self.target(j)?.weight_inverse_weights()))
    }

    /// `Σ_{k≠j} (λ_k - λ_j) P_k`, the pseudo-inverse of `R_j`.
    pub fn resolvent_pseudo_inverse(&self, j: usize) -> Result<Mat> {
        Ok(self.spectral_function(&self.target(j)?.pseudo_inverse_weights()))
    }

    /// Partitions the spectrum into groups of (numerically) equal eigenvalues.
    ///
    /// Neighbouring eigenvalues closer than `tol` are chained into one group, so
    /// distinct groups are always more than `tol` apart.
    pub fn group_eigenvalues(&self, tol: f64) -> Result<GroupedSpectrum> {
        if !(tol >= 0.0) {
            return Err(Error::InvalidInput(format!("grouping tolerance {tol} < 0")));
        }
        let l = &self.eigenvalues;
        let mut spans: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for k in 1..=l.len() {
            if k == l.len() || l[k - 1] - l[k] > tol {
                spans.push((start, k));
                start = k;
            }
        }
        let mus: Vec<f64> = spans
            .iter()
            .map(|&(a, b)| l.rows(a, b - a).iter().sum::<f64>() / (b - a) as f64)
            .collect();
        let groups = spans
            .iter()
            .enumerate()
            .map(|(r, &(a, b))| {
                let above = (r > 0).then(|| mus[r - 1] - mus[r]);
                let below = (r + 1 < mus.len()).then(|| mus[r] - mus[r + 1]);
                let gap = match (above, below) {
                    (Some(x), Some(y)) => x.min(y),
                    (Some(x), None) | (None, Some(x)) => x,
                    (None, None) => f64::INFINITY,
                };
                EigenGroup {
                    index: r + 1,
                    members: (a + 1..=b).collect(),
                    mu: mus[r],
                    gap,
                }
            })
            .collect();
        Ok(GroupedSpectrum {
            model: self.clone(),
            groups,
        })
    }

    /// Default grouping tolerance: `1e-9` times the spectral radius.
    pub fn default_group_tol(&self) -> f64 {
        1e-9 * self.scale()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralIndex {
    pub j: usize,
    pub gap: f64,
}

/// One cluster of equal eigenvalues. Member indices are 1-based and contiguous.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenGroup {
    pub index: usize,
    pub members: Vec<usize>,
    pub mu: f64,
    pub gap: f64,
}

impl EigenGroup {
    pub fn rank(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone)]
pub struct GroupedSpectrum {
    model: SpectralModel,
    groups: Vec<EigenGroup>,
}

impl GroupedSpectrum {
    pub fn model(&self) -> &SpectralModel {
        &self.model
    }

    pub fn groups(&self) -> &[EigenGroup] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// 1-based group lookup.
    pub fn group(&self, r: usize) -> Result<&EigenGroup> {
        if r == 0 || r > self.groups.len() {
            return Err(Error::IndexOutOfRange {
                index: r,
                dim: self.groups.len(),
            });
        }
        Ok(&self.groups[r - 1])
    }

    /// Spectral weights for group `r`: every eigenvalue is replaced by its group mean.
    pub fn target(&self, r: usize) -> Result<SpectralTarget> {
        let g = self.group(r)?;
        if g.gap <= DEGENERACY_TOL * self.model.scale() {
            return Err(Error::DegenerateGap {
                index: r,
                gap: g.gap,
            });
        }
        let mut shifts = Vector::zeros(self.model.dim());
        for other in &self.groups {
            for &k in &other.members {
                shifts[k - 1] = if other.index == r { 0.0 } else { other.mu - g.mu };
            }
        }
        Ok(SpectralTarget {
            label: r,
            members: g.members.iter().map(|k| k - 1).collect(),
            center: g.mu,
            gap: g.gap,
            shifts,
        })
    }

    /// `P_r = Σ_{j∈I_r} u_j u_jᵀ`.
    pub fn projector(&self, r: usize) -> Result<Mat> {
        Ok(self.model.spectral_function(&self.target(r)?.projector_weights()))
    }

    /// `R_r = Σ_{s≠r} (μ_s - μ_r)^{-1} P_s`.
    pub fn reduced_resolvent(&self, r: usize) -> Result<Mat> {
        Ok(self.model.spectral_function(&self.target(r)?.resolvent_weights()))
    }
}

/// Diagonal (eigenbasis) description of one eigenvalue or eigenvalue group:
/// which eigen-indices belong to it, its centre, its gap, and the signed distance
/// of every other eigenvalue level from the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTarget {
    label: usize,
    members: Vec<usize>,
    center: f64,
    gap: f64,
    shifts: Vector,
}

impl SpectralTarget {
    /// The 1-based eigenvalue or group index this target was built for.
    pub fn label(&self) -> usize {
        self.label
    }

    /// 0-based eigen-indices in the target.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn dim(&self) -> usize {
        self.shifts.len()
    }

    pub fn rank(&self) -> usize {
        self.members.len()
    }

    pub fn is_member(&self, k: usize) -> bool {
        self.members.contains(&k)
    }

    fn map(&self, member: f64, other: impl Fn(f64) -> f64) -> Vector {
        Vector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|k| {
                if self.is_member(k) {
                    member
                } else {
                    other(self.shifts[k])
                }
            }),
        )
    }

    pub fn projector_weights(&self) -> Vector {
        self.map(1.0, |_| 0.0)
    }

    pub fn resolvent_weights(&self) -> Vector {
        self.map(0.0, |s| 1.0 / s)
    }

    pub fn abs_resolvent_sqrt_weights(&self) -> Vector {
        self.map(0.0, |s| 1.0 / s.abs().sqrt())
    }

    pub fn abs_resolvent_inv_sqrt_weights(&self) -> Vector {
        self.map(0.0, |s| s.abs().sqrt())
    }

    pub fn weight_weights(&self) -> Vector {
        self.map(1.0 / self.gap.sqrt(), |s| 1.0 / s.abs().sqrt())
    }

    pub fn weight_inverse_weights(&self) -> Vector {
        self.map(self.gap.sqrt(), |s| s.abs().sqrt())
    }

    pub fn pseudo_inverse_weights(&self) -> Vector {
        self.map(0.0, |s| s)
    }
}
