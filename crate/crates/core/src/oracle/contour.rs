//! Contour integrals of resolvents, discretized by the trapezoid rule on a circle.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Mat};
use crate::matrix::SymmetricMatrix;
use crate::perturb::PerturbationInstance;

type CMat = DMatrix<Complex64>;

pub const DEFAULT_NODES: usize = 256;
pub const MIN_NODES: usize = 16;
/// Successive node doublings must agree to this (absolute, max-entry) level.
pub const SETTLE_TOL: f64 = 1e-10;
pub const MAX_NODES: usize = 1 << 14;
/// Eigenvalues within this fraction of the radius from the circle are refused.
pub const CIRCLE_CLEARANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub center: Complex64,
    pub radius: f64,
    pub nodes: usize,
}

impl ContourSpec {
    pub fn new(center: f64, radius: f64, nodes: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && center.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "contour needs finite centre and positive radius, got ({center}, {radius})"
            )));
        }
        if nodes < MIN_NODES {
            return Err(Error::InvalidInput(format!(
                "contour needs at least {MIN_NODES} nodes, got {nodes}"
            )));
        }
        Ok(Self {
            center: Complex64::new(center, 0.0),
            radius,
            nodes,
        })
    }

    /// The circle of radius `g_j / 2` around `λ_j`.
    pub fn around(inst: &PerturbationInstance, j: usize) -> Result<Self> {
        let t = inst.base().target(j)?;
        Self::new(t.center(), t.gap() / 2.0, DEFAULT_NODES)
    }

    fn check_clear(&self, eigenvalues: impl IntoIterator<Item = f64>) -> Result<()> {
        for l in eigenvalues {
            let distance = ((Complex64::new(l, 0.0) - self.center).norm() - self.radius).abs();
            if distance <= CIRCLE_CLEARANCE * self.radius {
                return Err(Error::ContourTooClose {
                    eigenvalue: l,
                    distance,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ContourResult {
    pub value: Mat,
    /// Largest imaginary entry of the discretized integral.
    pub imag_residual: f64,
    pub nodes: usize,
}

fn to_complex(a: &Mat) -> CMat {
    a.map(|x| Complex64::new(x, 0.0))
}

fn resolvent(a: &CMat, z: Complex64) -> Result<CMat> {
    let d = a.nrows();
    let shifted = a - CMat::identity(d, d) * z;
    shifted
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Quadrature(format!("singular resolvent at z = {z}")))
}

// Σ_k f(z_k) r e^{iθ_k} over the nodes θ_k = 2π k / n for k in `ks`.
fn node_sum<F>(spec: &ContourSpec, n: usize, ks: Vec<usize>, f: &F) -> Result<CMat>
where
    F: Fn(Complex64) -> Result<CMat> + Sync,
{
    let terms: Vec<CMat> = ks
        .into_par_iter()
        .map(|k| {
            let w = Complex64::from_polar(spec.radius, 2.0 * PI * k as f64 / n as f64);
            f(spec.center + w).map(|m| m * w)
        })
        .collect::<Result<_>>()?;
    let mut iter = terms.into_iter();
    let first = iter.next().expect("at least one node");
    Ok(iter.fold(first, |acc, m| acc + m))
}

/// `(1/2πi) ∮ f(z) dz`, doubling the node count until two successive estimates
/// agree to [`SETTLE_TOL`]. The reduction over nodes runs in a fixed order.
pub fn contour_integral<F>(spec: &ContourSpec, f: F) -> Result<ContourResult>
where
    F: Fn(Complex64) -> Result<CMat> + Sync,
{
    let mut n = spec.nodes;
    let mut sum = node_sum(spec, n, (0..n).collect(), &f)?;
    let mut estimate = &sum / Complex64::new(n as f64, 0.0);
    loop {
        if 2 * n > MAX_NODES {
            return Err(Error::Quadrature(format!(
                "no agreement to {SETTLE_TOL:e} with up to {n} nodes"
            )));
        }
        let odd = node_sum(spec, 2 * n, (0..n).map(|k| 2 * k + 1).collect(), &f)?;
        sum += odd;
        n *= 2;
        let next = &sum / Complex64::new(n as f64, 0.0);
        let change = (&next - &estimate).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        estimate = next;
        if change < SETTLE_TOL * (1.0 + estimate.iter().fold(0.0_f64, |m, z| m.max(z.norm()))) {
            break;
        }
    }
    let imag_residual = estimate.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
    let value = estimate.map(|z| z.re);
    if imag_residual > SETTLE_TOL * (1.0 + max_abs(&value)) {
        return Err(Error::Quadrature(format!(
            "imaginary residual {imag_residual:e} is not negligible"
        )));
    }
    Ok(ContourResult {
        value,
        imag_residual,
        nodes: n,
    })
}

/// `-(1/2πi) ∮ (A - zI)^{-1} dz`: the spectral projector for the eigenvalues
/// inside the circle.
pub fn contour_projector(a: &SymmetricMatrix, spec: &ContourSpec) -> Result<ContourResult> {
    let eig = a.as_matrix().clone().symmetric_eigenvalues();
    spec.check_clear(eig.iter().copied())?;
    let ac = to_complex(a.as_matrix());
    let mut r = contour_integral(spec, |z| resolvent(&ac, z))?;
    r.value = -r.value;
    Ok(r)
}

/// `((-1)^{n-1}/2πi) ∮ G (E G)^n dz` with `G = (Σ - zI)^{-1}`.
pub fn contour_series_coefficient(
    inst: &PerturbationInstance,
    n: usize,
    spec: &ContourSpec,
) -> Result<ContourResult> {
    if n == 0 {
        return Err(Error::InvalidInput("contour coefficients start at n = 1".into()));
    }
    spec.check_clear(inst.base().eigenvalues().iter().copied())?;
    let sc = to_complex(inst.sigma().as_matrix());
    let ec = to_complex(inst.e().as_matrix());
    let mut r = contour_integral(spec, |z| {
        let g = resolvent(&sc, z)?;
        let mut acc = g.clone();
        for _ in 0..n {
            acc = acc * &ec * &g;
        }
        Ok(acc)
    })?;
    if n.is_multiple_of(2) {
        r.value = -r.value;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturb::series_coefficient_projection;

    fn two_by_two() -> PerturbationInstance {
        PerturbationInstance::new(
            SymmetricMatrix::diagonal(&[2.0, 1.0]).unwrap(),
            SymmetricMatrix::from_rows(&[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn projector_examples() {
        let a = SymmetricMatrix::diagonal(&[2.0, 1.0]).unwrap();
        let p = contour_projector(&a, &ContourSpec::new(2.0, 0.5, 64).unwrap()).unwrap();
        let expected = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(max_abs(&(p.value - expected)) < 1e-12);
        let all = contour_projector(&a, &ContourSpec::new(1.5, 2.0, 64).unwrap()).unwrap();
        assert!(max_abs(&(all.value - Mat::identity(2, 2))) < 1e-12);
        let none = contour_projector(&a, &ContourSpec::new(5.0, 1.0, 64).unwrap()).unwrap();
        assert!(max_abs(&none.value) < 1e-12);
    }

    #[test]
    fn refuses_eigenvalue_on_circle() {
        let a = SymmetricMatrix::diagonal(&[2.0, 1.0]).unwrap();
        assert!(matches!(
            contour_projector(&a, &ContourSpec::new(2.0, 1.0, 64).unwrap()),
            Err(Error::ContourTooClose { .. })
        ));
        assert!(ContourSpec::new(2.0, 1.0, 8).is_err());
        assert!(ContourSpec::new(2.0, 0.0, 64).is_err());
    }

    #[test]
    fn coefficients_match_engine() {
        let inst = two_by_two();
        let spec = ContourSpec::new(2.0, 0.5, 128).unwrap();
        let c1 = contour_series_coefficient(&inst, 1, &spec).unwrap();
        let expected = Mat::from_row_slice(2, 2, &[0.0, 0.1, 0.1, 0.0]);
        assert!(max_abs(&(c1.value - expected)) < 1e-10);
        for n in 2..=4 {
            let c = contour_series_coefficient(&inst, n, &spec).unwrap();
            let e = series_coefficient_projection(&inst, 1, n).unwrap();
            assert!(max_abs(&(c.value - e)) < 1e-8);
        }
        let zero = contour_series_coefficient(&inst.with_scaled_perturbation(0.0), 2, &spec).unwrap();
        assert_eq!(max_abs(&zero.value), 0.0);
    }
}
