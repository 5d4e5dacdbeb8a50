//! Central finite differences of `t ↦ P_j(Σ + tE)`.

use crate::error::{Error, Result};
use crate::linalg::{op_norm, Mat};
use crate::perturb::{delta, PerturbationInstance};
use crate::spectral::SpectralModel;

/// The default step `ε^{1/(n+2)} g_j / ‖E‖_∞`.
pub fn default_step(inst: &PerturbationInstance, j: usize, n: usize) -> Result<f64> {
    let g = inst.base().spectral_gap(j)?;
    let e = op_norm(inst.e().as_matrix());
    Ok(f64::EPSILON.powf(1.0 / (n as f64 + 2.0)) * g / e)
}

fn projector_at(inst: &PerturbationInstance, j: usize, t: f64) -> Result<Mat> {
    let m = inst.with_scaled_perturbation(t);
    let model = SpectralModel::decompose(&m.perturbed())?;
    if model.is_degenerate(j)? {
        return Err(Error::Stencil(format!("eigenvalue {j} is not simple at t = {t}")));
    }
    model.projector(j)
}

// Offsets (in units of h) and weights of the stencil for the n-th Taylor coefficient.
fn stencil(n: usize) -> &'static [(f64, f64)] {
    match n {
        1 => &[(1.0, 0.5), (-1.0, -0.5)],
        2 => &[(1.0, 0.5), (0.0, -1.0), (-1.0, 0.5)],
        3 => &[
            (2.0, 1.0 / 12.0),
            (1.0, -2.0 / 12.0),
            (-1.0, 2.0 / 12.0),
            (-2.0, -1.0 / 12.0),
        ],
        _ => &[],
    }
}

fn difference(inst: &PerturbationInstance, j: usize, n: usize, h: f64) -> Result<Mat> {
    let d = inst.dim();
    let mut out = Mat::zeros(d, d);
    for &(k, w) in stencil(n) {
        out += projector_at(inst, j, k * h)? * w;
    }
    Ok(out / h.powi(n as i32))
}

/// `(1/n!) dⁿ/dtⁿ P_j(t)` at `t = 0` for `n ∈ {1, 2, 3}`, with one Richardson step.
///
/// `h = None` uses [`default_step`]. The stencil is refused if it leaves the
/// region `|t| δ_j < 1/2`.
pub fn finite_difference_coefficient(
    inst: &PerturbationInstance,
    j: usize,
    n: usize,
    h: Option<f64>,
) -> Result<Mat> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidInput(format!("finite differences support n = 1..3, got {n}")));
    }
    let report = delta(inst, j)?;
    if report.e_norm == 0.0 {
        return Ok(Mat::zeros(inst.dim(), inst.dim()));
    }
    let h = match h {
        Some(h) => h,
        None => default_step(inst, j, n)?,
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Stencil(format!("step {h} is not positive")));
    }
    let reach = if n == 3 { 2.0 } else { 1.0 } * h;
    if reach * report.delta >= 0.5 {
        return Err(Error::Stencil(format!(
            "stencil reaches |t| = {reach}, where t * delta = {} >= 1/2",
            reach * report.delta
        )));
    }
    let coarse = difference(inst, j, n, h)?;
    let fine = difference(inst, j, n, h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::matrix::SymmetricMatrix;
    use crate::perturb::series_coefficient_projection;

    fn two_by_two() -> PerturbationInstance {
        PerturbationInstance::new(
            SymmetricMatrix::diagonal(&[2.0, 1.0]).unwrap(),
            SymmetricMatrix::from_rows(&[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn first_order_on_two_by_two() {
        let fd = finite_difference_coefficient(&two_by_two(), 1, 1, Some(1e-5)).unwrap();
        let expected = Mat::from_row_slice(2, 2, &[0.0, 0.1, 0.1, 0.0]);
        assert!(max_abs(&(fd - expected)) < 1e-8);
    }

    #[test]
    fn higher_orders_match_engine() {
        let inst = two_by_two();
        for n in 2..=3 {
            let fd = finite_difference_coefficient(&inst, 1, n, None).unwrap();
            let exact = series_coefficient_projection(&inst, 1, n).unwrap();
            assert!(max_abs(&(fd - exact)) < 1e-5, "n = {n}");
        }
    }

    #[test]
    fn zero_perturbation_and_refusals() {
        let inst = two_by_two();
        let z = finite_difference_coefficient(&inst.with_scaled_perturbation(0.0), 1, 2, None).unwrap();
        assert_eq!(max_abs(&z), 0.0);
        assert!(matches!(
            finite_difference_coefficient(&inst, 1, 1, Some(10.0)),
            Err(Error::Stencil(_))
        ));
        assert!(finite_difference_coefficient(&inst, 1, 4, None).is_err());
    }
}
