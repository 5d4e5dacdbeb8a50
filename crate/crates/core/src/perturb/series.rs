//! Perturbation-series coefficients `P^{(n)}`, `λ^{(n)}` and their partial sums.
//!
//! `P^{(n)} = (-1)^{n+1} Σ R^{(k_1)} E R^{(k_2)} ⋯ E R^{(k_{n+1})}` over all
//! compositions `k_1 + ⋯ + k_{n+1} = n`, with `R^{(0)} = -P` and `R^{(k)} = R^k`.
//!
//! Two evaluation paths are provided:
//!
//! * enumerative: the composition sum itself, in the original basis
//!   (`C(2n, n)` terms);
//! * generating function: with `S(z) = -P + Σ_{k≥1} z^k R^k`, `P^{(n)}` is
//!   `(-1)^{n+1}` times the `z^n` coefficient of `S(z) (E S(z))^n`. All orders up
//!   to `N` come out of one pass of truncated matrix-polynomial products, done
//!   in the eigenbasis where `S(z)` is diagonal.

use std::collections::BTreeMap;

use serde::Serialize;

use super::bounds::{self, BoundValue};
use super::delta::{delta_for_target, DeltaReport};
use super::PerturbationInstance;
use crate::error::{Error, Result};
use crate::linalg::{hs_norm, Mat, Vector};
use crate::spectral::{SpectralModel, SpectralTarget};

/// Largest order evaluated by the enumerative path by default.
pub const N_ENUM_MAX: usize = 7;

/// Relative agreement required between the two coefficient paths.
pub const PATH_AGREEMENT_TOL: f64 = 1e-12;

/// Global sign applied to the `n`-th composition sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// `(-1)^{n+1}`; reproduces `P^{(0)} = P` and `P^{(1)} = -REP - PER`.
    Standard,
    /// `(-1)^{k_1+⋯+k_{n+1}} = (-1)^n`, the factor printed for eigenvalue groups.
    GroupedPrinted,
}

impl SignConvention {
    pub fn sign(self, n: usize) -> f64 {
        let odd = match self {
            SignConvention::Standard => (n + 1) % 2 == 1,
            SignConvention::GroupedPrinted => n % 2 == 1,
        };
        if odd {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientMethod {
    Enumerative,
    GeneratingFunction,
    /// Generating function, checked against enumeration when `n <= N_ENUM_MAX`.
    CrossChecked,
}

fn scale_columns(a: &Mat, w: &Vector) -> Mat {
    let mut out = a.clone();
    for (k, mut col) in out.column_iter_mut().enumerate() {
        col *= w[k];
    }
    out
}

/// `P^{(0..=max_n)}` in the eigenbasis, via the generating function.
pub fn eigenbasis_coefficients(
    target: &SpectralTarget,
    e: &Mat,
    max_n: usize,
    convention: SignConvention,
) -> Vec<Mat> {
    let d = target.dim();
    let res = target.resolvent_weights();
    let s: Vec<Vector> = (0..=max_n)
        .map(|k| {
            if k == 0 {
                -target.projector_weights()
            } else {
                res.map(|c| c.powi(k as i32))
            }
        })
        .collect();

    // q[m] holds the z^m coefficient of S (E S)^n for the current n.
    let mut q: Vec<Mat> = s.iter().map(Mat::from_diagonal).collect();
    let mut out = Vec::with_capacity(max_n + 1);
    out.push(&q[0] * convention.sign(0));
    for n in 1..=max_n {
        let qe: Vec<Mat> = q.iter().map(|m| m * e).collect();
        let mut next = vec![Mat::zeros(d, d); max_n + 1];
        for (m, slot) in next.iter_mut().enumerate() {
            for a in 0..=m {
                if qe[a].iter().all(|&x| x == 0.0) {
                    continue;
                }
                *slot += scale_columns(&qe[a], &s[m - a]);
            }
        }
        q = next;
        out.push(&q[n] * convention.sign(n));
    }
    out
}

/// The composition sum for a single order, evaluated with dense matrices in the
/// original basis.
pub fn enumerative_coefficient(
    model: &SpectralModel,
    target: &SpectralTarget,
    e: &Mat,
    n: usize,
    convention: SignConvention,
) -> Mat {
    let d = model.dim();
    let res = target.resolvent_weights();
    let factors: Vec<Mat> = (0..=n)
        .map(|k| {
            if k == 0 {
                -model.spectral_function(&target.projector_weights())
            } else {
                model.spectral_function(&res.map(|c| c.powi(k as i32)))
            }
        })
        .collect();
    let mut total = Mat::zeros(d, d);
    crate::linalg::for_each_composition(n, n + 1, |ks| {
        let mut prod = factors[ks[0]].clone();
        for &k in &ks[1..] {
            prod = prod * e * &factors[k];
        }
        total += prod;
    });
    total * convention.sign(n)
}

fn agreement_scale(a: &Mat, b: &Mat, term_scale: f64) -> f64 {
    hs_norm(a).max(hs_norm(b)).max(term_scale)
}

/// `P_j^{(n)}` by the generating-function path.
pub fn series_coefficient_projection(inst: &PerturbationInstance, j: usize, n: usize) -> Result<Mat> {
    projection_coefficient(inst, j, n, CoefficientMethod::GeneratingFunction)
}

pub fn projection_coefficient(
    inst: &PerturbationInstance,
    j: usize,
    n: usize,
    method: CoefficientMethod,
) -> Result<Mat> {
    let model = inst.base();
    let target = model.target(j)?;
    let genfunc = || {
        let c = eigenbasis_coefficients(&target, inst.e_eigenbasis(), n, SignConvention::Standard);
        model.from_eigenbasis(&c[n])
    };
    let enumerate = || {
        enumerative_coefficient(model, &target, inst.e().as_matrix(), n, SignConvention::Standard)
    };
    match method {
        CoefficientMethod::GeneratingFunction => Ok(genfunc()),
        CoefficientMethod::Enumerative => Ok(enumerate()),
        CoefficientMethod::CrossChecked => {
            let g = genfunc();
            if n <= N_ENUM_MAX {
                let en = enumerate();
                let dp = delta_for_target(&target, inst.e_eigenbasis()).delta_prime;
                let scale = agreement_scale(&g, &en, dp.powi(n as i32));
                let diff = hs_norm(&(&g - &en));
                if diff > PATH_AGREEMENT_TOL * scale {
                    return Err(Error::Divergence(format!(
                        "coefficient paths disagree at n={n}: {diff:e} (scale {scale:e})"
                    )));
                }
            }
            Ok(g)
        }
    }
}

/// `P_j^{(0..=max_n)}` in the original basis.
pub fn projection_coefficients(
    inst: &PerturbationInstance,
    j: usize,
    max_n: usize,
) -> Result<Vec<Mat>> {
    let model = inst.base();
    let target = model.target(j)?;
    Ok(
        eigenbasis_coefficients(&target, inst.e_eigenbasis(), max_n, SignConvention::Standard)
            .iter()
            .map(|c| model.from_eigenbasis(c))
            .collect(),
    )
}

/// `λ^{(0..=max_n)}` from eigenbasis projection coefficients
/// `c[0..=max_n]`: `λ^{(n)} = tr(P^{(n-1)} E) + tr(P^{(n)} R^{-1})`, with `R^{-1}`
/// read as the pseudo-inverse `Σ_{k≠j} (λ_k - λ_j) P_k`.
pub fn eigenvalue_coefficients_from(target: &SpectralTarget, e: &Mat, coeffs: &[Mat]) -> Vec<f64> {
    let shift = target.pseudo_inverse_weights();
    let mut out = Vec::with_capacity(coeffs.len());
    out.push(target.center());
    for n in 1..coeffs.len() {
        let prev = &coeffs[n - 1];
        let tr_pe = prev.component_mul(&e.transpose()).sum();
        let tr_pm: f64 = (0..target.dim()).map(|k| coeffs[n][(k, k)] * shift[k]).sum();
        out.push(tr_pe + tr_pm);
    }
    out
}

pub fn series_coefficient_eigenvalue(inst: &PerturbationInstance, j: usize, n: usize) -> Result<f64> {
    let target = inst.base().target(j)?;
    let c = eigenbasis_coefficients(&target, inst.e_eigenbasis(), n, SignConvention::Standard);
    Ok(eigenvalue_coefficients_from(&target, inst.e_eigenbasis(), &c)[n])
}

/// Coefficients, partial sums and every remainder bound at order `p`.
#[derive(Debug, Clone)]
pub struct SeriesExpansion {
    pub j: usize,
    pub order: usize,
    pub delta: DeltaReport,
    pub proj_coeffs: Vec<Mat>,
    pub eval_coeffs: Vec<f64>,
    pub proj_partial_sum: Mat,
    pub eval_partial_sum: f64,
    pub bounds: BTreeMap<String, BoundValue>,
}

pub fn partial_sums(inst: &PerturbationInstance, j: usize, p: usize) -> Result<SeriesExpansion> {
    if p == 0 {
        return Err(Error::InvalidInput("series order p must be at least 1".into()));
    }
    let model = inst.base();
    let target = model.target(j)?;
    let e = inst.e_eigenbasis();
    let coeffs = eigenbasis_coefficients(&target, e, p - 1, SignConvention::Standard);
    let eval_coeffs = eigenvalue_coefficients_from(&target, e, &coeffs);
    let proj_coeffs: Vec<Mat> = coeffs.iter().map(|c| model.from_eigenbasis(c)).collect();
    let d = inst.dim();
    let proj_partial_sum = proj_coeffs.iter().fold(Mat::zeros(d, d), |acc, c| acc + c);
    let eval_partial_sum = eval_coeffs.iter().sum();
    let delta = delta_for_target(&target, e);
    let bounds = bounds::all_bounds(&delta, p, d);
    Ok(SeriesExpansion {
        j,
        order: p,
        delta,
        proj_coeffs,
        eval_coeffs,
        proj_partial_sum,
        eval_partial_sum,
        bounds,
    })
}

fn rows(m: &Mat) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Serialize)]
struct SeriesDoc<'a> {
    j: usize,
    order: usize,
    delta: &'a DeltaReport,
    proj_coeffs: Vec<Vec<Vec<f64>>>,
    eval_coeffs: &'a [f64],
    proj_partial_sum: Vec<Vec<f64>>,
    eval_partial_sum: f64,
    bounds: &'a BTreeMap<String, BoundValue>,
}

impl SeriesExpansion {
    /// JSON document: matrices as row-major nested arrays, bounds as a flat map of
    /// `{value, applicable}` records.
    pub fn to_json(&self) -> String {
        let doc = SeriesDoc {
            j: self.j,
            order: self.order,
            delta: &self.delta,
            proj_coeffs: self.proj_coeffs.iter().map(rows).collect(),
            eval_coeffs: &self.eval_coeffs,
            proj_partial_sum: rows(&self.proj_partial_sum),
            eval_partial_sum: self.eval_partial_sum,
            bounds: &self.bounds,
        };
        serde_json::to_string_pretty(&doc).expect("series serializes")
    }
}
