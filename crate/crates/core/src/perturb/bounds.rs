//! Remainder and tail bounds for truncated perturbation series.
//!
//! Every bound is reported as a [`BoundValue`]: when its precondition fails the
//! value is absent and `applicable` is false, so sweeps can count how often that
//! happens instead of aborting.

use std::collections::BTreeMap;

use serde::Serialize;

use super::delta::{delta_for_target, DeltaReport};
use super::PerturbationInstance;
use crate::error::{Error, Result};
use crate::linalg::{hs_norm, Mat};
use crate::spectral::SpectralTarget;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: Option<f64>,
    pub applicable: bool,
}

impl BoundValue {
    pub fn of(value: f64) -> Self {
        Self {
            value: Some(value),
            applicable: true,
        }
    }

    pub fn inapplicable() -> Self {
        Self {
            value: None,
            applicable: false,
        }
    }

    fn when(cond: bool, value: impl FnOnce() -> f64) -> Self {
        if cond {
            Self::of(value())
        } else {
            Self::inapplicable()
        }
    }

    /// Whether `actual` respects the bound up to an absolute `slack`.
    /// Inapplicable bounds are vacuously respected.
    pub fn holds(&self, actual: f64, slack: f64) -> bool {
        match self.value {
            Some(v) => actual <= v + slack,
            None => true,
        }
    }
}

// `x^k` with the convention `0^0 = 1` and negative powers never requested.
fn pow(x: f64, k: usize) -> f64 {
    x.powi(k as i32)
}

/// `4 g^{-1/2} ‖P E |R|^{1/2}‖₂ (4δ′)^{p-1} / (1-2δ)²`, needs `δ < 1/2`.
pub fn thm1_projection(r: &DeltaReport, p: usize) -> BoundValue {
    BoundValue::when(p >= 1 && r.delta < 0.5, || {
        4.0 * r.coupling / r.gap.sqrt() * pow(4.0 * r.delta_prime, p - 1)
            / (1.0 - 2.0 * r.delta).powi(2)
    })
}

/// `12 ‖P E |R|^{1/2}‖₂² (4δ′)^{p-2} / (1-2δ)³`, needs `p >= 2` and `δ < 1/2`.
pub fn thm2_eigenvalue(r: &DeltaReport, p: usize) -> BoundValue {
    BoundValue::when(p >= 2 && r.delta < 0.5, || {
        12.0 * r.coupling.powi(2) * pow(4.0 * r.delta_prime, p - 2)
            / (1.0 - 2.0 * r.delta).powi(3)
    })
}

/// `4 g^{-1/2} ‖P E |R|^{1/2}‖₂ (4δ′)^{p-1} / (1-4δ′)`, needs `δ′ < 1/4`.
pub fn cor2_projection(r: &DeltaReport, p: usize) -> BoundValue {
    BoundValue::when(p >= 1 && r.delta_prime < 0.25, || {
        4.0 * r.coupling / r.gap.sqrt() * pow(4.0 * r.delta_prime, p - 1)
            / (1.0 - 4.0 * r.delta_prime)
    })
}

/// `(4δ′)^p / (1-4δ′)`.
pub fn cor2_projection_simple(r: &DeltaReport, p: usize) -> BoundValue {
    BoundValue::when(p >= 1 && r.delta_prime < 0.25, || {
        pow(4.0 * r.delta_prime, p) / (1.0 - 4.0 * r.delta_prime)
    })
}

/// `8 ‖P E |R|^{1/2}‖₂² (4δ′)^{p-2} / (1-4δ′)`, needs `p >= 2` and `δ′ < 1/4`.
pub fn cor2_eigenvalue(r: &DeltaReport, p: usize) -> BoundValue {
    BoundValue::when(p >= 2 && r.delta_prime < 0.25, || {
        8.0 * r.coupling.powi(2) * pow(4.0 * r.delta_prime, p - 2) / (1.0 - 4.0 * r.delta_prime)
    })
}

/// `g (4δ′)^p / (1-4δ′)`.
pub fn cor2_eigenvalue_simple(r: &DeltaReport, p: usize) -> BoundValue {
    BoundValue::when(p >= 2 && r.delta_prime < 0.25, || {
        r.gap * pow(4.0 * r.delta_prime, p) / (1.0 - 4.0 * r.delta_prime)
    })
}

/// Contour-integral bound `2 (2δ)^p / (1-2δ)`, needs `δ < 1/2`.
pub fn hfc_projection(r: &DeltaReport, p: usize) -> BoundValue {
    BoundValue::when(p >= 1 && r.delta < 0.5, || {
        2.0 * pow(2.0 * r.delta, p) / (1.0 - 2.0 * r.delta)
    })
}

/// Contour-integral bound `C g (2δ)^p / (1-2δ)` with `C = 1` at `p = 1` and
/// `C = 2d` otherwise.
pub fn hfc_eigenvalue(r: &DeltaReport, p: usize, dim: usize) -> BoundValue {
    let c = if p == 1 { 1.0 } else { 2.0 * dim as f64 };
    BoundValue::when(p >= 1 && r.delta < 0.5, || {
        c * r.gap * pow(2.0 * r.delta, p) / (1.0 - 2.0 * r.delta)
    })
}

pub const BOUND_NAMES: [&str; 8] = [
    "thm1",
    "thm2",
    "cor2_proj",
    "cor2_proj_simple",
    "cor2_eval",
    "cor2_eval_simple",
    "hfc_proj",
    "hfc_eval",
];

pub fn all_bounds(r: &DeltaReport, p: usize, dim: usize) -> BTreeMap<String, BoundValue> {
    let values = [
        thm1_projection(r, p),
        thm2_eigenvalue(r, p),
        cor2_projection(r, p),
        cor2_projection_simple(r, p),
        cor2_eigenvalue(r, p),
        cor2_eigenvalue_simple(r, p),
        hfc_projection(r, p),
        hfc_eigenvalue(r, p, dim),
    ];
    BOUND_NAMES
        .iter()
        .zip(values)
        .map(|(n, v)| (n.to_string(), v))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionRemainderBounds {
    pub thm1: f64,
    pub cor2: BoundValue,
    pub cor2_simple: BoundValue,
    pub hfc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenvalueRemainderBounds {
    pub thm2: BoundValue,
    pub cor2: BoundValue,
    pub cor2_simple: BoundValue,
    pub hfc: f64,
}

fn require_half(r: &DeltaReport, bound: &'static str) -> Result<()> {
    if r.delta < 0.5 {
        Ok(())
    } else {
        Err(Error::Inapplicable {
            bound,
            reason: format!("delta = {} >= 1/2", r.delta),
        })
    }
}

pub fn remainder_bound_projection(
    inst: &PerturbationInstance,
    j: usize,
    p: usize,
) -> Result<ProjectionRemainderBounds> {
    if p == 0 {
        return Err(Error::InvalidInput("series order p must be at least 1".into()));
    }
    let r = super::delta(inst, j)?;
    require_half(&r, "projection remainder bound")?;
    Ok(ProjectionRemainderBounds {
        thm1: thm1_projection(&r, p).value.expect("delta < 1/2"),
        cor2: cor2_projection(&r, p),
        cor2_simple: cor2_projection_simple(&r, p),
        hfc: hfc_projection(&r, p).value.expect("delta < 1/2"),
    })
}

pub fn remainder_bound_eigenvalue(
    inst: &PerturbationInstance,
    j: usize,
    p: usize,
) -> Result<EigenvalueRemainderBounds> {
    if p == 0 {
        return Err(Error::InvalidInput("series order p must be at least 1".into()));
    }
    let r = super::delta(inst, j)?;
    require_half(&r, "eigenvalue remainder bound")?;
    Ok(EigenvalueRemainderBounds {
        thm2: thm2_eigenvalue(&r, p),
        cor2: cor2_eigenvalue(&r, p),
        cor2_simple: cor2_eigenvalue_simple(&r, p),
        hfc: hfc_eigenvalue(&r, p, inst.dim())
            .value
            .expect("delta < 1/2"),
    })
}

/// `|λ̂_j - λ_j| <= ‖P E P‖₂ + C ‖P E |R|^{1/2}‖₂²`, reported term by term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoTermBound {
    pub linear: f64,
    pub quadratic: f64,
    pub c: f64,
    pub total: f64,
}

pub fn eigenvalue_two_term_bound(
    inst: &PerturbationInstance,
    j: usize,
    eps: f64,
    c: f64,
) -> Result<TwoTermBound> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidInput(format!("margin eps = {eps} not in (0, 1/2)")));
    }
    let r = super::delta(inst, j)?;
    if r.delta > 0.5 - eps {
        return Err(Error::Inapplicable {
            bound: "two-term eigenvalue bound",
            reason: format!("delta = {} > 1/2 - {eps}", r.delta),
        });
    }
    let linear = r.norm_pp * r.gap;
    let quadratic = r.coupling.powi(2);
    Ok(TwoTermBound {
        linear,
        quadratic,
        c,
        total: linear + c * quadratic,
    })
}

/// Largest truncation tried for the infinite sum `Σ_m ‖(R E)^m P‖₂`.
pub const MAX_SERIES_TERMS: usize = 60;
pub const SERIES_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantityPair {
    pub series: f64,
    pub delta_prime_pow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionDistanceBounds {
    /// `Σ_{m=1}^{M} ‖(R_j E)^m P_j‖₂`.
    pub series_sum: f64,
    pub terms_used: usize,
    pub tail_estimate: f64,
    /// `‖(R_j E)^m P_j‖₂` for `m = 1..=M`.
    pub term_norms: Vec<f64>,
    /// `(Σ_{m<p} ‖(R_j E)^m P_j‖₂, δ′^p)`
    pub sum_of_norms: QuantityPair,
    /// `(‖Σ_{m<p} (R_j E)^m P_j‖₂, δ′^p)`
    pub norm_of_sum: QuantityPair,
}

/// `(R E)^m P` restricted to the target's columns, in the eigenbasis.
fn resolvent_powers(target: &SpectralTarget, e: &Mat, count: usize) -> Vec<Mat> {
    let res = target.resolvent_weights();
    let d = target.dim();
    let mut cur = Mat::zeros(d, target.rank());
    for (c, &k) in target.members().iter().enumerate() {
        cur[(k, c)] = 1.0;
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut next = e * &cur;
        for (i, mut row) in next.row_iter_mut().enumerate() {
            row *= res[i];
        }
        out.push(next.clone());
        cur = next;
    }
    out
}

pub fn projection_distance_bounds(
    inst: &PerturbationInstance,
    j: usize,
    p: usize,
) -> Result<ProjectionDistanceBounds> {
    let target = inst.base().target(j)?;
    let e = inst.e_eigenbasis();
    let dp = delta_for_target(&target, e).delta_prime;
    let terms = resolvent_powers(&target, e, MAX_SERIES_TERMS + 1);
    let norms: Vec<f64> = terms.iter().map(hs_norm).collect();

    let mut used = None;
    let mut tail_estimate = 0.0;
    let mut partial = 0.0;
    for m in 0..MAX_SERIES_TERMS {
        partial += norms[m];
        let next = norms[m + 1];
        if next == 0.0 {
            used = Some(m + 1);
            break;
        }
        let ratio = next / norms[m];
        if ratio < 1.0 {
            let tail = next / (1.0 - ratio);
            if tail < SERIES_TAIL_TOL * partial.max(f64::MIN_POSITIVE) || tail < SERIES_TAIL_TOL {
                used = Some(m + 1);
                tail_estimate = tail;
                break;
            }
        }
    }
    let m = used.ok_or_else(|| {
        Error::Divergence(format!(
            "sum of ||(R E)^m P|| has not settled after {MAX_SERIES_TERMS} terms"
        ))
    })?;

    let head = p.saturating_sub(1).min(terms.len());
    let sum_norms: f64 = norms[..head].iter().sum();
    let norm_sum = if head == 0 {
        0.0
    } else {
        hs_norm(&terms[..head].iter().fold(Mat::zeros(terms[0].nrows(), terms[0].ncols()), |a, t| a + t))
    };
    let dpp = pow(dp, p);
    Ok(ProjectionDistanceBounds {
        series_sum: norms[..m].iter().sum(),
        terms_used: m,
        tail_estimate,
        term_norms: norms[..m].to_vec(),
        sum_of_norms: QuantityPair {
            series: sum_norms,
            delta_prime_pow: dpp,
        },
        norm_of_sum: QuantityPair {
            series: norm_sum,
            delta_prime_pow: dpp,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SymmetricMatrix;

    fn two_by_two() -> PerturbationInstance {
        PerturbationInstance::new(
            SymmetricMatrix::diagonal(&[2.0, 1.0]).unwrap(),
            SymmetricMatrix::from_rows(&[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn two_by_two_bound_values() {
        let inst = two_by_two();
        let pb = remainder_bound_projection(&inst, 1, 1).unwrap();
        assert!((pb.thm1 - 0.625).abs() < 1e-14);
        let eb = remainder_bound_eigenvalue(&inst, 1, 2).unwrap();
        assert!((eb.thm2.value.unwrap() - 0.234375).abs() < 1e-14);
        let eb3 = remainder_bound_eigenvalue(&inst, 1, 3).unwrap();
        assert!((eb3.thm2.value.unwrap() - 0.09375).abs() < 1e-14);
        assert!(!remainder_bound_eigenvalue(&inst, 1, 1).unwrap().thm2.applicable);
    }

    #[test]
    fn zero_perturbation_gives_zero_bounds() {
        let inst = two_by_two().with_scaled_perturbation(0.0);
        let pb = remainder_bound_projection(&inst, 1, 3).unwrap();
        assert_eq!(pb.thm1, 0.0);
        assert_eq!(pb.hfc, 0.0);
        assert_eq!(pb.cor2_simple.value, Some(0.0));
        let eb = remainder_bound_eigenvalue(&inst, 2, 2).unwrap();
        assert_eq!(eb.thm2.value, Some(0.0));
        let t = eigenvalue_two_term_bound(&inst, 1, 0.1, 5.0).unwrap();
        assert_eq!((t.linear, t.quadratic), (0.0, 0.0));
        let pd = projection_distance_bounds(&inst, 1, 3).unwrap();
        assert_eq!(pd.series_sum, 0.0);
        assert_eq!(pd.norm_of_sum.series, 0.0);
    }

    #[test]
    fn large_delta_is_inapplicable() {
        let inst = two_by_two().with_scaled_perturbation(6.0);
        assert!((super::super::delta(&inst, 1).unwrap().delta - 0.6).abs() < 1e-14);
        assert!(matches!(
            remainder_bound_projection(&inst, 1, 2),
            Err(Error::Inapplicable { .. })
        ));
        assert!(matches!(
            remainder_bound_eigenvalue(&inst, 1, 2),
            Err(Error::Inapplicable { .. })
        ));
        let r = super::super::delta(&inst, 1).unwrap();
        assert!(all_bounds(&r, 3, 2).values().all(|b| !b.applicable));
    }

    #[test]
    fn two_term_components() {
        let t = eigenvalue_two_term_bound(&two_by_two(), 1, 0.1, 1.0).unwrap();
        assert_eq!(t.linear, 0.0);
        assert!((t.quadratic - 0.01).abs() < 1e-15);

        let sigma = SymmetricMatrix::diagonal(&[3.0, 2.0, 0.5]).unwrap();
        let e = SymmetricMatrix::diagonal(&[0.0, 0.2, 0.0]).unwrap();
        let inst = PerturbationInstance::new(sigma, e).unwrap();
        let t = eigenvalue_two_term_bound(&inst, 2, 0.1, 1.0).unwrap();
        assert!((t.linear - 0.2).abs() < 1e-15);
        assert_eq!(t.quadratic, 0.0);
        assert!(eigenvalue_two_term_bound(&inst, 2, 0.35, 1.0).is_err());
    }

    #[test]
    fn projection_distance_on_two_by_two() {
        let pd = projection_distance_bounds(&two_by_two(), 1, 3).unwrap();
        assert_eq!(pd.terms_used, 1);
        assert!((pd.term_norms[0] - 0.1).abs() < 1e-15);
        assert!((pd.series_sum - 0.1).abs() < 1e-15);
        assert!((pd.sum_of_norms.series - 0.1).abs() < 1e-15);
        assert!((pd.sum_of_norms.delta_prime_pow - 1e-3).abs() < 1e-17);
    }

    #[test]
    fn projection_distance_contains_first_term() {
        let sigma = SymmetricMatrix::diagonal(&[2.0, 1.2, 0.3]).unwrap();
        let e = SymmetricMatrix::from_rows(&[
            vec![0.01, 0.05, 0.02],
            vec![0.05, -0.03, 0.04],
            vec![0.02, 0.04, 0.02],
        ])
        .unwrap();
        let inst = PerturbationInstance::new(sigma, e).unwrap();
        for j in 1..=3 {
            let pd = projection_distance_bounds(&inst, j, 4).unwrap();
            assert!(pd.series_sum >= pd.term_norms[0]);
            assert!(pd.tail_estimate < 1e-12);
            assert!(pd.norm_of_sum.series <= pd.sum_of_norms.series + 1e-15);
        }
    }

    #[test]
    fn non_contracting_series_is_refused() {
        let sigma = SymmetricMatrix::diagonal(&[1.0, 0.9, 0.0]).unwrap();
        let e = SymmetricMatrix::from_rows(&[
            vec![0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.5],
            vec![0.5, 0.5, 0.0],
        ])
        .unwrap();
        let inst = PerturbationInstance::new(sigma, e).unwrap();
        assert!(matches!(
            projection_distance_bounds(&inst, 1, 2),
            Err(Error::Divergence(_))
        ));
    }
}
