//! Executable checks of the intermediate inequalities and identities, each
//! measured against the exact perturbed decomposition.

use serde::Serialize;

use super::exact::ExactPerturbed;
use crate::error::{Error, Result};
use crate::linalg::{binomial, for_each_composition, hs_norm, op_norm, Mat, Vector};
use crate::perturb::bounds::{self, BoundValue};
use crate::perturb::series::{eigenbasis_coefficients, eigenvalue_coefficients_from, SignConvention};
use crate::perturb::{delta_for_target, DeltaReport, PerturbationInstance};
use crate::spectral::SpectralTarget;

/// Absolute slack allowed before an inequality counts as violated.
pub const CHECK_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub applicable: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl CheckReport {
    /// `lhs <= rhs` up to [`CHECK_SLACK`].
    pub fn inequality(check: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            check: check.into(),
            applicable: true,
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: lhs <= rhs + CHECK_SLACK,
        }
    }

    pub fn inapplicable(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            applicable: false,
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            pass: true,
        }
    }

    fn bound(check: impl Into<String>, lhs: f64, b: BoundValue) -> Self {
        match b.value {
            Some(rhs) => Self::inequality(check, lhs, rhs),
            None => Self::inapplicable(check),
        }
    }

    pub fn failed(&self) -> bool {
        self.applicable && !self.pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

struct Context<'a> {
    inst: &'a PerturbationInstance,
    target: SpectralTarget,
    report: DeltaReport,
    exact: &'a ExactPerturbed,
}

impl<'a> Context<'a> {
    fn new(inst: &'a PerturbationInstance, j: usize, exact: &'a ExactPerturbed) -> Result<Self> {
        let target = inst.base().target(j)?;
        let report = delta_for_target(&target, inst.e_eigenbasis());
        Ok(Self {
            inst,
            target,
            report,
            exact,
        })
    }

    fn j(&self) -> usize {
        self.target.label()
    }

    fn lambda(&self, k: usize) -> f64 {
        self.inst.base().eigenvalues()[k - 1]
    }

    fn lambda_hat(&self, k: usize) -> f64 {
        self.exact.model().eigenvalues()[k - 1]
    }

    /// `Vᵀ` with `V = Uᵀ Û`: maps the perturbed eigenbasis into the unperturbed one.
    fn overlap(&self) -> Mat {
        self.inst.base().basis().transpose() * self.exact.model().basis()
    }

    fn projector_hat_eig(&self) -> Mat {
        let v = self.overlap();
        let c = v.column(self.j() - 1);
        c * c.transpose()
    }
}

/// `|λ̂_j - λ_j| <= δ g`, `λ̂_{j+1} - λ_{j+1} <= δ (λ_j - λ_{j+1})` and
/// `λ̂_{j-1} - λ_{j-1} >= -δ (λ_{j-1} - λ_j)`; inapplicable unless `δ < 1/2`.
pub fn verify_separation(
    inst: &PerturbationInstance,
    j: usize,
    exact: &ExactPerturbed,
) -> Result<Vec<CheckReport>> {
    let cx = Context::new(inst, j, exact)?;
    let names = ["separation_own", "separation_below", "separation_above"];
    let r = cx.report;
    if r.delta >= 0.5 {
        return Ok(names.iter().map(|n| CheckReport::inapplicable(*n)).collect());
    }
    let d = inst.dim();
    let own = CheckReport::inequality(
        names[0],
        (cx.lambda_hat(j) - cx.lambda(j)).abs(),
        r.delta * r.gap,
    );
    let below = if j < d {
        CheckReport::inequality(
            names[1],
            cx.lambda_hat(j + 1) - cx.lambda(j + 1),
            r.delta * (cx.lambda(j) - cx.lambda(j + 1)),
        )
    } else {
        CheckReport::inapplicable(names[1])
    };
    let above = if j > 1 {
        CheckReport::inequality(
            names[2],
            cx.lambda(j - 1) - cx.lambda_hat(j - 1),
            r.delta * (cx.lambda(j - 1) - cx.lambda(j)),
        )
    } else {
        CheckReport::inapplicable(names[2])
    };
    Ok(vec![own, below, above])
}

/// `‖|R_j|^{-1/2} P̂_j‖₂ <= ‖|R_j|^{1/2} E P_j‖₂ / (1 - 2δ_j)`.
pub fn verify_weighted_projection_bound(
    inst: &PerturbationInstance,
    j: usize,
    exact: &ExactPerturbed,
) -> Result<CheckReport> {
    let cx = Context::new(inst, j, exact)?;
    let r = cx.report;
    if r.delta >= 0.5 {
        return Ok(CheckReport::inapplicable("weighted_projection"));
    }
    let w = cx.target.abs_resolvent_inv_sqrt_weights();
    let v = cx.overlap();
    let c = v.column(j - 1);
    let lhs = c.component_mul(&w).norm();
    Ok(CheckReport::inequality(
        "weighted_projection",
        lhs,
        r.coupling / (1.0 - 2.0 * r.delta),
    ))
}

/// Every composition term of `P_j^{(n)}`-type products with `k_1 + ⋯ + k_{n+1} = m`
/// against `g^{n-m} δ′^n`, for `1 <= n <= max_n` and `0 <= m <= n + 1`.
/// Returns the worst term (smallest slack relative to its bound).
///
/// Terms containing a `-P_j` factor have rank at most one and are measured in the
/// Hilbert-Schmidt norm. Terms without one (only possible for `m > n`) are
/// measured in the operator norm: their Hilbert-Schmidt norm can exceed the bound.
pub fn verify_term_bounds(
    inst: &PerturbationInstance,
    j: usize,
    max_n: usize,
) -> Result<CheckReport> {
    let target = inst.base().target(j)?;
    let r = delta_for_target(&target, inst.e_eigenbasis());
    let e = inst.e_eigenbasis();
    let res = target.resolvent_weights();
    let mut worst: Option<CheckReport> = None;
    let mut worst_ratio = f64::NEG_INFINITY;
    for n in 1..=max_n {
        for m in 0..=n + 1 {
            let factors: Vec<Vector> = (0..=m)
                .map(|k| {
                    if k == 0 {
                        -target.projector_weights()
                    } else {
                        res.map(|c| c.powi(k as i32))
                    }
                })
                .collect();
            let rhs = r.gap.powi(n as i32 - m as i32) * r.delta_prime.powi(n as i32);
            for_each_composition(m, n + 1, |ks| {
                let mut prod = Mat::from_diagonal(&factors[ks[0]]);
                for &k in &ks[1..] {
                    prod *= e;
                    for (c, mut col) in prod.column_iter_mut().enumerate() {
                        col *= factors[k][c];
                    }
                }
                let lhs = if ks.contains(&0) { hs_norm(&prod) } else { op_norm(&prod) };
                let ratio = if rhs > 0.0 { (lhs - rhs) / rhs } else { lhs };
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst = Some(CheckReport::inequality("term_bound", lhs, rhs));
                }
            });
        }
    }
    Ok(worst.unwrap_or_else(|| CheckReport::inapplicable("term_bound")))
}

/// `‖P_j^{(n)}‖₂ <= g^{-1/2} ‖P_j E |R_j|^{1/2}‖₂ 4^n δ′^{n-1}` for `1 <= n <= max_n`.
pub fn verify_coefficient_bounds(
    inst: &PerturbationInstance,
    j: usize,
    max_n: usize,
) -> Result<Vec<CheckReport>> {
    let target = inst.base().target(j)?;
    let r = delta_for_target(&target, inst.e_eigenbasis());
    let coeffs = eigenbasis_coefficients(&target, inst.e_eigenbasis(), max_n, SignConvention::Standard);
    Ok((1..=max_n)
        .map(|n| {
            let rhs = r.coupling / r.gap.sqrt()
                * 4f64.powi(n as i32)
                * r.delta_prime.powi(n as i32 - 1);
            CheckReport::inequality(format!("coefficient_bound_n{n}"), hs_norm(&coeffs[n]), rhs)
        })
        .collect())
}

/// Largest residual of `(λ̂_j - λ_k) P_k P̂_j = P_k E P̂_j` over `k ≠ j`.
pub fn basic_identity_residual(
    inst: &PerturbationInstance,
    j: usize,
    exact: &ExactPerturbed,
) -> Result<f64> {
    let cx = Context::new(inst, j, exact)?;
    let ph = cx.projector_hat_eig();
    let eph = inst.e_eigenbasis() * &ph;
    let lh = cx.lambda_hat(j);
    let mut worst = 0.0_f64;
    for k in 0..inst.dim() {
        if k == j - 1 {
            continue;
        }
        let lhs = ph.row(k) * (lh - cx.lambda(k + 1));
        let res = (lhs - eph.row(k)).norm();
        worst = worst.max(res);
    }
    Ok(worst)
}

pub fn verify_basic_identity(
    inst: &PerturbationInstance,
    j: usize,
    exact: &ExactPerturbed,
) -> Result<CheckReport> {
    Ok(CheckReport::inequality(
        "basic_identity",
        basic_identity_residual(inst, j, exact)?,
        0.0,
    ))
}

/// Remainder bounds at orders `1..=max_p`
/// against the exact truncation errors.
pub fn verify_series_bounds(
    inst: &PerturbationInstance,
    j: usize,
    max_p: usize,
    exact: &ExactPerturbed,
) -> Result<Vec<CheckReport>> {
    let cx = Context::new(inst, j, exact)?;
    let r = cx.report;
    let e = inst.e_eigenbasis();
    let coeffs = eigenbasis_coefficients(&cx.target, e, max_p, SignConvention::Standard);
    let evals = eigenvalue_coefficients_from(&cx.target, e, &coeffs);
    let ph = cx.projector_hat_eig();
    let lh = cx.lambda_hat(j);
    let d = inst.dim();
    let mut out = Vec::new();
    let mut psum = Mat::zeros(d, d);
    let mut lsum = 0.0;
    for p in 1..=max_p {
        psum += &coeffs[p - 1];
        lsum += evals[p - 1];
        let perr = hs_norm(&(&ph - &psum));
        let lerr = (lh - lsum).abs();
        out.push(CheckReport::bound(format!("thm1_p{p}"), perr, bounds::thm1_projection(&r, p)));
        out.push(CheckReport::bound(format!("thm2_p{p}"), lerr, bounds::thm2_eigenvalue(&r, p)));
        out.push(CheckReport::bound(format!("cor2_proj_p{p}"), perr, bounds::cor2_projection(&r, p)));
        out.push(CheckReport::bound(
            format!("cor2_proj_simple_p{p}"),
            perr,
            bounds::cor2_projection_simple(&r, p),
        ));
        out.push(CheckReport::bound(format!("cor2_eval_p{p}"), lerr, bounds::cor2_eigenvalue(&r, p)));
        out.push(CheckReport::bound(
            format!("cor2_eval_simple_p{p}"),
            lerr,
            bounds::cor2_eigenvalue_simple(&r, p),
        ));
        out.push(CheckReport::bound(format!("hfc_proj_p{p}"), perr, bounds::hfc_projection(&r, p)));
        out.push(CheckReport::bound(
            format!("hfc_eval_p{p}"),
            lerr,
            bounds::hfc_eigenvalue(&r, p, d),
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RemainderIdentityReport {
    pub p: usize,
    pub truncation: usize,
    pub discrepancy: f64,
    pub tail_estimate: f64,
    pub lhs_norm: f64,
    pub pass: bool,
}

/// Largest truncation accepted by [`verify_remainder_identity`].
pub const DEFAULT_TRUNCATION: usize = 40;

/// Compares `P̂_j - Σ_{n<p} P_j^{(n)}` with the explicit remainder series
/// `(-1)^{p-1} Σ_{k_1..k_p} R^{(k_1)} E ⋯ R^{(k_p)} E R̂^{(p - Σk)}`, truncated to
/// `Σk <= K`.
///
/// The truncated tail is estimated by `C(K+p, p-1) δ^{K+1} / (1-δ)` times the
/// size of the leading term `‖P_j E |R_j|^{1/2}‖₂ g^{-1/2}`, which dominates the
/// discarded terms when `δ_j < 1/2`.
pub fn verify_remainder_identity(
    inst: &PerturbationInstance,
    j: usize,
    p: usize,
    k_max: usize,
    exact: &ExactPerturbed,
) -> Result<RemainderIdentityReport> {
    if p == 0 {
        return Err(Error::InvalidInput("remainder identity needs p >= 1".into()));
    }
    let cx = Context::new(inst, j, exact)?;
    let r = cx.report;
    if r.delta >= 0.5 {
        return Err(Error::Inapplicable {
            bound: "remainder identity",
            reason: format!("delta = {} >= 1/2", r.delta),
        });
    }
    let d = inst.dim();
    let e = inst.e_eigenbasis();
    let target = &cx.target;

    let coeffs = eigenbasis_coefficients(target, e, p - 1, SignConvention::Standard);
    let ph = cx.projector_hat_eig();
    let lhs = coeffs.iter().fold(ph.clone(), |acc, c| acc - c);

    // T_s = [z^s] (S(z) E)^p with S(z) = -P + Σ_k z^k R^k, in the eigenbasis.
    let res = target.resolvent_weights();
    let s: Vec<Vector> = (0..=k_max)
        .map(|k| {
            if k == 0 {
                -target.projector_weights()
            } else {
                res.map(|c| c.powi(k as i32))
            }
        })
        .collect();
    let se: Vec<Mat> = s
        .iter()
        .map(|w| {
            let mut m = e.clone();
            for (i, mut row) in m.row_iter_mut().enumerate() {
                row *= w[i];
            }
            m
        })
        .collect();
    let mut t = se.clone();
    for _ in 1..p {
        let mut next = vec![Mat::zeros(d, d); k_max + 1];
        for (m, slot) in next.iter_mut().enumerate() {
            for a in 0..=m {
                *slot += &t[a] * &se[m - a];
            }
        }
        t = next;
    }

    // R̂^{(k)} in the unperturbed eigenbasis.
    let v = cx.overlap();
    let lh = cx.lambda_hat(j);
    let shift = lh - cx.lambda(j);
    let lam = cx.lambda(j);
    let rhat_weights = Vector::from_iterator(
        d,
        (0..d).map(|k| {
            if k == j - 1 {
                0.0
            } else {
                1.0 / (cx.lambda_hat(k + 1) - lam)
            }
        }),
    );
    let rhat = |k: i64| -> Mat {
        if k <= 0 {
            ph.clone() * -(shift.powi((-k) as i32))
        } else {
            let w = rhat_weights.map(|c| c.powi(k as i32));
            let mut vw = v.clone();
            for (c, mut col) in vw.column_iter_mut().enumerate() {
                col *= w[c];
            }
            vw * v.transpose()
        }
    };
    let mut rhs = Mat::zeros(d, d);
    for (s_deg, ts) in t.iter().enumerate() {
        rhs += ts * rhat(p as i64 - s_deg as i64);
    }
    if p.is_multiple_of(2) {
        rhs = -rhs;
    }

    let discrepancy = hs_norm(&(&lhs - &rhs));
    let lead = 4.0 * r.coupling / r.gap.sqrt() / (1.0 - 2.0 * r.delta).powi(2);
    let tail_estimate = binomial((k_max + p) as u64, (p - 1) as u64)
        * r.delta.powi(k_max as i32 + 1)
        / (1.0 - r.delta)
        * lead.max(1.0);
    Ok(RemainderIdentityReport {
        p,
        truncation: k_max,
        discrepancy,
        tail_estimate,
        lhs_norm: hs_norm(&lhs),
        pass: discrepancy <= tail_estimate + CHECK_SLACK,
    })
}
