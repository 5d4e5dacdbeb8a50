//! The weighted perturbation size `δ_j = ‖W_j E W_j‖_∞` and its block-wise
//! companion `δ′_j`.

use serde::Serialize;

use super::PerturbationInstance;
use crate::error::Result;
use crate::linalg::{diag_sandwich, hs_norm, op_norm, sym_op_norm, Mat};
use crate::spectral::SpectralTarget;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaReport {
    pub j: usize,
    pub gap: f64,
    pub delta: f64,
    pub delta_prime: f64,
    /// `‖|R|^{1/2} E |R|^{1/2}‖_∞`
    pub norm_rr: f64,
    /// `g^{-1/2} ‖|R|^{1/2} E P‖₂`
    pub norm_rp: f64,
    /// `g^{-1} ‖P E P‖₂`
    pub norm_pp: f64,
    /// `‖P E |R|^{1/2}‖₂`, the unnormalised coupling that leads every remainder bound.
    pub coupling: f64,
    /// `‖E‖_∞`
    pub e_norm: f64,
}

impl DeltaReport {
    pub fn is_zero(&self) -> bool {
        self.delta == 0.0
    }
}

pub fn delta(inst: &PerturbationInstance, j: usize) -> Result<DeltaReport> {
    let target = inst.base().target(j)?;
    Ok(delta_for_target(&target, inst.e_eigenbasis()))
}

/// `δ` for an arbitrary target, with `e` given in the target's eigenbasis.
pub fn delta_for_target(target: &SpectralTarget, e: &Mat) -> DeltaReport {
    let g = target.gap();
    let w = target.weight_weights();
    let half = target.abs_resolvent_sqrt_weights();
    let proj = target.projector_weights();

    let delta = sym_op_norm(&diag_sandwich(&w, e, &w));
    let norm_rr = sym_op_norm(&diag_sandwich(&half, e, &half));
    let coupling = hs_norm(&diag_sandwich(&proj, e, &half));
    let norm_rp = coupling / g.sqrt();
    let norm_pp = hs_norm(&diag_sandwich(&proj, e, &proj)) / g;
    DeltaReport {
        j: target.label(),
        gap: g,
        delta,
        delta_prime: norm_rr.max(norm_rp).max(norm_pp),
        norm_rr,
        norm_rp,
        norm_pp,
        coupling,
        e_norm: op_norm(e),
    }
}
