//! Randomized verification sweeps: random instances at prescribed `δ_j`, every
//! applicable check, one row per check.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::exact::exact_perturbed;
use super::verify::{
    verify_basic_identity, verify_coefficient_bounds, verify_separation, verify_series_bounds,
    verify_term_bounds, verify_weighted_projection_bound, CheckReport,
};
use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::matrix::SymmetricMatrix;
use crate::perturb::{delta, PerturbationInstance};
use crate::spectral::SpectralModel;

/// A Haar-distributed orthogonal matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Mat {
    let g = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}

/// `(G + Gᵀ)/√2` with i.i.d. standard normal `G`.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, d: usize) -> SymmetricMatrix {
    let g: Mat = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    SymmetricMatrix::symmetrize((&g + g.transpose()) / std::f64::consts::SQRT_2)
        .expect("finite gaussian matrix")
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub inst: PerturbationInstance,
    pub j: usize,
    pub delta_target: f64,
}

/// Sorted `Exp(1)` eigenvalues in a random basis, a uniformly chosen target `j`
/// whose gap is widened to at least `min_gap`, and a Gaussian symmetric
/// perturbation rescaled so that `δ_j = delta_target`.
pub fn generate_instance<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    delta_target: f64,
    min_gap: f64,
) -> Result<GeneratedInstance> {
    if dim < 2 {
        return Err(Error::InvalidInput("sweep instances need dim >= 2".into()));
    }
    let mut lam: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
    lam.sort_by(|a, b| b.partial_cmp(a).expect("finite draws"));
    let j = rng.random_range(1..=dim);
    let i = j - 1;
    if i > 0 {
        let lift = (min_gap - (lam[i - 1] - lam[i])).max(0.0);
        lam[..i].iter_mut().for_each(|l| *l += lift);
    }
    if i + 1 < dim {
        let drop = (min_gap - (lam[i] - lam[i + 1])).max(0.0);
        lam[i + 1..].iter_mut().for_each(|l| *l -= drop);
    }
    let basis = random_orthogonal(rng, dim);
    let model = SpectralModel::from_parts(lam.into(), basis)?;
    let e = random_symmetric(rng, dim);
    let inst = PerturbationInstance::from_model(model, e)?;
    let inst = rescale_to_delta(&inst, j, delta_target)?;
    Ok(GeneratedInstance {
        inst,
        j,
        delta_target,
    })
}

/// Rescales `E` so that `δ_j` equals `target` (both are 1-homogeneous in `E`).
pub fn rescale_to_delta(inst: &PerturbationInstance, j: usize, target: f64) -> Result<PerturbationInstance> {
    let current = delta(inst, j)?.delta;
    if current == 0.0 {
        return Err(Error::InvalidInput("cannot rescale a zero perturbation".into()));
    }
    Ok(inst.with_scaled_perturbation(target / current))
}

/// As [`rescale_to_delta`] for `δ′_j`.
pub fn rescale_to_delta_prime(
    inst: &PerturbationInstance,
    j: usize,
    target: f64,
) -> Result<PerturbationInstance> {
    let current = delta(inst, j)?.delta_prime;
    if current == 0.0 {
        return Err(Error::InvalidInput("cannot rescale a zero perturbation".into()));
    }
    Ok(inst.with_scaled_perturbation(target / current))
}

/// RNG for the `index`-th item of a stream seeded with `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed.wrapping_add(index))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub instances: usize,
    pub dim: usize,
    pub delta_targets: Vec<f64>,
    pub seed: u64,
    pub max_p: usize,
    pub term_max_n: usize,
    pub min_gap: f64,
    /// Test hook: shrinks one bound so that the sweep must report failures.
    pub corrupt_bound: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            instances: 1000,
            dim: 15,
            delta_targets: vec![0.05, 0.2, 0.45],
            seed: 0,
            max_p: 6,
            term_max_n: 4,
            min_gap: 0.05,
            corrupt_bound: false,
        }
    }
}

impl SweepConfig {
    pub const KEYS: [&'static str; 8] = [
        "instances",
        "dim",
        "delta_targets",
        "seed",
        "max_p",
        "term_max_n",
        "min_gap",
        "corrupt_bound",
    ];

    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        kv.expect_keys(&Self::KEYS)?;
        let d = Self::default();
        let cfg = Self {
            instances: kv.get_or("instances", d.instances)?,
            dim: kv.get_or("dim", d.dim)?,
            delta_targets: kv.get_list("delta_targets")?.unwrap_or(d.delta_targets),
            seed: kv.get_or("seed", d.seed)?,
            max_p: kv.get_or("max_p", d.max_p)?,
            term_max_n: kv.get_or("term_max_n", d.term_max_n)?,
            min_gap: kv.get_or("min_gap", d.min_gap)?,
            corrupt_bound: kv.get_or("corrupt_bound", d.corrupt_bound)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::Parse("dim must be at least 2".into()));
        }
        if self.delta_targets.is_empty() || self.delta_targets.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::Parse("delta_targets must be a non-empty list of positive values".into()));
        }
        if self.max_p == 0 || !(self.min_gap > 0.0) {
            return Err(Error::Parse("max_p and min_gap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub instance: usize,
    pub j: usize,
    pub delta_target: f64,
    pub delta: f64,
    #[serde(flatten)]
    pub report: CheckReport,
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_HEADER: &str = "instance,j,delta_target,delta,check,applicable,lhs,rhs,slack,pass";

impl SweepResult {
    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.report.failed())
    }

    pub fn failure_count(&self) -> usize {
        self.failures().count()
    }

    pub fn applicable_count(&self) -> usize {
        self.rows.iter().filter(|r| r.report.applicable).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let c = &r.report;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.instance, r.j, r.delta_target, r.delta, c.check, c.applicable, c.lhs, c.rhs, c.slack, c.pass
            );
        }
        out
    }
}

fn instance_checks(cfg: &SweepConfig, index: usize) -> Result<Vec<SweepRow>> {
    let target = cfg.delta_targets[index % cfg.delta_targets.len()];
    let mut rng = stream_rng(cfg.seed, index as u64);
    let g = generate_instance(&mut rng, cfg.dim, target, cfg.min_gap)?;
    let (inst, j) = (&g.inst, g.j);
    let exact = exact_perturbed(inst)?;

    let mut checks = verify_series_bounds(inst, j, cfg.max_p, &exact)?;
    checks.extend(verify_separation(inst, j, &exact)?);
    checks.push(verify_weighted_projection_bound(inst, j, &exact)?);
    checks.push(verify_term_bounds(inst, j, cfg.term_max_n)?);
    checks.extend(verify_coefficient_bounds(inst, j, cfg.max_p)?);
    checks.push(verify_basic_identity(inst, j, &exact)?);

    if cfg.corrupt_bound {
        for c in checks.iter_mut().filter(|c| c.check == "thm1_p1" && c.applicable) {
            *c = CheckReport::inequality(c.check.clone(), c.lhs, c.rhs * 1e-6);
        }
    }
    let d = delta(inst, j)?.delta;
    Ok(checks
        .into_iter()
        .map(|report| SweepRow {
            instance: index,
            j,
            delta_target: target,
            delta: d,
            report,
        })
        .collect())
}

/// Runs the sweep; instances are processed in parallel and collected in index order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let per: Vec<Vec<SweepRow>> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| instance_checks(cfg, i))
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        rows: per.into_iter().flatten().collect(),
    })
}
