//! Relative eigenvalue and eigenprojection errors across `j` for exponential
//! decay, against the reference curves `1/√n + j/n` and `j^{1-α}/√n`.

use std::fmt::Write as _;

use serde::Serialize;

use super::decay::DecayModel;
use super::montecarlo::{mc_eigen_error, MonteCarloSummary};
use super::sampler::{Distribution, SamplerSpec};
use crate::config::KeyValues;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub d: usize,
    pub n: usize,
    pub m_replicates: usize,
    pub dist: Distribution,
    pub seed: u64,
    pub j_min: usize,
    pub j_max: usize,
    pub out_of_assumption: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            d: 40,
            n: 500,
            m_replicates: 300,
            dist: Distribution::Gaussian,
            seed: 0,
            j_min: 3,
            j_max: 20,
            out_of_assumption: false,
        }
    }
}

impl ExperimentConfig {
    pub const KEYS: [&'static str; 9] = [
        "alpha",
        "d",
        "n",
        "m_replicates",
        "dist",
        "seed",
        "j_min",
        "j_max",
        "out_of_assumption",
    ];

    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        kv.expect_keys(&Self::KEYS)?;
        let d = Self::default();
        let cfg = Self {
            alpha: kv.get_or("alpha", d.alpha)?,
            d: kv.get_or("d", d.d)?,
            n: kv.get_or("n", d.n)?,
            m_replicates: kv.get_or("m_replicates", d.m_replicates)?,
            dist: kv.get_or("dist", d.dist)?,
            seed: kv.get_or("seed", d.seed)?,
            j_min: kv.get_or("j_min", d.j_min)?,
            j_max: kv.get_or("j_max", d.j_max)?,
            out_of_assumption: kv.get_or("out_of_assumption", d.out_of_assumption)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Parse(format!("alpha = {} not in (0, 1]", self.alpha)));
        }
        if self.d < 2 || self.n == 0 || self.m_replicates < 2 {
            return Err(Error::Parse("need d >= 2, n >= 1 and m_replicates >= 2".into()));
        }
        if self.j_min == 0 || self.j_min > self.j_max || self.j_max > self.d - 1 {
            return Err(Error::Parse(format!(
                "j range {}..={} not within 1..={}",
                self.j_min,
                self.j_max,
                self.d - 1
            )));
        }
        if !self.dist.is_sub_gaussian() && !self.out_of_assumption {
            return Err(Error::Parse(format!(
                "dist = {} needs out_of_assumption = true",
                self.dist
            )));
        }
        Ok(())
    }

    pub fn j_range(&self) -> Vec<usize> {
        (self.j_min..=self.j_max).collect()
    }

    pub fn sampler(&self) -> SamplerSpec {
        SamplerSpec {
            distribution: self.dist,
            n: self.n,
            seed: self.seed,
            out_of_assumption: self.out_of_assumption,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRow {
    pub j: usize,
    pub rel_ev_err: f64,
    pub proj_err: f64,
    pub ref_ev: f64,
    pub ref_proj: f64,
    pub ratio_ev: f64,
    pub ratio_proj: f64,
    pub p_delta_gt_quarter: f64,
    pub se_rel_ev_err: f64,
    pub se_proj_err: f64,
}

pub const PHASE_CSV_HEADER: &str = "j,rel_ev_err,proj_err,ref_ev,ref_proj,ratio_ev,ratio_proj,p_delta_gt_quarter,se_rel_ev_err,se_proj_err";

/// `1/√n + j/n`
pub fn reference_eigenvalue(j: usize, n: usize) -> f64 {
    let n = n as f64;
    1.0 / n.sqrt() + j as f64 / n
}

/// `j^{1-α}/√n`
pub fn reference_projection(j: usize, n: usize, alpha: f64) -> f64 {
    (j as f64).powf(1.0 - alpha) / (n as f64).sqrt()
}

/// A single constant `C` with every value in `[C/factor, C·factor]` (or not).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandFit {
    pub c: f64,
    pub factor: f64,
    pub min: f64,
    pub max: f64,
    pub within: bool,
}

impl BandFit {
    /// Geometric midpoint `C = √(min·max)`, the choice that makes the band
    /// condition hold whenever any single constant can.
    pub fn fitted(values: &[f64], factor: f64) -> Self {
        let (min, max) = min_max(values);
        Self::around((min * max).sqrt(), values, factor)
    }

    pub fn around(c: f64, values: &[f64], factor: f64) -> Self {
        let (min, max) = min_max(values);
        Self {
            c,
            factor,
            min,
            max,
            within: !values.is_empty() && min >= c / factor && max <= c * factor,
        }
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Least-squares slope of `y` against `x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTable {
    pub config: ExperimentConfig,
    /// Share of the untruncated trace discarded by keeping `d` coordinates.
    pub truncation_tail: f64,
    pub weyl_violations: usize,
    pub rows: Vec<PhaseRow>,
}

impl PhaseTable {
    pub fn eigenvalue_band(&self, factor: f64) -> BandFit {
        let r: Vec<f64> = self.rows.iter().map(|r| r.ratio_ev).collect();
        BandFit::fitted(&r, factor)
    }

    /// Band around the mean projector ratio.
    pub fn projection_band(&self, factor: f64) -> BandFit {
        let r: Vec<f64> = self.rows.iter().map(|r| r.ratio_proj).collect();
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        BandFit::around(mean, &r, factor)
    }

    pub fn row(&self, j: usize) -> Option<&PhaseRow> {
        self.rows.iter().find(|r| r.j == j)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(PHASE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.j,
                r.rel_ev_err,
                r.proj_err,
                r.ref_ev,
                r.ref_proj,
                r.ratio_ev,
                r.ratio_proj,
                r.p_delta_gt_quarter,
                r.se_rel_ev_err,
                r.se_proj_err
            );
        }
        out
    }

    /// One plain `j value` file body per curve.
    pub fn gnuplot_curves(&self) -> Vec<(&'static str, String)> {
        let curve = |f: fn(&PhaseRow) -> f64| {
            self.rows.iter().fold(String::new(), |mut s, r| {
                let _ = writeln!(s, "{} {}", r.j, f(r));
                s
            })
        };
        vec![
            ("rel_ev_err", curve(|r| r.rel_ev_err)),
            ("proj_err", curve(|r| r.proj_err)),
            ("ref_ev", curve(|r| r.ref_ev)),
            ("ref_proj", curve(|r| r.ref_proj)),
        ]
    }
}

pub fn phase_table_from(cfg: &ExperimentConfig, model: &DecayModel, mc: &MonteCarloSummary) -> PhaseTable {
    let rows = mc
        .rows
        .iter()
        .map(|m| {
            let ref_ev = reference_eigenvalue(m.j, cfg.n);
            let ref_proj = reference_projection(m.j, cfg.n, cfg.alpha);
            PhaseRow {
                j: m.j,
                rel_ev_err: m.rel_err.rms,
                proj_err: m.proj_err.rms,
                ref_ev,
                ref_proj,
                ratio_ev: m.rel_err.rms / ref_ev,
                ratio_proj: m.proj_err.rms / ref_proj,
                p_delta_gt_quarter: m.p_delta_gt_quarter,
                se_rel_ev_err: m.rel_err.se,
                se_proj_err: m.proj_err.se,
            }
        })
        .collect();
    PhaseTable {
        config: cfg.clone(),
        truncation_tail: model.truncation_tail(),
        weyl_violations: mc.weyl_violations,
        rows,
    }
}

pub fn phase_transition_experiment(cfg: &ExperimentConfig) -> Result<PhaseTable> {
    cfg.validate()?;
    let model = DecayModel::exponential(cfg.alpha, cfg.d)?;
    let mc = mc_eigen_error(&model, &cfg.sampler(), &cfg.j_range(), cfg.m_replicates)?;
    Ok(phase_table_from(cfg, &model, &mc))
}
