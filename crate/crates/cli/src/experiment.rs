use std::path::Path;

use specpert_core::config::KeyValues;
use specpert_core::lab::{phase_transition_experiment, ExperimentConfig};

use crate::exit::{Exit, CONFIG_PARSE};
use crate::manifest::Run;
use crate::Globals;

pub fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, Exit> {
    let kv = KeyValues::read(path).map_err(|e| match e {
        specpert_core::Error::Io(_) => Exit::unreadable(path, e),
        _ => Exit::new(CONFIG_PARSE, format!("{}: {e}", path.display())),
    })?;
    let mut cfg = ExperimentConfig::from_key_values(&kv)
        .map_err(|e| Exit::new(CONFIG_PARSE, format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

pub fn run(g: &Globals, config: &Path, gnuplot: bool) -> Result<u8, Exit> {
    let cfg = load_config(config, g.seed)?;
    let mut out = Run::start(g, "experiment")?;
    let table = phase_transition_experiment(&cfg)?;
    out.write("phase.csv", &table.to_csv())?;
    if gnuplot {
        for (name, body) in table.gnuplot_curves() {
            out.write(&format!("{name}.dat"), &body)?;
        }
    }

    println!(
        "alpha = {}, d = {}, n = {}, M = {}, dist = {}, seed = {}",
        cfg.alpha, cfg.d, cfg.n, cfg.m_replicates, cfg.dist, cfg.seed
    );
    println!("truncation tail {:.3e}, Weyl violations {}", table.truncation_tail, table.weyl_violations);
    println!(
        "{:>4}{:>13}{:>11}{:>13}{:>11}{:>10}{:>11}{:>9}",
        "j", "rel_ev_err", "se", "proj_err", "se", "ratio_ev", "ratio_proj", "P(d>1/4)"
    );
    for r in &table.rows {
        println!(
            "{:>4}{:>13.5e}{:>11.2e}{:>13.5e}{:>11.2e}{:>10.4}{:>11.4}{:>9.3}",
            r.j, r.rel_ev_err, r.se_rel_ev_err, r.proj_err, r.se_proj_err, r.ratio_ev, r.ratio_proj, r.p_delta_gt_quarter
        );
    }
    let ev = table.eigenvalue_band(3.0);
    let proj = table.projection_band(3.0);
    println!(
        "eigenvalue ratio band: C = {:.4}, range [{:.4}, {:.4}], within [C/3, 3C]: {}",
        ev.c, ev.min, ev.max, ev.within
    );
    println!(
        "projector ratio band: mean = {:.4}, range [{:.4}, {:.4}], within [mean/3, 3 mean]: {}",
        proj.c, proj.min, proj.max, proj.within
    );
    out.finish(&cfg, Some(cfg.seed), 0)
}
