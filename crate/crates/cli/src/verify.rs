use std::collections::BTreeMap;
use std::path::Path;

use specpert_core::config::KeyValues;
use specpert_core::oracle::{run_sweep, SweepConfig};

use crate::exit::{Exit, CONFIG_PARSE, FAILURE};
use crate::manifest::Run;
use crate::Globals;

/// `thm1_p3` -> `thm1`, `coefficient_bound_n2` -> `coefficient_bound`.
fn family(check: &str) -> &str {
    match check.rsplit_once('_') {
        Some((head, tail))
            if tail.len() > 1
                && matches!(tail.as_bytes()[0], b'p' | b'n')
                && tail[1..].bytes().all(|b| b.is_ascii_digit()) =>
        {
            head
        }
        _ => check,
    }
}

pub fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<SweepConfig, Exit> {
    let mut cfg = match path {
        Some(p) => {
            let kv = KeyValues::read(p).map_err(|e| match e {
                specpert_core::Error::Io(_) => Exit::unreadable(p, e),
                _ => Exit::new(CONFIG_PARSE, format!("{}: {e}", p.display())),
            })?;
            SweepConfig::from_key_values(&kv).map_err(|e| Exit::new(CONFIG_PARSE, format!("{}: {e}", p.display())))?
        }
        None => SweepConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

#[derive(Default)]
struct Tally {
    checks: usize,
    applicable: usize,
    failures: usize,
    worst_ratio: f64,
}

pub fn run(g: &Globals, config: Option<&Path>) -> Result<u8, Exit> {
    let cfg = load_config(config, g.seed)?;
    let mut out = Run::start(g, "verify")?;
    let res = run_sweep(&cfg)?;
    out.write("sweep.csv", &res.to_csv())?;

    let mut tallies: BTreeMap<&str, Tally> = BTreeMap::new();
    for row in &res.rows {
        let c = &row.report;
        let t = tallies.entry(family(&c.check)).or_default();
        t.checks += 1;
        if c.applicable {
            t.applicable += 1;
            t.failures += usize::from(!c.pass);
            if c.rhs > 0.0 {
                t.worst_ratio = t.worst_ratio.max(c.lhs / c.rhs);
            }
        }
    }
    println!(
        "{} instances, d = {}, delta targets {:?}, seed {}",
        cfg.instances, cfg.dim, cfg.delta_targets, cfg.seed
    );
    println!("{:<22}{:>9}{:>12}{:>10}{:>14}", "check", "rows", "applicable", "failures", "max lhs/rhs");
    for (name, t) in &tallies {
        println!(
            "{name:<22}{:>9}{:>12}{:>10}{:>14.4}",
            t.checks, t.applicable, t.failures, t.worst_ratio
        );
    }
    let failures = res.failure_count();
    println!("total failures: {failures}");
    let code = if failures == 0 { 0 } else { FAILURE };
    out.finish(&cfg, Some(cfg.seed), code)
}

#[cfg(test)]
mod tests {
    use super::family;

    #[test]
    fn families() {
        assert_eq!(family("thm1_p3"), "thm1");
        assert_eq!(family("cor2_proj_simple_p12"), "cor2_proj_simple");
        assert_eq!(family("coefficient_bound_n2"), "coefficient_bound");
        assert_eq!(family("separation_own"), "separation_own");
        assert_eq!(family("weighted_projection"), "weighted_projection");
    }
}
