use std::path::Path;

use serde::Serialize;
use specpert_core::linalg::hs_norm;
use specpert_core::oracle::exact_perturbed;
use specpert_core::oracle::verify::verify_series_bounds;
use specpert_core::perturb::partial_sums;
use specpert_core::{Error, PerturbationInstance, SymmetricMatrix};

use crate::exit::{Exit, INDEX_OUT_OF_RANGE};
use crate::manifest::Run;
use crate::Globals;

#[derive(Serialize)]
struct AnalyzeConfig<'a> {
    matrix: &'a Path,
    perturbation: &'a Path,
    j: usize,
    p: usize,
}

fn read(path: &Path) -> Result<SymmetricMatrix, Exit> {
    SymmetricMatrix::read(path).map_err(|e| Exit::unreadable(path, e))
}

pub fn run(g: &Globals, matrix: &Path, perturbation: &Path, j: usize, p: usize) -> Result<u8, Exit> {
    let sigma = read(matrix)?;
    let e = read(perturbation)?;
    let inst = PerturbationInstance::new(sigma, e)?;
    if j == 0 || j > inst.dim() {
        return Err(Exit::new(
            INDEX_OUT_OF_RANGE,
            Error::IndexOutOfRange { index: j, dim: inst.dim() }.to_string(),
        ));
    }
    let mut out = Run::start(g, "analyze")?;
    let s = partial_sums(&inst, j, p)?;
    let exact = exact_perturbed(&inst)?;
    let checks = verify_series_bounds(&inst, j, p, &exact)?;
    out.write("series.json", &(s.to_json() + "\n"))?;

    let r = &s.delta;
    println!("j = {j}, p = {p}, d = {}", inst.dim());
    println!("{:<14}{:>14.6e}", "gap", r.gap);
    println!("{:<14}{:>14.6e}", "delta", r.delta);
    println!("{:<14}{:>14.6e}", "delta_prime", r.delta_prime);
    println!("{:<14}{:>14.6e}", "coupling", r.coupling);
    println!("{:<14}{:>14.6e}", "|E|_inf", r.e_norm);
    println!();
    println!("{:>3}  {:>14}  {:>14}", "n", "|P^(n)|_2", "lambda^(n)");
    for (n, (c, l)) in s.proj_coeffs.iter().zip(&s.eval_coeffs).enumerate() {
        println!("{n:>3}  {:>14.6e}  {:>14.6e}", hs_norm(c), l);
    }
    println!();
    let perr = hs_norm(&(exact.projector(j)? - &s.proj_partial_sum));
    let lerr = (exact.eigenvalue(j)? - s.eval_partial_sum).abs();
    println!("{:<28}{:>14.6e}", "|P_hat - partial sum|_2", perr);
    println!("{:<28}{:>14.6e}", "|lambda_hat - partial sum|", lerr);
    println!();
    let suffix = format!("_p{p}");
    println!("{:<18}{:>11}{:>14}{:>14}{:>7}", "bound", "applicable", "error", "value", "holds");
    for c in checks.iter().filter(|c| c.check.ends_with(&suffix)) {
        let name = c.check.trim_end_matches(&suffix);
        if c.applicable {
            println!("{name:<18}{:>11}{:>14.6e}{:>14.6e}{:>7}", "yes", c.lhs, c.rhs, c.pass);
        } else {
            println!("{name:<18}{:>11}{:>14.6e}{:>14}{:>7}", "no", c.lhs, "-", "-");
        }
    }
    let cfg = AnalyzeConfig { matrix, perturbation, j, p };
    out.finish(cfg, g.seed, 0)
}
