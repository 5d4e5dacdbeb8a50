//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution as _, Exp1};

use specpert_core::lab::{
    fitted_slope, gaussian_first_two_term_moment, mc_eigen_error, phase_transition_experiment,
    DecayModel, Distribution, ExperimentConfig, SamplerSpec,
};
use specpert_core::linalg::{hs_norm, max_abs};
use specpert_core::oracle::sweep::{generate_instance, random_orthogonal, random_symmetric, rescale_to_delta_prime, stream_rng};
use specpert_core::oracle::verify::verify_series_bounds;
use specpert_core::oracle::{
    contour_series_coefficient, exact_perturbed, finite_difference_coefficient, run_sweep,
    verify_remainder_identity, ContourSpec, SweepConfig,
};
use specpert_core::perturb::{
    delta, multiple_group_series, partial_sums, projection_coefficient, series_coefficient_eigenvalue,
    CoefficientMethod, SignConvention,
};
use specpert_core::{Mat, Vector, PerturbationInstance, Result, SpectralModel, SymmetricMatrix};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn within_budget(elapsed: Duration, budget: Duration, pass: bool) -> bool {
    pass && elapsed <= budget
}

fn two_by_two() -> PerturbationInstance {
    let sigma = SymmetricMatrix::diagonal(&[2.0, 1.0]).unwrap();
    let e = SymmetricMatrix::from_rows(&[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap();
    PerturbationInstance::new(sigma, e).unwrap()
}

fn criterion_1() -> Result<Outcome> {
    let inst = two_by_two();
    let r = delta(&inst, 1)?;
    let p1 = projection_coefficient(&inst, 1, 1, CoefficientMethod::CrossChecked)?;
    let p1_expected = Mat::from_row_slice(2, 2, &[0.0, 0.1, 0.1, 0.0]);
    let l: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|&n| series_coefficient_eigenvalue(&inst, 1, n))
        .collect::<Result<_>>()?;
    let hat = exact_perturbed(&inst)?.eigenvalue(1)?;
    let errs = [
        (r.delta - 0.1).abs(),
        (r.delta_prime - 0.1).abs(),
        max_abs(&(&p1 - &p1_expected)),
        l[0].abs(),
        (l[1] - 0.01).abs(),
        (l[2] + 1e-4).abs(),
        (hat - (3.0 + 1.04f64.sqrt()) / 2.0).abs(),
    ];
    let worst = errs.iter().fold(0.0f64, |a, &b| a.max(b));
    outcome(worst <= 1e-12, format!("worst deviation {worst:.2e}"))
}

fn criterion_2() -> Result<Outcome> {
    let cfg = SweepConfig::default();
    let res = run_sweep(&cfg)?;
    let families = ["thm1_", "thm2_", "separation_", "weighted_projection", "term_bound", "hfc_"];
    let missing: Vec<&str> = families
        .iter()
        .copied()
        .filter(|f| !res.rows.iter().any(|r| r.report.applicable && r.report.check.starts_with(f)))
        .collect();
    outcome(
        res.failure_count() == 0 && missing.is_empty() && res.rows.len() > cfg.instances,
        format!(
            "{} instances, {} applicable checks, {} failures, unexercised families {:?}",
            cfg.instances,
            res.applicable_count(),
            res.failure_count(),
            missing
        ),
    )
}

fn criterion_3() -> Result<Outcome> {
    let (mut worst_p, mut worst_l, mut tail_fail, mut tail_checked) = (0.0f64, 0.0f64, 0, 0);
    for i in 0..100u64 {
        let mut rng = stream_rng(3_000, i);
        let g = generate_instance(&mut rng, 15, 0.1, 0.05)?;
        let inst = rescale_to_delta_prime(&g.inst, g.j, 0.2)?;
        let exact = exact_perturbed(&inst)?;
        let s = partial_sums(&inst, g.j, 30)?;
        worst_p = worst_p.max(hs_norm(&(exact.projector(g.j)? - &s.proj_partial_sum)));
        worst_l = worst_l.max((exact.eigenvalue(g.j)? - s.eval_partial_sum).abs());
        for c in verify_series_bounds(&inst, g.j, 30, &exact)? {
            if c.check.starts_with("cor2_") {
                tail_checked += usize::from(c.applicable);
                tail_fail += usize::from(c.failed());
            }
        }
    }
    outcome(
        // eigenvalue tails start at p = 2
        worst_p < 1e-8 && worst_l < 1e-10 && tail_fail == 0 && tail_checked == 100 * (30 * 2 + 29 * 2),
        format!(
            "δ′=0.2: max ‖P̂-S₃₀‖₂ {worst_p:.2e}, max |λ̂-s₃₀| {worst_l:.2e}, tail checks {tail_checked} with {tail_fail} failures"
        ),
    )
}

fn criterion_4() -> Result<Outcome> {
    let targets = [0.05, 0.15, 0.3];
    let (mut paths, mut contour, mut fd) = (0.0f64, 0.0f64, 0.0f64);
    let mut identity_fail = 0;
    for i in 0..100u64 {
        let mut rng = stream_rng(4_000, i);
        let g = generate_instance(&mut rng, 15, targets[i as usize % 3], 0.05)?;
        let (inst, j) = (&g.inst, g.j);
        let exact = exact_perturbed(inst)?;
        for n in 0..=7 {
            let a = projection_coefficient(inst, j, n, CoefficientMethod::GeneratingFunction)?;
            let b = projection_coefficient(inst, j, n, CoefficientMethod::Enumerative)?;
            paths = paths.max(hs_norm(&(&a - &b)));
            if (1..=4).contains(&n) {
                let c = contour_series_coefficient(inst, n, &ContourSpec::around(inst, j)?)?;
                contour = contour.max(hs_norm(&(&a - &c.value)));
            }
            if (1..=2).contains(&n) {
                let f = finite_difference_coefficient(inst, j, n, None)?;
                fd = fd.max(hs_norm(&(&a - &f)));
            }
        }
        for p in 1..=3 {
            identity_fail += usize::from(!verify_remainder_identity(inst, j, p, 40, &exact)?.pass);
        }
    }
    outcome(
        paths <= 1e-12 && contour <= 1e-8 && fd <= 1e-4 && identity_fail == 0,
        format!(
            "paths {paths:.2e}, contour {contour:.2e}, finite differences {fd:.2e}, remainder identity failures {identity_fail}/300"
        ),
    )
}

fn criterion_5() -> Result<Outcome> {
    let (mut order_fail, mut gap_fail, mut worst_scale) = (0, 0, 0.0f64);
    let targets = [0.05, 0.2, 0.45];
    for i in 0..1000u64 {
        let mut rng = stream_rng(5_000, i);
        let g = generate_instance(&mut rng, 15, targets[i as usize % 3], 0.05)?;
        let r = delta(&g.inst, g.j)?;
        let tol = 1e-12 * r.delta;
        order_fail += usize::from(!(r.delta_prime <= r.delta + tol && r.delta <= 2.0 * r.delta_prime + tol));
        gap_fail += usize::from(r.delta > r.e_norm / r.gap + tol);
        let t = rng.random_range(-3.0..3.0);
        let scaled = delta(&g.inst.with_scaled_perturbation(t), g.j)?.delta;
        worst_scale = worst_scale.max((scaled - t.abs() * r.delta).abs() / (t.abs() * r.delta));
        let c = rng.random_range(0.1..10.0);
        let joint = PerturbationInstance::new(g.inst.sigma().scaled(c), g.inst.e().scaled(c))?;
        worst_scale = worst_scale.max((delta(&joint, g.j)?.delta - r.delta).abs() / r.delta);
    }
    outcome(
        order_fail == 0 && gap_fail == 0 && worst_scale <= 1e-12,
        format!(
            "1000 instances: δ′≤δ≤2δ′ violations {order_fail}, δ≤‖E‖/g violations {gap_fail}, worst scale deviation {worst_scale:.2e}"
        ),
    )
}

fn criterion_6() -> Result<Outcome> {
    let model = DecayModel::exponential(1.0, 10)?;
    let spec = SamplerSpec::new(Distribution::Gaussian, 50, 6_000);
    let j_list = [1, 2, 3];
    let mc = mc_eigen_error(&model, &spec, &j_list, 20_000)?;
    let mut z = Vec::new();
    for &j in &j_list {
        let row = mc.row(j).expect("requested index");
        let closed = gaussian_first_two_term_moment(&model, j, 50)?;
        z.push((row.two_term_moment.mean - closed) / row.two_term_moment.se);
    }
    let pass = z.iter().all(|v| v.abs() <= 3.0) && mc.weyl_violations == 0;
    outcome(pass, format!("z-scores {:?}, Weyl violations {}", z.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>(), mc.weyl_violations))
}

fn criterion_7() -> Result<Outcome> {
    let cfg = ExperimentConfig::default();
    let t = phase_transition_experiment(&cfg)?;
    let ev = t.eigenvalue_band(3.0);
    let proj = t.projection_band(3.0);
    let tail: Vec<_> = t.rows.iter().filter(|r| r.j >= 5).collect();
    let x: Vec<f64> = tail.iter().map(|r| r.j as f64).collect();
    let y: Vec<f64> = tail.iter().map(|r| r.rel_ev_err).collect();
    let slope = fitted_slope(&x, &y);
    let rises = y.last() > y.first();
    outcome(
        ev.within && proj.within && slope > 0.0 && rises && t.rows.len() == 18,
        format!(
            "eigenvalue ratio in [{:.3}, {:.3}] with C={:.3}; projector ratio in [{:.3}, {:.3}] around mean {:.3}; slope over j≥5 {:.2e}, err(5)={:.4} err(20)={:.4}",
            ev.min,
            ev.max,
            ev.c,
            proj.min,
            proj.max,
            proj.c,
            slope,
            y[0],
            y[y.len() - 1]
        ),
    )
}

/// Exp(1) spectrum with `λ_{i+1} = λ_i` for a random `i`, both neighbours at
/// least `min_gap` away, in a random basis.
fn rank_two_instance<R: Rng>(rng: &mut R, d: usize, min_gap: f64) -> Result<(SymmetricMatrix, SymmetricMatrix, usize)> {
    let mut lam: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    lam.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let i = rng.random_range(0..d - 1);
    lam[i + 1] = lam[i];
    if i > 0 {
        let lift = (min_gap - (lam[i - 1] - lam[i])).max(0.0);
        lam[..i].iter_mut().for_each(|l| *l += lift);
    }
    if i + 2 < d {
        let drop = (min_gap - (lam[i + 1] - lam[i + 2])).max(0.0);
        lam[i + 2..].iter_mut().for_each(|l| *l -= drop);
    }
    let u = random_orthogonal(rng, d);
    let sigma = SymmetricMatrix::symmetrize(&u * Mat::from_diagonal(&Vector::from_vec(lam)) * u.transpose())?;
    Ok((sigma, random_symmetric(rng, d), i + 1))
}

fn criterion_8() -> Result<Outcome> {
    let mut singleton = 0.0f64;
    for i in 0..20u64 {
        let mut rng = stream_rng(8_000, i);
        let g = generate_instance(&mut rng, 8, 0.2, 0.05)?;
        let groups = g.inst.base().group_eigenvalues(0.0)?;
        let gs = multiple_group_series(&groups, g.j, g.inst.e(), 6, SignConvention::Standard)?;
        for (n, c) in gs.coeffs.iter().enumerate() {
            let simple = projection_coefficient(&g.inst, g.j, n, CoefficientMethod::GeneratingFunction)?;
            singleton = singleton.max(hs_norm(&(c - &simple)));
        }
    }

    // C_fit is calibrated on p ∈ {1, 2} only and then required at every p ≤ 5.
    let targets = [0.05, 0.1, 0.2];
    let mut ratios: Vec<[f64; 5]> = Vec::new();
    for i in 0..50u64 {
        let mut rng = stream_rng(8_100, i);
        let (sigma, e0, r_first) = rank_two_instance(&mut rng, 10, 0.05)?;
        let model = SpectralModel::decompose(&sigma)?;
        let groups = model.group_eigenvalues(model.default_group_tol())?;
        let r = groups
            .groups()
            .iter()
            .position(|g| g.rank() == 2)
            .expect("a rank-two group")
            + 1;
        let probe = multiple_group_series(&groups, r, &e0, 1, SignConvention::Standard)?;
        let e = e0.scaled(targets[i as usize % 3] / probe.delta);
        let inst = PerturbationInstance::new(sigma.clone(), e.clone())?;
        let p_hat = exact_perturbed(&inst)?.group_projector(&[r_first, r_first + 1])?;
        let mut row = [0.0; 5];
        for (k, slot) in row.iter_mut().enumerate() {
            let gs = multiple_group_series(&groups, r, &e, k + 1, SignConvention::Standard)?;
            assert!(gs.applicable);
            *slot = hs_norm(&(&p_hat - &gs.partial_sum)) / gs.bound_factor;
        }
        ratios.push(row);
    }
    let c_fit = ratios.iter().flat_map(|r| r[..2].iter()).fold(0.0f64, |a, &b| a.max(b));
    let worst = ratios.iter().flat_map(|r| r.iter()).fold(0.0f64, |a, &b| a.max(b));
    outcome(
        singleton <= 1e-12 && worst <= c_fit,
        format!("singleton deviation {singleton:.2e}; C_fit {c_fit:.3} from p≤2, worst ratio over p≤5 {worst:.3}"),
    )
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn criterion_9() -> Result<Outcome> {
    let sweep_cfg = SweepConfig {
        instances: 60,
        seed: 9,
        ..Default::default()
    };
    let exp_cfg = ExperimentConfig {
        d: 20,
        n: 100,
        m_replicates: 40,
        seed: 9,
        j_min: 2,
        j_max: 10,
        ..Default::default()
    };
    let run = |threads| -> Result<(String, String, String)> {
        in_pool(threads, || {
            let sweep = run_sweep(&sweep_cfg)?.to_csv();
            let phase = phase_transition_experiment(&exp_cfg)?.to_csv();
            let series = partial_sums(&two_by_two(), 1, 5)?.to_json();
            Ok((sweep, phase, series))
        })
    };
    let one = run(1)?;
    let same = [run(1)?, run(3)?, run(8)?].iter().all(|o| *o == one);
    outcome(same, format!("sweep/phase CSV and series JSON identical across 1, 1, 3, 8 threads: {same}"))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Result<Outcome>, u64); 9] = [
        (1, "2x2 closed form", criterion_1, 1),
        (2, "bound sweep", criterion_2, 120),
        (3, "series convergence", criterion_3, 60),
        (4, "oracle triangulation", criterion_4, 180),
        (5, "delta structure", criterion_5, 60),
        (6, "gaussian chaos anchor", criterion_6, 120),
        (7, "phase transition shape", criterion_7, 600),
        (8, "multiple-eigenvalue reduction", criterion_8, 120),
        (9, "determinism", criterion_9, 120),
    ];
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (within_budget(elapsed, Duration::from_secs(budget), o.pass), o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} criterion {id} ({name}): {detail} [{:.2}s, budget {budget}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
