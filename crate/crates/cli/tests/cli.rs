use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_specpert"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("specpert-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(out).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn manifest(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn analyze(out: &Path, e: &str, j: &str) -> Output {
    let sigma = fixture("sigma_2x2.txt");
    let e = fixture(e);
    bin()
        .arg("--out")
        .arg(out)
        .arg("analyze")
        .arg(sigma)
        .arg(e)
        .args(["-j", j, "-p", "3"])
        .output()
        .unwrap()
}

#[test]
fn analyze_two_by_two() {
    let out = scratch("analyze");
    let o = analyze(&out, "e_2x2.txt", "1");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("delta ") && l.ends_with("1.000000e-1")));
    assert!(text.contains("9.804864e-5"), "{text}");
    for name in ["thm1", "thm2", "cor2_proj", "cor2_eval_simple", "hfc_proj", "hfc_eval"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name} "))), "{name}");
    }
    let series: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("series.json")).unwrap()).unwrap();
    let s = series["eval_partial_sum"].as_f64().unwrap();
    assert!((s - 2.01).abs() < 1e-12);
    assert_eq!(series["bounds"]["thm1"]["applicable"], true);
    let m = manifest(&out);
    assert_eq!(m["command"], "analyze");
    assert_eq!(m["config"]["j"], 1);
    assert_eq!(m["exit_code"], 0);
}

#[test]
fn analyze_zero_perturbation_has_zero_bounds() {
    let out = scratch("zero");
    let o = analyze(&out, "zero_2x2.txt", "1");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.contains(" yes ")).collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        let value: f64 = r.split_whitespace().nth(3).unwrap().parse().unwrap();
        assert_eq!(value, 0.0, "{r}");
    }
}

#[test]
fn analyze_exit_codes() {
    let out = scratch("codes");
    assert_eq!(analyze(&out, "e_2x2.txt", "5").status.code(), Some(4));
    assert_eq!(analyze(&out, "e_2x2.txt", "0").status.code(), Some(4));
    assert_eq!(analyze(&out, "eye_3x3.txt", "1").status.code(), Some(2));
    assert_eq!(analyze(&out, "missing.txt", "1").status.code(), Some(3));
    let garbage = out.join("garbage.txt");
    std::fs::write(&garbage, "2\n1 x\n0 1\n").unwrap();
    let o = run(
        &out,
        &["analyze", fixture("sigma_2x2.txt").to_str().unwrap(), garbage.to_str().unwrap(), "-j", "1"],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn verify_default_config_passes() {
    let out = scratch("verify-default");
    let o = run(&out, &["verify", bundled("verify_default.conf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("total failures: 0"));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(csv.lines().count() > 1000);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    assert_eq!(manifest(&out)["config"]["instances"], 1000);
}

#[test]
fn verify_edge_configs() {
    let out = scratch("verify-edge");
    let empty = out.join("empty.conf");
    std::fs::write(&empty, "instances = 0\n").unwrap();
    let o = run(&out, &["verify", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);

    let corrupt = out.join("corrupt.conf");
    std::fs::write(&corrupt, "instances = 10\ncorrupt_bound = true\n").unwrap();
    assert_eq!(run(&out, &["verify", corrupt.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(manifest(&out)["exit_code"], 1);

    for (i, bad) in ["instances 10\n", "instances = ten\n", "colour = red\n", "dim = 1\n"].iter().enumerate() {
        let path = out.join(format!("bad{i}.conf"));
        std::fs::write(&path, bad).unwrap();
        assert_eq!(run(&out, &["verify", path.to_str().unwrap()]).status.code(), Some(2), "{bad}");
    }
}

#[test]
fn experiment_bundled_config_rows() {
    let out = scratch("phase");
    let o = run(&out, &["experiment", bundled("phase_alpha1.conf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("phase.csv")).unwrap();
    let js: Vec<usize> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(js, (3..=20).collect::<Vec<_>>());
}

#[test]
fn experiment_is_reproducible_from_its_manifest() {
    let smoke = bundled("phase_smoke.conf");
    let a = scratch("smoke-a");
    let o = run(&a, &["experiment", smoke.to_str().unwrap(), "--emit-gnuplot-style"]);
    assert_eq!(o.status.code(), Some(0));
    for curve in ["rel_ev_err", "proj_err", "ref_ev", "ref_proj"] {
        let body = std::fs::read_to_string(a.join(format!("{curve}.dat"))).unwrap();
        assert_eq!(body.lines().count(), 8);
        assert!(body.lines().all(|l| l.split_whitespace().count() == 2));
    }

    let b = scratch("smoke-b");
    let o = bin()
        .args(["--threads", "3", "--out"])
        .arg(&b)
        .arg("experiment")
        .arg(&smoke)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read(a.join("phase.csv")).unwrap();
    assert_eq!(csv, std::fs::read(b.join("phase.csv")).unwrap());

    let config = &manifest(&a)["config"];
    let text: String = config
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| format!("{k} = {}\n", v.as_str().map(str::to_string).unwrap_or(v.to_string())))
        .collect();
    let c = scratch("smoke-c");
    let replay = c.join("replay.conf");
    std::fs::write(&replay, text).unwrap();
    assert_eq!(run(&c, &["experiment", replay.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(csv, std::fs::read(c.join("phase.csv")).unwrap());

    let d = scratch("smoke-d");
    run(&d, &["--seed", "2", "experiment", smoke.to_str().unwrap()]);
    assert_ne!(csv, std::fs::read(d.join("phase.csv")).unwrap());
    assert_eq!(manifest(&d)["seed"], 2);
}

#[test]
fn experiment_config_errors() {
    let out = scratch("experiment-bad");
    let bad = out.join("bad.conf");
    std::fs::write(&bad, "alpha = 1.5\n").unwrap();
    assert_eq!(run(&out, &["experiment", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, "j_min = 5\nj_max = 3\n").unwrap();
    assert_eq!(run(&out, &["experiment", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = out.join("nope.conf");
    assert_eq!(run(&out, &["experiment", missing.to_str().unwrap()]).status.code(), Some(3));
}
