use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use snapcs::io::{load_masks, load_measurement, load_signal, save_signal, RunManifest};
use snapcs::sensing::forward;
use snapcs::MultiFrameSignal;

fn snapcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snapcs"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = snapcs(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path, extra: &[&str]) {
    let mut args = vec!["simulate", "--out-dir", s(dir)];
    args.extend_from_slice(extra);
    ok(&args);
}

#[test]
fn constant_noise_free_measurement_is_the_forward_model() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("sim");
    simulate(&d, &["--phantom", "constant", "--width", "6", "--height", "5", "--frames", "3"]);
    let masks = load_masks(d.join("masks.scsm")).unwrap();
    let truth = load_signal(d.join("truth.scsx")).unwrap();
    let y = load_measurement(d.join("measurement.scsy")).unwrap();
    assert!(truth.data().iter().all(|&v| v == 0.5));
    assert_eq!(forward(&masks, &truth).unwrap().data(), y.data());
}

#[test]
fn same_seed_gives_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["--phantom", "shifting-sparse", "--width", "8", "--height", "8", "--frames", "2", "--sigma", "0.1", "--seed", "9"];
    for name in ["a", "b"] {
        simulate(&tmp.path().join(name), &args);
    }
    for f in ["masks.scsm", "measurement.scsy", "truth.scsx"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn high_noise_is_tagged() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("sim");
    simulate(&d, &["--phantom", "constant", "--width", "4", "--height", "4", "--frames", "2", "--sigma", "0.5"]);
    let m = RunManifest::read(d.join("manifest.txt")).unwrap();
    assert_eq!(m.get("noise_level"), Some("high"));
    assert_eq!(m.get("rng.noise"), Some("0:2"));
}

#[test]
fn toy_codeword_is_recovered_and_step_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    simulate(&sim, &["--phantom", "toy", "--width", "4", "--height", "4", "--frames", "2"]);
    let rec = tmp.path().join("rec");
    let (m, y, t) = (sim.join("masks.scsm"), sim.join("measurement.scsy"), sim.join("truth.scsx"));
    ok(&[
        "recover", "--masks", s(&m), "--measurement", s(&y), "--truth", s(&t), "--codec", "toy", "--solver", "gap", "--mu",
        "2", "--out-dir", s(&rec),
    ]);
    let manifest = RunManifest::read(rec.join("manifest.txt")).unwrap();
    let args = manifest.args().join(" ");
    assert!(args.contains("--solver gap --mu 2"), "{args}");
    let metrics = std::fs::read_to_string(rec.join("metrics.csv")).unwrap();
    let residual: f64 = metrics
        .lines()
        .find_map(|l| l.strip_prefix("final_residual,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-8);
    let iterations: usize = metrics.lines().find_map(|l| l.strip_prefix("iterations,")).unwrap().parse().unwrap();
    let trace_rows = std::fs::read_to_string(rec.join("trace.csv")).unwrap().lines().count() - 1;
    assert_eq!(trace_rows, iterations);
    assert!(rec.join("frame_001.pgm").exists());
}

#[test]
fn usage_and_runtime_errors_have_distinct_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = s(tmp.path());
    let bad_codec = snapcs(&["recover", "--masks", "m", "--measurement", "y", "--codec", "jpeg", "--out-dir", out]);
    assert_eq!(bad_codec.status.code(), Some(2));
    let missing = snapcs(&["recover", "--masks", "/nonexistent/m.scsm", "--measurement", "y", "--out-dir", out]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/m.scsm"));
    let csp_without_toy = snapcs(&["recover", "--masks", "m", "--measurement", "y", "--solver", "csp", "--out-dir", out]);
    assert_eq!(csp_without_toy.status.code(), Some(2));
}

#[test]
fn evaluate_reports_closed_form_psnr() {
    let tmp = tempfile::tempdir().unwrap();
    let truth = MultiFrameSignal::constant(4, 3, 5, 0.3);
    let (t, r) = (tmp.path().join("t.scsx"), tmp.path().join("r.scsx"));
    save_signal(&t, &truth).unwrap();
    save_signal(&r, &truth.map(|v| v + 0.1)).unwrap();
    let csv = tmp.path().join("eval.csv");

    let same = ok(&["evaluate", "--recon", s(&t), "--truth", s(&t), "--out", s(&csv)]);
    assert!(same.contains("psnr_db=inf"), "{same}");

    let off = ok(&["evaluate", "--recon", s(&r), "--truth", s(&t), "--out", s(&csv)]);
    assert!(off.contains("psnr_db=20.00"), "{off}");
    let rows = std::fs::read_to_string(&csv).unwrap().lines().count() - 1;
    assert_eq!(rows, 5);
}

#[test]
fn verify_psi2_prints_the_norm() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ok(&["verify", "--experiment", "psi2", "--trials", "2000", "--out", s(&tmp.path().join("p.csv"))]);
    assert!(out.contains("psi2=1.632993"), "{out}");
}

#[test]
fn verify_bernstein_defaults_pass_quickly() {
    let tmp = tempfile::tempdir().unwrap();
    let start = Instant::now();
    ok(&["verify", "--experiment", "bernstein", "--out", s(&tmp.path().join("b.csv"))]);
    assert!(start.elapsed() < Duration::from_secs(60));
    let csv = std::fs::read_to_string(tmp.path().join("b.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
}

#[test]
fn verify_gap_contraction_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ok(&["verify", "--experiment", "contraction", "--solver", "gap", "--out", s(&tmp.path().join("c.csv"))]);
    let rate: f64 = out
        .split_whitespace()
        .find_map(|w| w.strip_prefix("violation_rate="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(rate <= 0.01, "{out}");
}
