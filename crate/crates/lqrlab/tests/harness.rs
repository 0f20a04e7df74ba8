use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use lqrlab::{run_config_text, ExperimentKind, RunOptions};

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("harness").join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(kind: ExperimentKind, text: &str, seeds: Option<Vec<u64>>, out: &Path) -> lqrlab::RunOutcome {
    run_config_text(kind, text, Path::new("."), &RunOptions { seeds, out: Some(out.to_path_buf()) })
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

const AC: &str = r#"
[ac]
gamma = 7.27e-6
beta = 1.03e-5
sigma = 0.107
phi = PHI
epsilon = 1e-8
horizon = 10
q0 = 500.0
q0_sd = 1.0
s0 = 200.0
"#;

fn ac(phi: f64) -> String {
    AC.replace("PHI", &format!("{phi:e}"))
}

#[test]
fn riccati_artifacts_match_hand_recursion() {
    let out = scratch("riccati");
    let res = run(ExperimentKind::Riccati, "[instance]\npreset = \"scalar-five-step\"\n", None, &out);
    assert_eq!(res.exit_code, 0);
    let k = column(&out.join("k_star.csv"), "value");
    let expected =
        [1.379526941105357, 0.7525874924798753, 0.45729095156749744, 0.27749304436960026, 0.1550387596899225];
    assert_eq!(k.len(), 5);
    for (a, b) in k.iter().zip(expected) {
        assert!((a - b).abs() < 1e-10);
    }
    let p = column(&out.join("p_star.csv"), "value");
    assert_eq!(p.len(), 6);
    assert_eq!(p[5], 0.4);
    let m = manifest(&out);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["seeds"], serde_json::json!([1]));
}

#[test]
fn empty_seed_list_is_a_config_error_with_manifest() {
    let out = scratch("empty-seeds");
    let res = run(ExperimentKind::Riccati, "[instance]\npreset = \"scalar-five-step\"\n", Some(vec![]), &out);
    assert_eq!(res.exit_code, 2);
    let m = manifest(&out);
    assert_eq!(m["status"], "config-error");
    assert_eq!(m["exit_code"], 2);
    assert_eq!(m["artifacts"], serde_json::json!([]));
}

#[test]
fn config_problems_exit_two() {
    for (name, kind, text) in [
        ("unknown-field", ExperimentKind::Riccati, "bogus = 1\n"),
        ("kind-mismatch", ExperimentKind::PgExact, "kind = \"riccati\"\n[instance]\npreset = \"four-dim\"\n"),
        (
            "no-policy",
            ExperimentKind::PgExact,
            "[instance]\npreset = \"four-dim\"\n[descent]\nstep_size = 1e-3\nmax_iters = 5\n",
        ),
        ("bad-preset", ExperimentKind::Riccati, "[instance]\npreset = \"five-dim\"\n"),
    ] {
        let out = scratch(name);
        let res = run(kind, text, None, &out);
        assert_eq!(res.exit_code, 2, "{name}");
        assert_eq!(manifest(&out)["status"], "config-error", "{name}");
    }
}

#[test]
fn degenerate_regression_is_numerical() {
    let out = scratch("degenerate");
    let text = r#"
        [estimate]
        tick = 0.01
        mean_queue = 485.4
        [estimate.synthetic]
        gamma = 7e-6
        sigma = 0.1
        mfi_sd = 0.0
        n = 50
    "#;
    let res = run(ExperimentKind::EstimateParams, text, None, &out);
    assert_eq!(res.exit_code, 3);
    let m = manifest(&out);
    assert_eq!(m["status"], "numerical-failure");
    assert_eq!(m["error"]["module"], "liquidation");
}

#[test]
fn identical_runs_write_identical_bytes() {
    let text = r#"
        [instance]
        preset = "four-dim"
        [policy0]
        constant = 0.05
        jitter = 0.01
        [descent]
        step_size = 5e-4
        max_iters = 5
        [smoothing]
        radius = 1.0
        trajectories = 20
    "#;
    let (a, b) = (scratch("repeat-a"), scratch("repeat-b"));
    assert_eq!(run(ExperimentKind::PgZeroth, text, Some(vec![3, 4]), &a).exit_code, 0);
    assert_eq!(run(ExperimentKind::PgZeroth, text, Some(vec![3, 4]), &b).exit_code, 0);
    let files = ["traces/seed_3.csv", "traces/seed_4.csv", "aggregate.csv", "summary.csv", "manifest.json"];
    for f in files {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_ne!(fs::read(a.join(files[0])).unwrap(), fs::read(a.join(files[1])).unwrap());
}

#[test]
fn one_step_deadline_sells_to_the_residual() {
    let out = scratch("deadline-t1");
    let text = format!("{}\n[sweep]\nhorizons = [1]\npaths = 50\n", ac(5e-6));
    assert_eq!(run(ExperimentKind::DeadlineSweep, &text, None, &out).exit_code, 0);
    let expected = column(&out.join("inventory_T1.csv"), "expected_inventory");
    assert_eq!(expected.len(), 2);
    assert_eq!(expected[0], 500.0);
    assert!(expected[1] > 0.0 && expected[1] < 500.0);
}

#[test]
fn risk_neutral_schedules_are_linear() {
    let out = scratch("deadline-linear");
    let text = format!("{}\n[sweep]\nhorizons = [5, 30]\npaths = 200\n", ac(0.0));
    assert_eq!(run(ExperimentKind::DeadlineSweep, &text, None, &out).exit_code, 0);
    for horizon in [5usize, 30] {
        let file = out.join(format!("inventory_T{horizon}.csv"));
        let expected = column(&file, "expected_inventory");
        let mean = column(&file, "mean_inventory");
        // With the residual sold at T, T+1 equal sales.
        for (t, q) in expected.iter().enumerate() {
            let line = 500.0 * (1.0 - t as f64 / (horizon as f64 + 1.0));
            assert!((q - line).abs() < 1e-3, "T={horizon} t={t}: {q} vs {line}");
            assert!((mean[t] - line).abs() < 0.5, "T={horizon} t={t}: mean {}", mean[t]);
        }
    }
}

#[test]
fn risk_aversion_front_loads_long_schedules() {
    let inventory = |phi: f64, name: &str| {
        let out = scratch(name);
        let text = format!("{}\n[sweep]\nhorizons = [120]\npaths = 20\n", ac(phi));
        assert_eq!(run(ExperimentKind::DeadlineSweep, &text, None, &out).exit_code, 0);
        column(&out.join("inventory_T120.csv"), "expected_inventory")
    };
    let (calm, averse) = (inventory(5e-6, "phi-small"), inventory(1e-2, "phi-large"));
    assert!(averse[1] < calm[1]);
    for t in 1..=60 {
        assert!(averse[t] <= calm[t], "t={t}: {} > {}", averse[t], calm[t]);
    }
}

#[test]
fn cli_reports_exit_codes() {
    let dir = scratch("cli");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("riccati.toml");
    fs::write(&cfg, "[instance]\npreset = \"scalar-five-step\"\n").unwrap();
    let bin = env!("CARGO_BIN_EXE_lqrlab");
    let status = |args: &[&str]| Command::new(bin).args(args).status().unwrap().code();

    let out = dir.join("ok");
    assert_eq!(status(&["riccati", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), Some(0));
    assert!(out.join("k_star.csv").exists());

    let empty = dir.join("empty");
    let args = ["riccati", "--config", cfg.to_str().unwrap(), "--seeds", "", "--out", empty.to_str().unwrap()];
    assert_eq!(status(&args), Some(2));
    assert!(empty.join("manifest.json").exists());

    let missing = dir.join("missing");
    let args = ["riccati", "--config", "/nonexistent.toml", "--out", missing.to_str().unwrap()];
    assert_eq!(status(&args), Some(2));
    assert!(missing.join("manifest.json").exists());

    let threads =
        Command::new(bin).env("LQRLAB_THREADS", "zero").args(["riccati", "--config", cfg.to_str().unwrap()]).status();
    assert_eq!(threads.unwrap().code(), Some(2));
}
