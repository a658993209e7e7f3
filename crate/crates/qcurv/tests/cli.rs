//! End-to-end tests of the command-line surface: subcommands, exit codes,
//! output files, and determinism of result.json.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_qcurv")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qcurv_cli_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

/// Small, quick, fully valid case-I configuration.
fn small_config(out_dir: &Path) -> String {
    format!(
        r#"{{"n":3,"lambda_over_gamma":1.0,"beta":0.0,"p":[0.0,-1.0],"q":[0.0,-1.0],
            "solve":{{"L":16,"M":48,"grad_tol":1e-7}},
            "verify":{{"s_rad":80,"k_ang":16}},
            "out_dir":"{}"}}"#,
        out_dir.display()
    )
}

#[test]
fn solve_produces_outputs_and_passes() {
    let dir = tmp_dir("solve");
    let out = dir.join("out");
    let cfg = write_config(&dir, "run.json", &small_config(&out));
    let result = run(&["solve", cfg.to_str().unwrap()]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    for file in ["result.json", "profiles.csv", "verification.json"] {
        assert!(out.join(file).exists(), "missing {file}");
    }
    let verification: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("verification.json")).unwrap())
            .unwrap();
    assert_eq!(verification["pass"], serde_json::Value::Bool(true));
    let profiles = std::fs::read_to_string(out.join("profiles.csv")).unwrap();
    assert!(profiles.starts_with("r,t,psi,u,v,w_drift\n"));
    assert!(profiles.lines().count() > 40);
}

#[test]
fn benchmark_cli_run_passes_within_budget() {
    let dir = tmp_dir("benchmark");
    let out = dir.join("out");
    let cfg = write_config(
        &dir,
        "benchmark.json",
        &format!(
            r#"{{"n":3,"lambda_over_gamma":1.0,"beta":0.0,"p":[0.0,-1.0],"q":[0.0,-1.0],
                "solve":{{"L":48,"M":112}},"out_dir":"{}"}}"#,
            out.display()
        ),
    );
    let start = std::time::Instant::now();
    let result = run(&["solve", cfg.to_str().unwrap()]);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(elapsed < 300.0, "benchmark run took {elapsed:.1}s");
    let verification: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("verification.json")).unwrap())
            .unwrap();
    assert_eq!(verification["pass"], serde_json::Value::Bool(true));
}

#[test]
fn result_json_is_deterministic() {
    let dir = tmp_dir("determinism");
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    let cfg_a = write_config(&dir, "a.json", &small_config(&out_a));
    let cfg_b = write_config(&dir, "b.json", &small_config(&out_b));
    assert!(run(&["solve", cfg_a.to_str().unwrap()]).status.success());
    assert!(run(&["solve", cfg_b.to_str().unwrap()]).status.success());
    // out_dir differs inside the config echo; compare everything after it.
    let strip = |p: &Path| -> String {
        let text = std::fs::read_to_string(p.join("result.json")).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["config"]["out_dir"] = serde_json::Value::Null;
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(&out_a), strip(&out_b));

    // Verification is radius-parallel; a capped worker count must not change
    // a single byte either.
    let out_c = dir.join("c");
    let cfg_c = write_config(&dir, "c.json", &small_config(&out_c));
    let single = Command::new(bin())
        .args(["solve", cfg_c.to_str().unwrap()])
        .env("QCURV_THREADS", "1")
        .output()
        .unwrap();
    assert!(single.status.success());
    assert_eq!(strip(&out_a), strip(&out_c));
    let ver = |p: &Path| std::fs::read_to_string(p.join("verification.json")).unwrap();
    assert_eq!(ver(&out_a), ver(&out_c));
}

#[test]
fn verify_subcommand_reuses_stored_result() {
    let dir = tmp_dir("verify");
    let out = dir.join("out");
    let cfg = write_config(&dir, "run.json", &small_config(&out));
    assert!(run(&["solve", cfg.to_str().unwrap()]).status.success());
    let out2 = dir.join("reverify");
    let result = run(&[
        "verify",
        cfg.to_str().unwrap(),
        out.join("result.json").to_str().unwrap(),
        "--out-dir",
        out2.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(out2.join("verification.json").exists());

    // A result produced for a different problem is refused.
    let other = write_config(
        &dir,
        "other.json",
        &format!(
            r#"{{"n":3,"lambda_over_gamma":0.5,"beta":0.0,"p":[0.0,-1.0],"q":[0.0,-1.0],
                "solve":{{"L":16,"M":48,"grad_tol":1e-7}},"out_dir":"{}"}}"#,
            out.display()
        ),
    );
    let mismatch = run(&[
        "verify",
        other.to_str().unwrap(),
        out.join("result.json").to_str().unwrap(),
    ]);
    assert_eq!(mismatch.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("different problem"));
}

#[test]
fn nonexistence_dimension_is_input_error() {
    let dir = tmp_dir("n2");
    let cfg = write_config(
        &dir,
        "n2.json",
        r#"{"n":2,"lambda":1.0,"beta":0.0,"p":[0.0,-1.0],"q":[0.0,-1.0]}"#,
    );
    let result = run(&["solve", cfg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(
        stderr.contains("no finite-volume solutions"),
        "stderr: {stderr}"
    );
}

#[test]
fn degree_bound_and_uncovered_regime_are_input_errors() {
    let dir = tmp_dir("bad_inputs");
    let deg = write_config(
        &dir,
        "deg.json",
        r#"{"n":4,"lambda":1.0,"beta":0.0,"p":[0.0,0.0,-1.0],"q":[0.0,-1.0]}"#,
    );
    let result = run(&["solve", deg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("degree"));

    let mixed = write_config(
        &dir,
        "mixed.json",
        r#"{"n":3,"lambda":1.0,"beta":-1.0,"p":[0.0,-1.0],"q":[0.0]}"#,
    );
    let result = run(&["solve", mixed.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("uncovered"));
}

#[test]
fn malformed_config_is_input_error() {
    let dir = tmp_dir("malformed");
    let bad = write_config(&dir, "bad.json", r#"{"n":3,"lambda":"#);
    assert_eq!(run(&["solve", bad.to_str().unwrap()]).status.code(), Some(1));
    let unknown = write_config(
        &dir,
        "unknown.json",
        r#"{"n":3,"lambda":1.0,"beta":0.0,"p":[0.0,-1.0],"q":[0.0,-1.0],"typo_key":1}"#,
    );
    assert_eq!(
        run(&["solve", unknown.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["solve", "/nonexistent/x.json"]).status.code(), Some(1));
}

#[test]
fn unconverged_solve_is_numerical_error() {
    let dir = tmp_dir("unconverged");
    let out = dir.join("out");
    let cfg = write_config(
        &dir,
        "tight.json",
        &format!(
            r#"{{"n":3,"lambda_over_gamma":1.0,"beta":0.0,"p":[0.0,-1.0],"q":[0.0,-1.0],
                "solve":{{"L":16,"M":48,"max_iter":1}},"out_dir":"{}"}}"#,
            out.display()
        ),
    );
    let result = run(&["solve", cfg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("did not converge"));
}

#[test]
fn failed_verification_exits_three() {
    let dir = tmp_dir("verfail");
    let out = dir.join("out");
    let cfg = write_config(
        &dir,
        "impossible.json",
        &format!(
            r#"{{"n":3,"lambda_over_gamma":1.0,"beta":0.0,"p":[0.0,-1.0],"q":[0.0,-1.0],
                "solve":{{"L":16,"M":48,"grad_tol":1e-7}},
                "verify":{{"s_rad":80,"k_ang":16,"tol_kelvin":1e-18}},
                "out_dir":"{}"}}"#,
            out.display()
        ),
    );
    let result = run(&["solve", cfg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(3));
    let verification: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("verification.json")).unwrap())
            .unwrap();
    assert_eq!(verification["pass"], serde_json::Value::Bool(false));
}

#[test]
fn eigs_table_matches_ladder() {
    let result = run(&["eigs", "--n", "3", "--L", "3"]);
    assert!(result.status.success());
    let text = String::from_utf8(result.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "ell,lambda_ell,mu_ell,mu_sqrt_ell");
    let expect = [
        (0.0, 0.0, 0.0),
        (3.0, 6.0, 6f64.sqrt()),
        (8.0, 24.0, 24f64.sqrt()),
        (15.0, 60.0, 60f64.sqrt()),
    ];
    for (l, (lambda, mu, mu_sqrt)) in expect.iter().enumerate() {
        let cells: Vec<f64> = lines[l + 1]
            .split(',')
            .skip(1)
            .map(|c| c.parse().unwrap())
            .collect();
        assert!((cells[0] - lambda).abs() < 1e-12);
        assert!((cells[1] - mu).abs() < 1e-12);
        assert!((cells[2] - mu_sqrt).abs() < 1e-12);
    }
    // Missing flags are input errors.
    assert_eq!(run(&["eigs", "--n", "3"]).status.code(), Some(1));
    assert_eq!(run(&["eigs", "--n", "2", "--L", "3"]).status.code(), Some(1));
}

#[test]
fn selfcheck_passes() {
    let result = run(&["selfcheck"]);
    assert!(result.status.success());
    let text = String::from_utf8(result.stdout).unwrap();
    assert!(text.lines().count() >= 10);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn trace_streams_iteration_csv() {
    let dir = tmp_dir("trace");
    let out = dir.join("out");
    let cfg = write_config(&dir, "run.json", &small_config(&out));
    let result = run(&["solve", cfg.to_str().unwrap(), "--trace"]);
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("iteration,J,grad_norm,step"));
    let data_lines = stdout
        .lines()
        .filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit()))
        .count();
    assert!(data_lines >= 2, "expected streamed iterations");
}

#[test]
fn unknown_subcommand_and_flags_rejected() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    let dir = tmp_dir("flags");
    let cfg = write_config(&dir, "c.json", &small_config(&dir.join("out")));
    assert_eq!(
        run(&["solve", cfg.to_str().unwrap(), "--bogus"]).status.code(),
        Some(1)
    );
    let help = run(&["--help"]);
    assert!(help.status.success());
    assert!(String::from_utf8_lossy(&help.stdout).contains("USAGE"));
}
