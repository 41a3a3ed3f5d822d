use std::path::Path;
use std::process::{Command, Output};

use relaxdr::problems::load_any;

fn relaxdr(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relaxdr"))
        .args(args)
        .current_dir(cwd)
        .env_remove("RELAXDR_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
}

#[test]
fn generate_writes_a_loadable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    let out = relaxdr(
        &[
            "generate",
            "--kind",
            "sparse-affine",
            "--n",
            "64",
            "--m",
            "16",
            "--k",
            "3",
            "--s",
            "4",
            "-o",
            path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let inst = load_any(&path).unwrap();
    let relaxdr::problems::AnyInstance::Real(inst) = inst else {
        panic!("expected a real instance");
    };
    assert_eq!(inst.dim(), 64);
    assert!(inst.is_consistent());
}

#[test]
fn compare_writes_traces_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = relaxdr(
        &[
            "compare",
            "--kind",
            "sparse-affine",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "tlambda_0.45.csv",
        "raar_0.65.csv",
        "summary.csv",
        "plot_traces.py",
        "compare.config.json",
    ] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row.split(',').nth(3), Some("tolerance"), "{row}");
    }
    let config: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("compare.config.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(config["stop"]["warmup"], 10);
}

#[test]
fn solve_reports_a_tolerance_stop() {
    let dir = tempfile::tempdir().unwrap();
    let out = relaxdr(
        &[
            "solve",
            "--kind",
            "lines-at-angle",
            "--degrees",
            "60",
            "--operator",
            "t-lambda",
            "--lambda",
            "1",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert_eq!(value(&text, "stop_reason"), Some("tolerance"));
    assert_eq!(value(&text, "operator"), Some("tlambda_1"));
    assert!(dir.path().join("relaxdr-out/tlambda_1.csv").exists());
}

#[test]
fn out_dir_follows_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_relaxdr"))
        .args([
            "solve",
            "--kind",
            "orthogonal-axes",
            "--operator",
            "raar",
            "--beta",
            "0.5",
        ])
        .current_dir(dir.path())
        .env("RELAXDR_OUT", &target)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(target.join("raar_0.5.csv").exists());
    assert!(target.join("raar_0.5.meta.json").exists());
}

#[test]
fn analyze_prints_kappa_and_measurements() {
    let dir = tempfile::tempdir().unwrap();
    let out = relaxdr(&["analyze", "--theta", "0.5", "--lambda", "1"], dir.path());
    assert!(out.status.success());
    let kappa: f64 = value(&stdout(&out), "kappa").unwrap().parse().unwrap();
    let expected = 0.5 * 1.5f64.sqrt() / (2f64.sqrt() * (1.0 + 0.75f64.sqrt()));
    assert!((kappa - expected).abs() < 1e-12);

    let out = relaxdr(
        &[
            "analyze",
            "--kind",
            "lines-at-angle",
            "--degrees",
            "45",
            "--lambda",
            "1",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    let theta: f64 = value(&text, "instance.theta_bar").unwrap().parse().unwrap();
    assert!((theta - 0.5f64.sqrt()).abs() < 1e-12);
    let rate: f64 = value(&text, "instance.rate_fitted")
        .unwrap()
        .parse()
        .unwrap();
    assert!((rate - 0.5f64.sqrt()).abs() < 0.01);
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = relaxdr(&["verify", "--cases", "200", "--pairs", "500"], dir.path());
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains(" 0 failed"));
}

#[test]
fn exit_codes_distinguish_usage_and_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(relaxdr(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(relaxdr(&["analyze"], dir.path()).status.code(), Some(2));
    assert_eq!(
        relaxdr(
            &[
                "solve",
                "--kind",
                "lines-at-angle",
                "--operator",
                "raar",
                "--beta",
                "2"
            ],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        relaxdr(
            &["solve", "--instance", "missing.json", "--operator", "raar"],
            dir.path()
        )
        .status
        .code(),
        Some(3)
    );
    std::fs::write(dir.path().join("bad.json"), "{not json").unwrap();
    assert_eq!(
        relaxdr(
            &["solve", "--instance", "bad.json", "--operator", "raar"],
            dir.path()
        )
        .status
        .code(),
        Some(3)
    );
    assert_eq!(relaxdr(&["--help"], dir.path()).status.code(), Some(0));
}
