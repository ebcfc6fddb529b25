use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_charge-komlos");

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios")
}

fn cli(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("CHARGE_KOMLOS_TOL")
        .output()
        .expect("binary runs")
}

fn cli_env(args: &[&str], tol: &str) -> Output {
    Command::new(BIN)
        .args(args)
        .env("CHARGE_KOMLOS_TOL", tol)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const CONSTANT: &str = r#"{
  "algebra": {"ground": 4, "blocks": [[0], [1], [2], [3]]},
  "generator": {"kind": "constant", "params": {"charge": [0.1, 0.2, 0.3, 0.15], "len": 64}},
  "pipeline": "extract_signed",
  "cfg": {"horizon": 64}
}"#;

#[test]
fn validate_accepts_every_shipped_scenario() {
    for entry in fs::read_dir(scenarios()).unwrap() {
        let p = entry.unwrap().path();
        let out = cli(&["validate", s(&p)]);
        assert!(out.status.success(), "{}: {}", p.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn validate_reports_the_json_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"algebra": {"ground": 4, "blocks": [[0],[1],[2],[3]]},
            "generator": {"kind": "iid_charges", "params": {"len": 8}},
            "pipeline": "extract_positive"}"#,
    );
    let out = cli(&["validate", &bad]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/cfg/seed"));

    let mismatch = write(
        dir.path(),
        "mismatch.json",
        r#"{"generator": {"kind": "slln_functions", "params": {"len": 8}},
            "pipeline": "extract_positive", "cfg": {"seed": 1}}"#,
    );
    let err = String::from_utf8_lossy(&cli(&["validate", &mismatch]).stderr).to_string();
    assert!(err.contains("slln_functions") && err.contains("extract_positive"), "{err}");
}

#[test]
fn run_writes_all_outputs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = scenarios().join("iid.json");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(cli(&["run", s(&spec), "--out", s(&a)]).status.success());
    assert!(cli(&["run", s(&spec), "--out", s(&b)]).status.success());
    for f in ["report.json", "certificates.csv", "ladder.csv"] {
        let x = fs::read(a.join(f)).unwrap();
        assert_eq!(x, fs::read(b.join(f)).unwrap(), "{f} differs between runs");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["pipeline"], "extract_positive");
    let timing: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("timing.json")).unwrap()).unwrap();
    assert!(timing["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    let csv = fs::read_to_string(a.join("certificates.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,norm_residual,lambda_Anc,partial_sum,bound"));
}

#[test]
fn jobs_isolate_outputs_and_match_sequential_runs() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["iid", "ramp", "coins", "dichotomy"];
    let paths: Vec<PathBuf> = names.iter().map(|n| scenarios().join(format!("{n}.json"))).collect();
    let run = |out: &Path, jobs: &str| {
        let mut args = vec!["run"];
        args.extend(paths.iter().map(|p| s(p)));
        args.extend(["--out", s(out), "--jobs", jobs]);
        let o = cli(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    };
    let (seq, par) = (dir.path().join("seq"), dir.path().join("par"));
    run(&seq, "1");
    run(&par, "3");
    for n in names {
        let a = fs::read(seq.join(n).join("certificates.csv")).unwrap();
        assert_eq!(a, fs::read(par.join(n).join("certificates.csv")).unwrap(), "{n}");
        assert!(par.join(n).join("report.json").exists());
    }
}

#[test]
fn failing_certificate_gives_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "orth.json", &CONSTANT.replace("extract_signed", "orthogonality"));
    let out = cli(&["run", &spec, "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn strict_mode_fails_degenerate_runs() {
    let dir = tempfile::tempdir().unwrap();
    // All mass sits on the reference-null atom, so every truncation is zero.
    let spec = write(
        dir.path(),
        "deg.json",
        r#"{"algebra": {"ground": 3, "blocks": [[0], [1], [2]]},
            "reference": [0.5, 0.5, 0.0],
            "generator": {"kind": "constant", "params": {"charge": [0, 0, 1], "len": 64}},
            "pipeline": "extract_positive", "cfg": {"horizon": 64}}"#,
    );
    let lax = cli(&["run", &spec, "--out", s(&dir.path().join("a"))]);
    assert!(lax.status.success());
    let strict = cli(&["run", &spec, "--out", s(&dir.path().join("b")), "--strict"]);
    assert!(!strict.status.success());
    let report = fs::read_to_string(dir.path().join("b/report.json")).unwrap();
    assert!(report.contains("\"degenerate\": true"));
}

#[test]
fn tolerance_env_var_overrides_tau_conv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "c.json", CONSTANT);
    assert!(cli(&["run", &spec, "--out", s(&dir.path().join("a"))]).status.success());

    // The constant run leaves a residual at rounding level, above 1e-300.
    let tight = cli_env(&["run", &spec, "--out", s(&dir.path().join("b"))], "1e-300");
    assert!(!tight.status.success());
    let report = fs::read_to_string(dir.path().join("b/report.json")).unwrap();
    assert!(report.contains("\"tau_conv\": 1e-300"), "{report}");

    let garbage = cli_env(&["run", &spec, "--out", s(&dir.path().join("c"))], "abc");
    assert!(!garbage.status.success());
    assert!(String::from_utf8_lossy(&garbage.stderr).contains("CHARGE_KOMLOS_TOL"));
}

#[test]
fn demos_match_goldens_and_unknown_demo_fails() {
    let dir = tempfile::tempdir().unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for name in ["dichotomy", "empirical", "posterior", "slln"] {
        let out = dir.path().join(name);
        assert!(cli(&["demo", name, "--out", s(&out)]).status.success(), "{name}");
        let got = fs::read_to_string(out.join("certificates.csv")).unwrap();
        let want = fs::read_to_string(golden.join(name).join("certificates.csv")).unwrap();
        assert_eq!(got, want, "{name}");
    }
    assert!(!cli(&["demo", "nope", "--out", s(&dir.path().join("x"))]).status.success());
}

#[test]
fn iid_golden_residuals_do_not_increase_in_the_certified_tail() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iid");
    assert!(cli(&["run", s(&scenarios().join("iid.json")), "--out", s(&out)]).status.success());
    let got = fs::read_to_string(out.join("certificates.csv")).unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/iid/certificates.csv");
    assert_eq!(got, fs::read_to_string(golden).unwrap());
    let residuals: Vec<f64> = got
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let tail = &residuals[residuals.len() / 2..];
    // Tail residuals sit at rounding level; read monotonicity up to 1e-12.
    assert!(tail.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{tail:?}");
    assert!(tail.iter().all(|&r| r <= 1e-3));
}
