use std::path::Path;
use std::process::{Command, Output};

const BASE: &str = "lambda = 0.1\n[form_factor]\np = 0.5\nm = 1\n[reservoir]\nbeta = 1.0\n";

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_decoherence"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn resonances_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &format!("{BASE}[qubit]\nDelta = 1.0\na = 0.0\nb = 0.0\nc = 1.0\n"), &["resonances"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# decoherence ") && lines[0].ends_with("provenance=leading-order"));
    assert!(lines[2].starts_with("lambda,beta,Delta,a,b,abs_c,re_eps0"));
    assert_eq!(lines.len(), 4);
}

#[test]
fn spinboson_prints_the_map() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &format!("{BASE}[spin_boson]\nepsilon = 1.0\nDelta0 = 0.0\n"), &["spinboson"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1.00000000000e0,0.00000000000e0,1.00000000000e0,1.00000000000e0,-1.00000000000e0,1.00000000000e0,0.00000000000e0"));
}

#[test]
fn evolve_json_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}[qubit]\nDelta = 1.0\na = 0.0\nb = 0.0\nc = 1.0\n[time]\nt_end = 1.0\nsteps = 3\n");
    let o = run(dir.path(), &cfg, &["evolve", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["provenance"], "leading-order");
    assert_eq!(v["tables"][0]["columns"][5], "abs_rho12");
    assert_eq!(v["tables"][0]["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn output_path_from_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("xi.csv");
    let cfg = format!("{BASE}[qubit]\nDelta = 1.0\na = 0.0\nb = 0.0\nc = 1.0\n[xi]\neta_end = 2.0\nsteps = 5\n");
    let o = run(dir.path(), &cfg, &["xi", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 3 + 5);
    assert!(text.lines().nth(3).unwrap().starts_with("0.00000000000e0,0.00000000000e0"));
}

#[test]
fn empty_sweep_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}[qubit]\nDelta = 1.0\na = 0.0\nb = 0.0\nc = 1.0\n[sweep]\nparameter = \"lambda\"\nvalues = []\n");
    let o = run(dir.path(), &cfg, &["sweep"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &format!("{BASE}[qubit]\nDelta = 1.0\na = 0.0\nb = 0.0\nc = 1.0\n").replace("beta = 1.0", "beta = -1.0"), &["resonances"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reservoir.beta (line 6)"));

    let o = run(dir.path(), &format!("{BASE}[qubit]\nDelta = 1.0\na = 0.0\nb = 0.0\nc = 1.0\n[oracle]\nM = 6\n"), &["oracle"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("8192"));

    let missing = Command::new(env!("CARGO_BIN_EXE_decoherence")).arg("evolve").output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn oracle_compare_emits_fits_and_quiet_silences_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{BASE}[qubit]\nDelta = 1.0\na = 0.0\nb = 0.0\nc = 1.0\n[oracle]\nM = 2\nn_max = 2\n[time]\nt_end = 2.0\nsteps = 21\n"
    );
    let o = run(dir.path(), &cfg, &["oracle", "--compare"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().ends_with("provenance=oracle,leading-order"));
    assert!(text.contains("# table=fits"));
    assert!(!o.stderr.is_empty());
    let quiet = run(dir.path(), &cfg, &["oracle", "--compare", "--quiet"]);
    assert!(quiet.stderr.is_empty());
    assert_eq!(quiet.stdout, o.stdout);
}
