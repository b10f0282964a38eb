use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn amm_bp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amm-bp"))
        .args(args)
        .current_dir(dir)
        .env_remove("AMM_BP_OUT")
        .output()
        .expect("spawn amm-bp")
}

fn config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn test_run_writes_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "adv.json", r#"{"problem":"advection","N":40,"a":-2.0,"t_final":0.5}"#);
    let out = amm_bp(&["run", &cfg, "--out", "res"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for f in ["solution.csv", "mesh.csv", "bounds.csv", "diagnostics.csv"] {
        assert!(tmp.path().join("res").join(f).exists(), "{f}");
    }
    let solution = fs::read_to_string(tmp.path().join("res/solution.csv")).unwrap();
    let mut lines = solution.lines();
    assert_eq!(lines.next(), Some("x_center,dx,u"));
    for line in lines {
        let u: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((u - 1.0).abs() <= 1e-12, "{line}");
    }
}

#[test]
fn test_same_config_gives_identical_files() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "b.json", r#"{"problem":"burgers","N":40}"#);
    for d in ["a", "b"] {
        let out = amm_bp(&["run", &cfg, "--out", d], tmp.path());
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    for f in ["solution.csv", "mesh.csv", "bounds.csv", "diagnostics.csv"] {
        let a = fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn test_output_dir_from_environment() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "b.json", r#"{"problem":"burgers","N":40,"out":"from-config"}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_amm-bp"))
        .args(["run", &cfg])
        .current_dir(tmp.path())
        .env("AMM_BP_OUT", "from-env")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(tmp.path().join("from-env/solution.csv").exists());
    assert!(!tmp.path().join("from-config").exists());
}

#[test]
fn test_unknown_key_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "bad.json", r#"{"problem":"burgers","foo":3}"#);
    let out = amm_bp(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("foo"), "{}", stderr(&out));
}

#[test]
fn test_beta_is_validated() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "bad.json", r#"{"problem":"burgers","beta":1.5}"#);
    let out = amm_bp(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("(0, 1)"), "{}", stderr(&out));
}

#[test]
fn test_early_stop_has_its_own_exit_code() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "b.json", r#"{"problem":"burgers","N":40,"max_halvings":0}"#);
    let out = amm_bp(&["run", &cfg, "--out", "res"], tmp.path());
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("halvings"), "{}", stderr(&out));
    assert!(tmp.path().join("res/diagnostics.csv").exists());
}

#[test]
fn test_uniform_mesh_flag_keeps_nodes() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "b.json", r#"{"problem":"burgers","N":40}"#);
    let out = amm_bp(&["run", &cfg, "--uniform-mesh", "--no-limiter", "--out", "res"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let mesh = fs::read_to_string(tmp.path().join("res/mesh.csv")).unwrap();
    let rows: Vec<Vec<&str>> = mesh.lines().skip(1).map(|l| l.split(',').skip(1).collect()).collect();
    assert!(rows.len() > 1);
    assert!(rows.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn test_converge_writes_tables() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "b.json", r#"{"problem":"burgers"}"#);
    let out = amm_bp(&["converge", &cfg, "--Ns", "40,80", "--out", "res"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(tmp.path().join("res/table.csv")).unwrap();
    assert!(csv.starts_with("N,l1_error,dx_max,rate"));
    assert_eq!(csv.lines().count(), 3);
    assert!(tmp.path().join("res/table.md").exists());
}

#[test]
fn test_converge_needs_exact_solution() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "e.json", r#"{"problem":"euler-strong-shock"}"#);
    let out = amm_bp(&["converge", &cfg, "--Ns", "40,80"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}
