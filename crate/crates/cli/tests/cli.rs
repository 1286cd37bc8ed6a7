use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn maxfield(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxfield"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("MAXFIELD_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_sim(extra: &[&str]) -> Vec<String> {
    let mut args: Vec<String> = ["simulate", "--n", "200", "--k", "1,4", "--line", "0,0.5,1.5", "--seed", "3"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    args.extend(extra.iter().map(|s| s.to_string()));
    args
}

fn run(dir: &Path, args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    maxfield(dir, &refs)
}

#[test]
fn simulate_is_reproducible_across_runs_and_threads() {
    let (a, b, c) = (TempDir::new().unwrap(), TempDir::new().unwrap(), TempDir::new().unwrap());
    assert_eq!(code(&run(a.path(), &small_sim(&[]))), 0);
    assert_eq!(code(&run(b.path(), &small_sim(&[]))), 0);
    assert_eq!(code(&run(c.path(), &small_sim(&["--threads", "3"]))), 0);
    for name in ["sample_k1.csv", "sample_k4.csv"] {
        let x = fs::read_to_string(a.path().join(name)).unwrap();
        assert_eq!(x, fs::read_to_string(b.path().join(name)).unwrap());
        assert_eq!(x, fs::read_to_string(c.path().join(name)).unwrap());
        assert!(x.starts_with("rep,k,site_0,site_1,site_2\n"));
    }
    let meta = fs::read_to_string(a.path().join("sample_k4.json")).unwrap();
    let meta: serde_json::Value = serde_json::from_str(&meta).unwrap();
    assert_eq!(meta["config"]["seed"], 3);
}

#[test]
fn config_file_with_unknown_key_is_a_user_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "seed = 1\nsample_size = 3\n").unwrap();
    let o = maxfield(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn config_file_values_are_used() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "n = 50\nk = [2]\n[sites]\nline = [0.0, 1.0]\n").unwrap();
    let o = maxfield(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("sample_k2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn growing_shape_scale_without_ceiling_is_refused() {
    let dir = TempDir::new().unwrap();
    let o = maxfield(
        dir.path(),
        &["simulate", "--construction", "theorem3", "--d", "0.3", "--n", "10", "--line", "0,1"],
    );
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("ceiling"), "{}", stderr(&o));
}

#[test]
fn margins_test_needs_a_hundred_replicates() {
    let dir = TempDir::new().unwrap();
    let o = maxfield(dir.path(), &["margins-test", "--n", "50", "--line", "0,1"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = maxfield(dir.path(), &["margins-test", "--n", "300", "--k", "1,8", "--line", "0,1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("margins.json")).unwrap()).unwrap();
    assert_eq!(report["margins"].as_array().unwrap().len(), 2);
}

#[test]
fn tau_curve_starts_at_one_for_coincident_sites() {
    let dir = TempDir::new().unwrap();
    let o = maxfield(dir.path(), &["tau-curve", "--n", "200", "--line", "0,0,1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("tau_curve.csv")).unwrap();
    let first = csv.lines().nth(1).unwrap();
    assert!(first.starts_with("0,1,1,"), "{first}");
}

fn write_observations(dir: &Path) -> String {
    let o = maxfield(
        dir,
        &["simulate", "--n", "400", "--k", "1", "--line", "0,0.5,1", "--observations", "--seed", "5"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    dir.join("observations.csv").to_str().unwrap().to_string()
}

#[test]
fn estimate_reports_budget_exhaustion() {
    let dir = TempDir::new().unwrap();
    let obs = write_observations(dir.path());
    let o = maxfield(
        dir.path(),
        &[
            "estimate", "--obs", &obs, "--line", "0,0.5,1", "--ks", "1,2", "--n-sim", "100", "--starts", "1",
            "--max-evals", "4",
        ],
    );
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit["fit"]["converged"], false);
}

#[test]
fn estimate_rejects_a_constant_site() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("block_index,site,value\n");
    for b in 0..50 {
        text.push_str(&format!("{b},0,{}\n{b},1,2.0\n", b as f64 * 0.1));
    }
    let path = dir.path().join("obs.csv");
    fs::write(&path, text).unwrap();
    let o = maxfield(
        dir.path(),
        &["estimate", "--obs", path.to_str().unwrap(), "--line", "0,1", "--ks", "1", "--n-sim", "100"],
    );
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("site 1"), "{}", stderr(&o));
}

#[test]
fn malformed_observations_name_the_line() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("obs.csv");
    fs::write(&path, "block_index,site,value\n0,0,1.5\n0,1,x\n").unwrap();
    let o = maxfield(dir.path(), &["estimate", "--obs", path.to_str().unwrap(), "--line", "0,1"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn table1_writes_every_cell() {
    let dir = TempDir::new().unwrap();
    let o = maxfield(dir.path(), &["table1", "--n", "500"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
}
