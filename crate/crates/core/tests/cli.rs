mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use pseudoshrink::randmat::{write_matrix_csv, Dist, Sampler, SpectralModel};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pseudoshrink"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// p × n data file (one observation per column) and its n × p transpose.
fn data_files(tag: &str, p: usize, n: usize) -> (PathBuf, PathBuf) {
    let model = SpectralModel::paper_mix(p);
    let y = Sampler::new(&model).draw(n, Dist::Normal, None, 5).unwrap();
    let cols = tmp(&format!("{tag}_cols.csv"));
    let rows = tmp(&format!("{tag}_rows.csv"));
    write_matrix_csv(&cols, y.data()).unwrap();
    write_matrix_csv(&rows, &y.data().transpose()).unwrap();
    (cols, rows)
}

fn kv(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn lookup<'a>(pairs: &'a [(String, String)], key: &str) -> &'a str {
    &pairs.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("missing {key}")).1
}

#[test]
fn limits_identity_mp_second_moment() {
    let o = run(&["limits", "--spectrum", "identity", "--p", "100", "--cn", "2", "--family", "mp", "--m", "2", "--theta", "trace"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1.0");
}

#[test]
fn limits_ridge_matches_quadrature() {
    let o = run(&["limits", "--spectrum", "identity", "--p", "10", "--cn", "2", "--family", "ridge", "--m", "2", "--t", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let got: f64 = stdout(&o).trim().parse().unwrap();
    let want = common::ridge_trace_identity(2.0, 0.5, 2);
    assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
}

#[test]
fn limits_reads_spectrum_files() {
    let path = tmp("cli_spec.txt");
    std::fs::write(&path, "1\n1\n1\n1\n").unwrap();
    let o = run(&["limits", "--spectrum", path.to_str().unwrap(), "--cn", "2", "--family", "mp", "--m", "1"]);
    assert_eq!(stdout(&o).trim(), "0.5");
    let o = run(&["limits", "--spectrum", path.to_str().unwrap(), "--p", "5", "--cn", "2", "--family", "mp", "--m", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["limits", "--cn", "2"]).status.code(), Some(2));
    assert_eq!(run(&["limits", "--spectrum", "identity", "--cn", "2", "--family", "mp", "--m", "1"]).status.code(), Some(2));
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--kind", "prial", "--methods", "hat_v0"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    // the Moore-Penrose limit needs c > 1
    let o = run(&["limits", "--spectrum", "identity", "--p", "10", "--cn", "0.5", "--family", "mp", "--m", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn simulate_writes_a_table() {
    let out = tmp("cli_r.csv");
    let _ = std::fs::remove_file(&out);
    let o = run(&["simulate", "--kind", "prial", "--reps", "2", "--n", "50", "--c", "2", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "dist,n,c,method,prial_pct,se,reps,errors");
    assert!(text.lines().count() > 1);
}

#[test]
fn simulate_config_file_with_overrides() {
    let cfg = tmp("cli_cfg.txt");
    std::fs::write(&cfg, "kind=vconv\nn=40\nc=2\nreps=3\nmethods=hat_v0\n").unwrap();
    let per_rep = tmp("cli_per_rep.csv");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--reps", "2", "--per-rep", per_rep.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = stdout(&o);
    assert!(table.starts_with("dist,n,c,t,method,mean_ratio,sd,reps,errors"));
    assert!(table.lines().nth(1).unwrap().ends_with(",2,0"));
    assert_eq!(std::fs::read_to_string(&per_rep).unwrap().lines().count(), 3);
}

#[test]
fn estimate_reports_key_values() {
    let (cols, rows) = data_files("est", 40, 20);
    let a = run(&["estimate", "--data", cols.to_str().unwrap(), "--n-is-columns"]);
    let b = run(&["estimate", "--data", rows.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(stdout(&a), stdout(&b));
    let pairs = kv(&stdout(&a));
    assert_eq!(lookup(&pairs, "p"), "40");
    assert_eq!(lookup(&pairs, "n"), "20");
    for key in ["v0", "v1", "v2", "v3", "h2", "h3", "d0", "d1", "d2", "d3", "q1", "q2"] {
        let v: f64 = lookup(&pairs, key).parse().unwrap();
        assert!(v.is_finite(), "{key}");
    }
    let v0: f64 = lookup(&pairs, "v0").parse().unwrap();
    assert!(v0 > 0.0);
}

#[test]
fn shrink_precision_reports_plan_and_matrix() {
    let (cols, _) = data_files("prec", 30, 15);
    let out = tmp("cli_prec.csv");
    let o = run(&["shrink-precision", "--data", cols.to_str().unwrap(), "--n-is-columns", "--method", "ridge", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let pairs = kv(&stdout(&o));
    assert_eq!(lookup(&pairs, "method"), "ridge");
    assert!(lookup(&pairs, "t_star").parse::<f64>().unwrap() > 0.0);
    let m = pseudoshrink::randmat::read_matrix_csv(&out).unwrap();
    assert_eq!(m.shape(), (30, 30));
    for method in ["mp", "mpr", "eb"] {
        let o = run(&["shrink-precision", "--data", cols.to_str().unwrap(), "--n-is-columns", "--method", method]);
        assert!(o.status.success(), "{method}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(&["shrink-precision", "--data", cols.to_str().unwrap(), "--n-is-columns", "--method", "or"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn shrink_gmv_weights_sum_to_one() {
    let (cols, _) = data_files("gmv", 40, 20);
    for method in ["mp", "reflexive", "double", "plugin"] {
        let o = run(&["shrink-gmv", "--data", cols.to_str().unwrap(), "--n-is-columns", "--method", method]);
        assert!(o.status.success(), "{method}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        let weights: Vec<f64> = text.lines().filter(|l| !l.contains('=')).map(|l| l.parse().unwrap()).collect();
        assert_eq!(weights.len(), 40);
        assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-9, "{method}");
    }
}
