use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn golden(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liftedve")).args(args).env_remove("LIFTEDVE_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no `{key}` in\n{text}"));
    line.rsplit(' ').next().unwrap().parse().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn infer_prints_partition_function() {
    let o = run(&["infer", path(&golden("swap.pfm"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!((value(&text, "lnZ") - 6.0 * 14.5f64.ln()).abs() < 1e-9, "{text}");
}

#[test]
fn infer_marginals_sum_to_one() {
    let o = run(&["infer", path(&golden("symmetry.pfm")), path(&golden("symmetry.qry"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let total: f64 = text.lines().filter(|l| l.starts_with("P(")).map(|l| l.rsplit(' ').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9, "{text}");
}

#[test]
fn f32_precision_agrees_with_f64() {
    let a = stdout(&run(&["infer", path(&golden("homophily.pfm"))]));
    let b = stdout(&run(&["infer", path(&golden("homophily.pfm")), "--precision", "f32"]));
    assert!((value(&a, "lnZ") - value(&b, "lnZ")).abs() < 1e-4);
}

#[test]
fn trace_lists_operations() {
    let text = stdout(&run(&["infer", path(&golden("homophily.pfm")), "--trace"]));
    assert!(text.lines().any(|l| l.starts_with("strategy ")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("muladds=")), "{text}");
}

#[test]
fn infer_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.txt");
    let o = run(&["infer", path(&golden("swap.pfm")), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("Z = "));
}

#[test]
fn exit_codes_distinguish_failure_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pfm");
    std::fs::write(&bad, "bogus\n").unwrap();
    assert_eq!(run(&["infer", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["infer", "/nonexistent.pfm"]).status.code(), Some(2));
    assert_eq!(run(&["infer"]).status.code(), Some(2));
    let transitive = golden("transitive.pfm");
    assert_eq!(run(&["infer", path(&transitive), "--strategy", "two-logvar"]).status.code(), Some(1));
    assert_eq!(run(&["--cap", "10", "infer", path(&transitive), "--strategy", "ground"]).status.code(), Some(3));
    assert_eq!(run(&["verify", path(&transitive), "--tol", "0"]).status.code(), Some(2));
}

#[test]
fn zero_weight_marginal_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("zero.pfm");
    let q = dir.path().join("zero.qry");
    std::fs::write(&m, "domain D = {a}\npredicate P/1 range {false, true}\nparfactor [X in D] : phi(P(X))\n").unwrap();
    std::fs::write(&q, "query P(a)\n").unwrap();
    let o = run(&["infer", m.to_str().unwrap(), q.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("zero total weight"));
}

#[test]
fn verify_passes_and_detects_perturbation() {
    let mixed = golden("mixed.pfm");
    let ok = run(&["verify", path(&mixed)]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).lines().any(|l| l == "PASS"));
    let bad = run(&["verify", path(&mixed), "--perturb"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).lines().any(|l| l == "FAIL"));
}

#[test]
fn verify_random_corpus() {
    let o = run(&["verify", "--corpus", "2", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.ends_with("PASS")));
}

#[test]
fn bench_emits_csv() {
    let o = run(&["bench", "symmetry", "--sizes", "3,5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,strategy,muladds,maxcells,ms"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "3");
    assert_eq!(rows[1][1], "two-logvar");
    let fallback = stdout(&run(&["bench", "transitive", "--sizes", "3"]));
    assert!(fallback.lines().nth(1).unwrap().contains("-fallback"), "{fallback}");
}

#[test]
fn import_wmc_writes_checked_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("appendix.pfm");
    let o = run(&["import-wmc", path(&golden("appendix.wmc")), out.to_str().unwrap(), "--check", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"));
    let z = stdout(&run(&["infer", out.to_str().unwrap()]));
    assert!(value(&z, "lnZ").is_finite(), "{z}");
}
