use std::path::{Path, PathBuf};
use std::process::Command;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("corrdyn-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(dir: &Path, args: &[&str], config: Option<&str>) -> (i32, serde_json::Value) {
    let out = dir.join("out");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_corrdyn"));
    cmd.args(args).arg("--out").arg(&out);
    if let Some(text) = config {
        let path = dir.join("config.json");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    let status = cmd.output().unwrap().status.code().unwrap();
    let manifest = std::fs::read_to_string(out.join("manifest.json"))
        .map(|t| serde_json::from_str(&t).unwrap())
        .unwrap_or(serde_json::Value::Null);
    (status, manifest)
}

#[test]
fn verify_passes_on_defaults() {
    let dir = scratch("verify");
    let (code, m) = run(&dir, &["verify", "--threads", "3"], None);
    assert_eq!(code, 0);
    let checks = m["checks"].as_array().unwrap();
    assert!(checks.len() >= 20);
    assert!(checks.iter().all(|c| c["pass"] == true || c["informational"] == true));
    assert!(dir.join("out/verify.csv").exists());
}

#[test]
fn free_transport_is_flagged_when_potential_vanishes() {
    let dir = scratch("free");
    let zeros = "[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]";
    let (code, m) = run(&dir, &["kinetic", "vlasov"], Some(&format!(r#"{{"model":{{"Phi":{{"re":{zeros}}}}}}}"#)));
    assert_eq!(code, 0);
    assert_eq!(m["results"]["trivial_case_pass"], true);
}

#[test]
fn sweep_table_has_rate_column() {
    let dir = scratch("sweep");
    let (code, m) = run(&dir, &["meanfield-sweep"], None);
    assert_eq!(code, 0);
    assert_eq!(m["truncation_n_max"], 3);
    let mut rdr = csv::Reader::from_path(dir.join("out/meanfield_sweep.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["s", "eps", "difference", "fitted_rate"]);
    assert_eq!(rdr.records().count(), 8);
}

#[test]
fn exit_codes() {
    let dir = scratch("codes");
    assert_eq!(run(&dir, &["vn-solve"], Some(r#"{"model":{"label_cap":2}}"#)).0, 3);
    assert_eq!(run(&dir, &["vn-solve"], Some(r#"{"bogus":1}"#)).0, 1);
    assert_eq!(run(&dir, &["vn-solve"], Some(r#"{"model":{"d":0}}"#)).0, 1);
    // the default data violate the series guard: a warning, or an error under --strict
    assert_eq!(run(&dir, &["bbgky-series"], None).0, 0);
    let (code, m) = run(&dir, &["bbgky-series", "--strict"], None);
    assert_eq!(code, 1);
    assert_eq!(m["guards"][0]["status"], "violated");
}

#[test]
fn same_seed_same_tables() {
    let a = scratch("seed-a");
    let b = scratch("seed-b");
    for kind in ["vlasov-corr", "hartree"] {
        let cfg = r#"{"initial":{"correlations":{"2":{"seed":4,"norm":0.2}}}}"#;
        run(&a, &["kinetic", kind, "--seed", "7"], Some(cfg));
        run(&b, &["kinetic", kind, "--seed", "7", "--threads", "2"], Some(cfg));
        let ta = std::fs::read(a.join("out/trajectory.csv")).unwrap();
        assert_eq!(ta, std::fs::read(b.join("out/trajectory.csv")).unwrap());
    }
}
