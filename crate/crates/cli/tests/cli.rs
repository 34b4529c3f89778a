use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn crossent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossent")).args(args).current_dir(models()).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_reports_structure() {
    let o = crossent(&["model", "validate", "figure1_y.json"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("period: 2"), "{s}");
    assert!(s.contains("irreducible: yes"));
    assert!(s.contains("stationary:"));
}

#[test]
fn validate_itemises_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"type": "markov", "transitions": [[0.5, 0.4], [0.3, 0.6]]}"#);
    let o = crossent(&["model", "validate", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("NonStochastic: row 0") && s.contains("NonStochastic: row 1"), "{s}");

    let reducible = write(dir.path(), "red.json", r#"{"type": "markov", "transitions": [[1, 0], [0, 1]]}"#);
    let o = crossent(&["model", "validate", &reducible]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NonUniqueStationary"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(crossent(&["audit", "nonsense", "swap.json"]).status.code(), Some(2));
    assert_eq!(crossent(&["sample", "swap.json"]).status.code(), Some(2));
}

#[test]
fn sample_is_reproducible() {
    let a = crossent(&["sample", "hidden_three.json", "--length", "50", "--seed", "4"]);
    let b = crossent(&["sample", "hidden_three.json", "--length", "50", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).split_whitespace().count(), 50);
    let labels = crossent(&["sample", "fair_coin.json", "--length", "5", "--labels"]);
    assert!(stdout(&labels).split_whitespace().all(|t| t == "H" || t == "T"));
}

#[test]
fn audit_exit_codes() {
    let ild = crossent(&["audit", "ild", "swap.json"]);
    assert_eq!(ild.status.code(), Some(1));
    assert!(stdout(&ild).contains("violation"));

    let sld = crossent(&["audit", "sld", "swap.json", "--n-max", "6", "--m-max", "6", "--print-json"]);
    assert_eq!(sld.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&sld.stdout).unwrap();
    assert_eq!(report["condition"], "SLD");
    assert!(report["per_n"].as_array().unwrap().iter().all(|r| r["tau"].as_u64().unwrap() <= 1));

    let psi = crossent(&["audit", "psi", "fair_coin.json", "--ell", "1"]);
    assert_eq!(psi.status.code(), Some(0));
    assert!(stdout(&psi).contains("   1    0.0000000000"), "{}", stdout(&psi));

    let gap = crossent(&["audit", "gap", "ladder_sign.json", "--a", "1,1,1,1,1", "--b", "0,1"]);
    assert_eq!(gap.status.code(), Some(0));
    assert!(stdout(&gap).contains("     5  "), "{}", stdout(&gap));
    let none = crossent(&["audit", "gap", "ladder_sign.json", "--a", "1,1,1,1,1", "--b", "0,1", "--gap-budget", "2"]);
    assert_eq!(none.status.code(), Some(1));
}

#[test]
fn audit_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ud.json");
    let o = crossent(&["audit", "ud", "figure1_y.json", "--n-max", "3", "--m-max", "3", "--json", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v["bound"].as_f64().unwrap() > 0.0);
    assert!(v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn exact_values() {
    let o = crossent(&["exact", "cross-entropy", "figure1_y.json", "figure1_y.json"]);
    let e = crossent(&["exact", "entropy", "figure1_y.json"]);
    assert_eq!(o.stdout, e.stdout);
    let bits = crossent(&["exact", "entropy", "fair_coin.json", "--bits"]);
    assert_eq!(stdout(&bits).trim(), "1 bits");
    let hidden = crossent(&["exact", "cross-entropy", "hidden_three.json", "hidden_three.json", "--n", "6"]);
    assert!(stdout(&hidden).contains("(n = 6)"));
}

#[test]
fn estimate_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let spec = format!(
        r#"{{"estimator": "match", "model_x": "{m}/figure1_x_diff.json", "model_y": "{m}/figure1_y.json",
            "m_grid": [100, 1000, 10000], "trials": 4, "seed": 1, "output": "est.csv",
            "output_dir": "{d}", "plot": true}}"#,
        m = models().display(),
        d = dir.path().display()
    );
    let spec_path = write(dir.path(), "spec.json", &spec);
    let o = crossent(&["estimate", "match", "--spec", &spec_path, "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("est.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "index,mean_nats,sem_nats,trials,censored");
    assert_eq!(lines.len(), 4);
    let svg = std::fs::read_to_string(dir.path().join("est.svg")).unwrap();
    assert!(svg.contains("<svg") && svg.contains("stroke-dasharray"));

    // Worker count does not change the numbers.
    let o = crossent(&["estimate", "match", "--spec", &spec_path, "--jobs", "1", "--out", dir.path().join("one.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(dir.path().join("one.csv")).unwrap(), csv);
}

#[test]
fn estimate_to_stdout_with_relative_models() {
    let o = crossent(&["estimate", "wait", "--spec", "coin_wait.json", "--bits"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.starts_with("index,mean_bits,sem_bits,trials,censored"));
    let row20: Vec<&str> = s.lines().last().unwrap().split(',').collect();
    assert_eq!(row20[0], "20");
    assert!((row20[1].parse::<f64>().unwrap() - 1.0).abs() < 0.15, "{s}");
}

#[test]
fn figure1_small_run_is_bit_identical_and_replottable() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = crossent(&[
            "experiment", "figure1", "--trials", "3", "--seed", "5", "--m-grid", "1000,3000,10000", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["figure1_same.csv", "figure1_diff.csv", "figure1.svg", "figure1_meta.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.join("figure1_same.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0")));

    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("figure1_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 5);
    let entropy = crossent(&["exact", "entropy", "figure1_y.json"]);
    let h: f64 = stdout(&entropy).split_whitespace().next().unwrap().parse().unwrap();
    assert_eq!(meta["cases"][0]["reference"].as_f64().unwrap(), h);

    let redo = a.join("again.svg");
    let o = crossent(&["plot", a.join("figure1_meta.json").to_str().unwrap(), "--out", redo.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(redo).unwrap(), std::fs::read(a.join("figure1.svg")).unwrap());
}
