use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde::Deserialize;
use serde_json::{json, Value};

use pauli_probe::estimate::{sample_budget_group, shots_for_group, SampleBudget};
use pauli_probe::sim::ExperimentRecord;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pauli-probe"));
    c.env_remove("PAULI_PROBE_THREADS");
    c
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn depolarizing(n: usize, p: f64) -> Value {
    let factors: Vec<Value> = (0..n)
        .map(|q| json!({"qubits": [q], "rates": {"I": 1.0 - p, "X": p / 3.0, "Y": p / 3.0, "Z": p / 3.0}}))
        .collect();
    json!({"repr": "factored", "n": n, "factors": factors})
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn noiseless_simulation_has_one_bin() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = write(tmp.path(), "ideal.json", &json!({"repr": "sparse", "n": 3, "rates": {"III": 1.0}}));
    let out = tmp.path().join("out");
    let o = run(&[
        "run", "--mode", "simulate", "--channel", ch.to_str().unwrap(), "--epsilon", "0.1", "--delta", "0.1",
        "--seed", "5", "--m", "7", "--group", "ZZI, IZZ, XXX", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["result"]["histogram"], json!({"000": 10000}));
    assert_eq!(r["total_measurements"], 10000);
}

#[test]
fn two_qubit_group_estimate_is_a_distribution() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = write(tmp.path(), "dep.json", &depolarizing(2, 0.03));
    let out = tmp.path().join("out");
    let o = run(&[
        "run", "--mode", "estimate-group", "--channel", ch.to_str().unwrap(), "--epsilon", "0.1", "--delta",
        "0.05", "--seed", "1", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let p = report(&out)["result"]["p_hat"].as_array().unwrap().clone();
    assert_eq!(p.len(), 16);
    let total: f64 = p.iter().map(|e| e["p_hat"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(p.iter().all(|e| e["p_hat"].as_f64().unwrap() >= 0.0));
    assert_eq!(p[0]["pauli"], "II");

    let r = report(&out);
    let est = r["result"]["estimates"].as_object().unwrap();
    assert_eq!(est.len(), 16);
    for (k, e) in est {
        let r_hat = e["r_hat"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&r_hat), "{k}: {r_hat}");
        assert!(e["m_used"].as_u64().is_some() && e["flags"].is_object() && e["p_hat"].is_f64());
    }
    assert_eq!(r["budget"]["total_measurements"], r["total_measurements"]);
    assert!(r["budget"]["t"].as_u64().unwrap() > 0 && r["budget"]["kappa"].is_array());
}

#[derive(Deserialize)]
struct Row {
    pauli: String,
    m: u64,
    v_hat: f64,
    t: u64,
    group_id: usize,
}

#[test]
fn outputs_parse_and_measurements_match() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = write(tmp.path(), "dep.json", &depolarizing(3, 0.02));
    let spam = write(
        tmp.path(),
        "spam.json",
        &json!({"prep": depolarizing(3, 0.01), "meas": {"repr": "sparse", "n": 3, "rates": {"III": 0.98, "XII": 0.02}}}),
    );
    let out = tmp.path().join("out");
    let o = run(&[
        "run", "--mode", "estimate-subset", "--channel", ch.to_str().unwrap(), "--spam", spam.to_str().unwrap(),
        "--epsilon", "0.2", "--delta", "0.1", "--seed", "9", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["result"]["p_hat"].as_array().unwrap().len(), 9);

    #[derive(Deserialize)]
    struct BudgetFile {
        budget: SampleBudget,
        instrumented_measurements: u64,
    }
    let b: BudgetFile = serde_json::from_str(&fs::read_to_string(out.join("budget.json")).unwrap()).unwrap();
    assert_eq!(b.budget.total_measurements, b.instrumented_measurements);
    assert_eq!(r["total_measurements"], b.instrumented_measurements);
    assert_eq!(b.budget.total_measurements, b.budget.t * (b.budget.rounds + b.budget.reference_rounds));

    let rows: Vec<Row> = csv::Reader::from_path(out.join("decay.csv"))
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.t == b.budget.t && r.v_hat.abs() <= 1.0 && !r.pauli.is_empty()));
    assert!(rows.windows(2).all(|w| (w[0].group_id, w[0].m) <= (w[1].group_id, w[1].m)));

    let records: Vec<ExperimentRecord> = fs::read_to_string(out.join("experiments.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.iter().map(|r| r.t).sum::<u64>(), b.instrumented_measurements);
    assert!(records.windows(2).all(|w| w[0].experiment < w[1].experiment));
}

#[test]
fn worker_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = write(tmp.path(), "dep.json", &depolarizing(4, 0.02));
    let files = ["report.json", "budget.json", "decay.csv", "experiments.jsonl"];
    for mode in ["estimate-group", "tree"] {
        let outs: Vec<Vec<Vec<u8>>> = ["1", "8"]
            .iter()
            .map(|w| {
                let out = tmp.path().join(format!("{mode}-{w}"));
                let o = run(&[
                    "run", "--mode", mode, "--channel", ch.to_str().unwrap(), "--epsilon", "0.2", "--delta", "0.1",
                    "--seed", "77", "--group", "ZIII, XIII, IZII, IXII", "--u", "8", "--workers", w, "--out",
                    out.to_str().unwrap(),
                ]);
                assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
                files.iter().map(|f| fs::read(out.join(f)).unwrap()).collect()
            })
            .collect();
        for (i, f) in files.iter().enumerate() {
            assert!(outs[0][i] == outs[1][i], "{mode}: {f} differs");
        }
    }
}

#[test]
fn thread_variable_is_a_fallback() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = write(tmp.path(), "dep.json", &depolarizing(2, 0.02));
    let base = ["validate", "--mode", "estimate-group", "--channel", ch.to_str().unwrap(), "--epsilon", "0.2",
        "--delta", "0.1", "--seed", "1"];
    let workers = |extra: &[&str]| -> u64 {
        let o = bin().args(base).args(extra).env("PAULI_PROBE_THREADS", "3").output().unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_slice::<Value>(&o.stdout).unwrap()["workers"].as_u64().unwrap()
    };
    assert_eq!(workers(&[]), 3);
    assert_eq!(workers(&["--workers", "2"]), 2);
}

#[test]
fn zero_epsilon_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = write(tmp.path(), "dep.json", &depolarizing(2, 0.02));
    let o = run(&[
        "validate", "--mode", "estimate-group", "--channel", ch.to_str().unwrap(), "--epsilon", "0", "--delta",
        "0.1", "--seed", "1",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&run(&["run", "--no-such-flag"])), 1);
    let o = run(&[
        "validate", "--mode", "estimate-group", "--channel", "/nonexistent.json", "--epsilon", "0.1", "--delta",
        "0.1", "--seed", "1",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn closure_over_cap_is_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = write(tmp.path(), "dep.json", &depolarizing(8, 0.01));
    let graph = write(tmp.path(), "graph.json", &json!({"n": 8, "factors": [[0, 1, 2, 3, 4], [3, 4, 5, 6, 7]]}));
    let o = run(&[
        "validate", "--mode", "factored", "--channel", ch.to_str().unwrap(), "--graph", graph.to_str().unwrap(),
        "--epsilon", "0.1", "--delta", "0.1", "--seed", "1",
    ]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn failed_assumptions_need_force() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = write(tmp.path(), "flip.json", &json!({"repr": "sparse", "n": 1, "rates": {"I": 0.3, "X": 0.7}}));
    let out = tmp.path().join("out");
    let args = [
        "run", "--mode", "estimate-group", "--channel", ch.to_str().unwrap(), "--epsilon", "0.2", "--delta", "0.1",
        "--seed", "1", "--out", out.to_str().unwrap(),
    ];
    assert_eq!(code(&run(&args)), 3);
    assert!(!out.exists());
    let o = bin().args(args).arg("--force").output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&out)["assumptions"]["c_weak"], false);
}

#[test]
fn four_qubit_group_budget() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = write(tmp.path(), "dep.json", &depolarizing(4, 0.01));
    let o = run(&[
        "validate", "--mode", "estimate-group", "--channel", ch.to_str().unwrap(), "--epsilon", "0.1", "--delta",
        "0.05", "--seed", "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let kappa = v["kappa_size"].as_u64().unwrap() as usize;
    // P^4 has 255 non-identity elements and a mutually unbiased cover of 17
    let t = shots_for_group(0.1, 0.05, 255, 21).unwrap();
    let predicted = sample_budget_group(0.1, 0.05, 255, kappa, 17).unwrap();
    assert_eq!(v["t"].as_u64().unwrap(), t);
    assert_eq!(v["rounds"].as_u64().unwrap(), predicted.rounds);
    assert_eq!(v["reference_rounds"].as_u64().unwrap(), predicted.reference_rounds);
    assert_eq!(v["total_measurements"].as_u64().unwrap(), t * (predicted.rounds + predicted.reference_rounds));
    assert!(v["predicted_runtime_secs"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let ch = write(tmp.path(), "dep.json", &depolarizing(2, 0.02));
    let cfg = write(
        tmp.path(),
        "cfg.json",
        &json!({"mode": "simulate", "channel": ch, "epsilon": 0.1, "delta": 0.1, "seed": 3,
                "task": {"m": 4, "shots": 500}}),
    );
    let out = tmp.path().join("out");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--shots", "700", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["result"]["shots"], 700);
    assert_eq!(r["result"]["m"], 4);

    let bad = write(tmp.path(), "bad.json", &json!({"mode": "simulate", "channel": ch, "epsilon": 0.1,
        "delta": 0.1, "seed": 3, "typo": 1}));
    assert_eq!(code(&run(&["validate", "--config", bad.to_str().unwrap()])), 1);
}
