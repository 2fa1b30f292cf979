//! End-to-end tests of the `minar` binary: exit codes, file formats,
//! determinism, and report contents.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minar"))
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

fn params_json(dir: &Path) -> PathBuf {
    let path = dir.join("params.json");
    write(
        &path,
        r#"{
  "family": "pl",
  "alpha": [0.3, 0.3, 0.3],
  "mu": [0.5, 0.5, 0.5],
  "sigma": [
    [0.64, 0.5709447, 0.534457],
    [0.5709447, 0.64, 0.5919781],
    [0.534457, 0.5919781, 0.64]
  ]
}"#,
    );
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Simulates a small dataset and returns its path.
fn simulate_csv(dir: &Path, length: usize, seed: u64) -> PathBuf {
    let params = params_json(dir);
    let data = dir.join(format!("sim_{length}_{seed}.csv"));
    let out = bin()
        .args(["simulate", "--params"])
        .arg(&params)
        .args(["--length", &length.to_string(), "--seed", &seed.to_string()])
        .arg("--out")
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    data
}

#[test]
fn simulate_is_deterministic_with_lf_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = simulate_csv(dir.path(), 60, 1);
    let b_path = dir.path().join("again.csv");
    let out = bin()
        .args(["simulate", "--params"])
        .arg(params_json(dir.path()))
        .args(["--length", "60", "--seed", "1"])
        .arg("--out")
        .arg(&b_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b_path).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed must give identical files");
    let text = String::from_utf8(bytes_a).unwrap();
    assert!(!text.contains('\r'), "output must use LF endings");
    assert!(text.starts_with("x1,x2,x3\n"));
    assert_eq!(text.lines().count(), 61); // header + 60 rows

    // a different seed changes the data
    let c = simulate_csv(dir.path(), 60, 2);
    assert_ne!(std::fs::read(&c).unwrap(), bytes_b);
}

#[test]
fn simulate_to_stdout_when_out_omitted() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate", "--params"])
        .arg(params_json(dir.path()))
        .args(["--length", "5", "--seed", "9"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 6);
}

#[test]
fn simulate_rejects_indefinite_sigma_with_key_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    write(
        &bad,
        r#"{"family":"pl","alpha":[0.3,0.3],"mu":[0.5,0.5],"sigma":[[1.0,2.0],[2.0,1.0]]}"#,
    );
    let out = bin()
        .args(["simulate", "--params"])
        .arg(&bad)
        .args(["--length", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("sigma"), "{msg}");
}

#[test]
fn fit_missing_file_exits_2_and_names_path() {
    let out = bin()
        .args(["fit", "--data", "/no/such/file.csv", "--family", "pl"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/no/such/file.csv"));
}

#[test]
fn negative_count_is_located() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("neg.csv");
    write(&data, "a,b\n1,2\n3,-1\n");
    let out = bin()
        .args(["fit", "--family", "pl", "--data"])
        .arg(&data)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("negative count"), "{msg}");
    assert!(msg.contains("line 3, column 2"), "{msg}");
}

#[test]
fn ragged_rows_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("ragged.csv");
    write(&data, "a,b,c\n1,2,3\n1,2\n");
    let out = bin()
        .args(["fit", "--family", "pl", "--data"])
        .arg(&data)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ragged"), "{}", stderr(&out));
}

#[test]
fn fit_report_has_contract_keys_and_consistent_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate_csv(dir.path(), 80, 3);
    let report = dir.path().join("report.json");
    let out = bin()
        .args(["fit", "--family", "pl", "--quad-nodes", "6"])
        .args(["--max-iter", "4", "--tol", "1e-8", "--data"])
        .arg(&data)
        .arg("--out")
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("log-likelihood"), "{text}");

    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["family"], "pl");
    assert_eq!(doc["alpha"].as_array().unwrap().len(), 3);
    assert_eq!(doc["mu"].as_array().unwrap().len(), 3);
    assert_eq!(doc["sigma"].as_array().unwrap().len(), 3);
    assert_eq!(doc["iterations"], 4);
    assert!(doc["converged"].is_boolean());
    assert_eq!(doc["trace"].as_array().unwrap().len(), 4);
    assert_eq!(doc["meta"]["quad_nodes"], 6);
    assert_eq!(doc["meta"]["n_obs"], 80);
    assert_eq!(doc["meta"]["n_params"], 12);
    assert_eq!(doc["meta"]["columns"][0], "x1");

    let loglik = doc["loglik"].as_f64().unwrap();
    let k = 12.0;
    let n = 80.0_f64;
    assert!((doc["aic_paper"].as_f64().unwrap() - (-2.0 * loglik + k)).abs() < 1e-9);
    assert!((doc["aic_standard"].as_f64().unwrap() - (-2.0 * loglik + 2.0 * k)).abs() < 1e-9);
    assert!((doc["bic"].as_f64().unwrap() - (-2.0 * loglik + k * n.ln())).abs() < 1e-9);
}

#[test]
fn fit_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate_csv(dir.path(), 60, 4);
    let run = |threads: &str| {
        let report = dir.path().join(format!("r{threads}.json"));
        let out = bin()
            .env("MINAR_THREADS", threads)
            .args(["fit", "--family", "gl", "--quad-nodes", "5"])
            .args(["--max-iter", "3", "--tol", "1e-9", "--data"])
            .arg(&data)
            .arg("--out")
            .arg(&report)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::read(&report).unwrap()
    };
    assert_eq!(run("1"), run("2"));
}

#[test]
fn bad_thread_env_exits_2() {
    let out = bin()
        .env("MINAR_THREADS", "abc")
        .args(["moments", "--params", "/tmp/never-read.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("MINAR_THREADS"));
}

#[test]
fn moments_prints_known_process_mean() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["moments", "--params"])
        .arg(params_json(dir.path()))
        .args(["--max-lag", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    // exp(0.82) / 0.7 = 3.2436...
    assert!(text.contains("3.2436"), "{text}");
    assert!(text.contains("innovation correlation"), "{text}");
    assert!(text.contains("autocovariance lag 2"), "{text}");
}

#[test]
fn compare_emits_four_rows_and_one_flag() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate_csv(dir.path(), 60, 5);
    let out = bin()
        .args(["compare", "--quad-nodes", "5", "--max-iter", "3"])
        .args(["--tol", "1e-2", "--data"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for model in ["poisson-inar", "geometric-inar", "minar-pl", "minar-gl"] {
        assert!(text.contains(model), "{text}");
    }
    let stars = text.matches('*').count();
    assert_eq!(stars, 1, "{text}");
}

#[test]
fn study_is_deterministic_and_reports_na_for_single_rep() {
    let dir = tempfile::tempdir().unwrap();
    let csv1 = dir.path().join("study1.csv");
    let csv2 = dir.path().join("study2.csv");
    let args = [
        "study", "--family", "pl", "--scenario", "A2B1C1", "--sizes", "30", "--reps", "2",
        "--quad-nodes", "4", "--max-iter", "3", "--tol", "1e-2", "--seed", "7",
    ];
    let out1 = bin().args(args).arg("--out").arg(&csv1).output().unwrap();
    assert!(out1.status.success(), "{}", stderr(&out1));
    let out2 = bin().args(args).arg("--out").arg(&csv2).output().unwrap();
    assert!(out2.status.success());
    assert_eq!(std::fs::read(&csv1).unwrap(), std::fs::read(&csv2).unwrap());
    assert_eq!(stdout(&out1), stdout(&out2));

    let table = stdout(&out1);
    assert!(table.contains("A2B1C1"), "{table}");
    assert!(table.contains("n=30"), "{table}");
    assert!(table.contains("failures"), "{table}");

    let csv_text = std::fs::read_to_string(&csv1).unwrap();
    let mut lines = csv_text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario,family,n_t,parameter,true_value,mean_bias,sd,failures,reps"
    );
    // 3 alpha + 3 mu + 6 sigma parameters
    assert_eq!(csv_text.lines().count(), 13);

    // single replication: SD is not defined
    let out = bin()
        .args([
            "study", "--family", "gl", "--scenario", "a1b1c2", "--sizes", "25", "--reps", "1",
            "--quad-nodes", "4", "--max-iter", "2", "--tol", "1e-2", "--seed", "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("(NA)"), "{}", stdout(&out));
}

#[test]
fn study_rejects_unknown_scenario() {
    let out = bin()
        .args(["study", "--family", "pl", "--scenario", "A9B1C1", "--reps", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("scenario"), "{}", stderr(&out));
}

#[test]
fn unknown_family_is_a_usage_error() {
    let out = bin()
        .args(["fit", "--data", "/tmp/x.csv", "--family", "nb"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
