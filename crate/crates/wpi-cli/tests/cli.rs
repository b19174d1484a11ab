//! End-to-end checks of the command-line surface: exit codes, artifact
//! formats and byte-level reproducibility.

use std::path::Path;
use std::process::Command;

fn wpi_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wpi"))
}

fn write_two_state(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("chain.json");
    std::fs::write(
        &path,
        r#"{"states":2,"matrix":[[0.7,0.3],[0.3,0.7]],"mu":[0.5,0.5]}"#,
    )
    .unwrap();
    path
}

#[test]
fn rates_convert_emits_gamma_csv() {
    let out = wpi_bin()
        .args(["rates-convert", "--beta", "powerlaw:1,1", "--n-max", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n,gamma"));
    // gamma(4) = 4/(4+4) = 1/2
    assert!(text.contains("5.0000000000000000e-1"));
}

#[test]
fn finite_analyze_writes_triples_and_metadata() {
    let dir = std::env::temp_dir().join("wpi-cli-test-fa");
    std::fs::create_dir_all(&dir).unwrap();
    let chain = write_two_state(&dir);
    let csv = dir.join("out.csv");
    let out = wpi_bin()
        .args([
            "finite-analyze",
            "--input",
            chain.to_str().unwrap(),
            "--n-max",
            "20",
            "--output",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("n,exact,bound"));
    assert_eq!(body.lines().count(), 22);
    let meta = std::fs::read_to_string(dir.join("out.csv.meta.json")).unwrap();
    assert!(meta.contains("\"seed\": 42"));
    // exact <= bound on every row
    for line in body.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[1] <= cells[2] + 1e-9);
    }
}

#[test]
fn identical_inputs_give_byte_identical_artifacts() {
    let dir = std::env::temp_dir().join("wpi-cli-test-repro");
    std::fs::create_dir_all(&dir).unwrap();
    let chain = write_two_state(&dir);
    let mut outputs = Vec::new();
    for (run, par) in [(0, "1"), (1, "1"), (2, "3")] {
        let csv = dir.join(format!("run{run}.csv"));
        let st = wpi_bin()
            .args([
                "conductance",
                "--input",
                chain.to_str().unwrap(),
                "--seed",
                "7",
                "--parallelism",
                par,
                "--output",
                csv.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(st.status.success());
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "same seed+parallelism must match bytes");
    assert_eq!(outputs[0], outputs[2], "worker count must not alter artifacts");
}

#[test]
fn bad_input_exits_one() {
    let out = wpi_bin()
        .args(["finite-analyze", "--input", "/nonexistent/chain.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = wpi_bin()
        .args(["rates-convert", "--beta", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = wpi_bin()
        .args(["imh", "--a", "0.25", "--b", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn drift_wpi_runs_from_json_spec() {
    let dir = std::env::temp_dir().join("wpi-cli-test-drift");
    std::fs::create_dir_all(&dir).unwrap();
    // lazy two-state chain with a trivial geometric drift
    let job = dir.join("drift.json");
    std::fs::write(
        &job,
        r#"{
          "chain": {"states":2,"matrix":[[0.7,0.3],[0.3,0.7]],"mu":[0.5,0.5]},
          "drift": {"v":[1.0,1.0],"c_set":[0,1],"form":{"form":"geometric","lambda":0.5,"b":0.5}},
          "local_pi_constant": 2.0
        }"#,
    )
    .unwrap();
    let out = wpi_bin()
        .args(["drift-wpi", "--input", job.to_str().unwrap(), "--n-max", "10"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n,gamma"));
}

#[test]
fn clt_thresholds_from_the_cli() {
    for (spec, want) in [("powerlaw:1,2", "converges"), ("powerlaw:1,0.5", "no_guarantee")] {
        let out = wpi_bin()
            .args(["clt", "--gamma", spec, "--n-max", "800"])
            .output()
            .unwrap();
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains(want), "{spec}: {text}");
    }
}
