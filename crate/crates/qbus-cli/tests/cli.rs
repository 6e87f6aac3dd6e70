//! End-to-end runs of the `qbus` binary: exit codes, determinism, and the
//! file formats it emits.

use qbus_cli::report::{parse_csv, CSV_HEADER};
use std::path::PathBuf;
use std::process::{Command, Output};

fn qbus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("qbus-cli-test-{}-{name}", std::process::id()));
    path
}

#[test]
fn sweep_is_deterministic_and_round_trips() {
    let out1 = tmp("sweep1.csv");
    let out2 = tmp("sweep2.csv");
    for out in [&out1, &out2] {
        let run = qbus(&[
            "sweep",
            "--lengths",
            "2,4,25",
            "--p",
            "0.995,1.0",
            "--eta",
            "0.99",
            "--seed",
            "7",
            "--tau1",
            "1",
            "--tau2",
            "1",
            "--taum",
            "1",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    }
    let text1 = std::fs::read_to_string(&out1).unwrap();
    let text2 = std::fs::read_to_string(&out2).unwrap();
    assert_eq!(text1, text2, "same spec must emit byte-identical CSV");

    let rows = parse_csv(&text1).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(text1.starts_with(CSV_HEADER));

    // The published worked point appears with its closed-form value.
    let l25 = rows.iter().find(|r| r.l == 25 && r.p == 0.995).unwrap();
    assert!((l25.f_closed_paper.unwrap() - 0.734).abs() < 1e-3);
    assert!(l25.f_exact.is_none());
    assert_eq!(l25.t_entswap, Some(7.0));

    // The noiseless even length simulates to exactly one.
    let l2 = rows.iter().find(|r| r.l == 2 && r.p == 1.0).unwrap();
    assert!((l2.f_exact.unwrap() - 1.0).abs() < 1e-12);

    // JSON echo exists and carries the spec.
    let json_path = out1.with_extension("json");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(json["spec"]["seed"], 7);
    assert_eq!(json["rows"].as_array().unwrap().len(), 6);
    assert!(json["rows"][0]["f_after_purify"].is_null());

    for path in [&out1, &out2, &json_path, &out2.with_extension("json")] {
        let _ = std::fs::remove_file(path);
    }
}

#[test]
fn sweep_accepts_a_config_file_with_flag_overrides() {
    let config_path = tmp("sweep.conf");
    std::fs::write(
        &config_path,
        "# demo config\nlengths = 4\np = 0.9\neta = 0.99\nmodel = dep\n",
    )
    .unwrap();
    let out = tmp("sweep-config.csv");
    let run = qbus(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--p",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let rows = parse_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].p, 0.5, "flag must override the file");
    for path in [&config_path, &out, &out.with_extension("json")] {
        let _ = std::fs::remove_file(path);
    }
}

#[test]
fn config_errors_exit_two_and_name_the_field() {
    let run = qbus(&["sweep", "--lengths", "4", "--p", "1.7", "--out", "/tmp/x.csv"]);
    assert_eq!(run.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("p"), "stderr: {stderr}");

    let config_path = tmp("bad.conf");
    std::fs::write(&config_path, "lengths = 4\nwidgets = 3\n").unwrap();
    let run = qbus(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        "/tmp/x.csv",
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("widgets"));
    let _ = std::fs::remove_file(&config_path);

    let run = qbus(&["sweep", "--lengths", "4", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn compare_reports_constant_entswap_and_crossover() {
    let out = tmp("compare.csv");
    let run = qbus(&[
        "compare",
        "--lengths",
        "2,3,4,5,6",
        "--p",
        "0.95",
        "--eta",
        "1.0",
        "--tau1",
        "1",
        "--tau2",
        "1",
        "--taum",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("crossover length"), "{stdout}");

    let text = std::fs::read_to_string(&out).unwrap();
    let mut ratios = Vec::new();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let f_ent: f64 = fields[2].parse().unwrap();
        let f_chain: f64 = fields[3].parse().unwrap();
        let bound: f64 = fields[4].parse().unwrap();
        let t_ent: f64 = fields[5].parse().unwrap();
        assert!(f_chain < bound, "chain must respect the bound: {line}");
        assert_eq!(t_ent, 7.0, "unit times give a constant t_entswap");
        ratios.push(f_ent / f_chain);
    }
    // The advantage of resource swapping widens with length.
    for pair in ratios.windows(2) {
        assert!(pair[1] > pair[0], "ratios should widen: {ratios:?}");
    }
    let _ = std::fs::remove_file(&out);
}

#[test]
fn purify_prints_all_variants() {
    let run = qbus(&["purify", "--l", "25", "--rounds", "6", "--target", "0.985"]);
    assert!(run.status.success());
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("closed-form input, noisy ops"));
    assert!(stdout.contains("werner input, ideal ops"));
    assert!(stdout.contains("input pair"));
}

#[test]
fn gate_subcommand_agrees_with_itself() {
    let run = qbus(&["gate", "--a", "0.9", "--p", "0.99", "--eta", "0.99"]);
    assert!(run.status.success());
    let stdout = String::from_utf8_lossy(&run.stdout);
    let closed: f64 = stdout
        .lines()
        .find(|l| l.starts_with("closed form:"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    let circuit: f64 = stdout
        .lines()
        .find(|l| l.starts_with("circuit:"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    assert!((closed - circuit).abs() < 1e-8);
}

#[test]
fn gate_warns_on_non_dominant_resource() {
    let run = qbus(&["gate", "--resource", "0.2,0.5,0.2,0.1"]);
    assert!(run.status.success());
    assert!(String::from_utf8_lossy(&run.stdout).contains("warning"));
}

#[test]
fn bad_gamma_model_combination_exits_two() {
    let run = qbus(&[
        "sweep",
        "--lengths",
        "4",
        "--gamma",
        "0.01",
        "--model",
        "dep",
        "--out",
        "/tmp/x.csv",
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("gamma"));
}
