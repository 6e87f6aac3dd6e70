//! Drives the checked-in fuzz corpora and a set of adversarial inputs
//! through both parsers; `cargo fuzz run` explores further, this keeps the
//! baseline honest in ordinary CI.

use qbus_cli::config::{ConfigFile, SweepSpec};
use qbus_cli::report::{parse_csv, write_csv};
use std::path::PathBuf;

fn corpus_dir(target: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target)
}

#[test]
fn config_corpus_parses_or_rejects_cleanly() {
    let dir = corpus_dir("fuzz_config_parse");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).expect("corpus directory exists") {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if let Ok(config) = ConfigFile::parse(&text) {
            let _ = SweepSpec::from_config(&config);
        }
        seen += 1;
    }
    assert!(seen >= 4, "expected the checked-in seeds, found {seen}");
}

#[test]
fn csv_corpus_round_trips() {
    let dir = corpus_dir("fuzz_csv_report");
    let mut parsed_any = false;
    for entry in std::fs::read_dir(&dir).expect("corpus directory exists") {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if let Ok(rows) = parse_csv(&text) {
            let rewritten = write_csv(&rows);
            assert_eq!(parse_csv(&rewritten).unwrap(), rows, "{}", path.display());
            parsed_any = true;
        }
    }
    assert!(parsed_any, "at least one corpus file must be well-formed");
}

#[test]
fn parsers_survive_adversarial_inputs() {
    let nasty = [
        "",
        "=",
        "====",
        "p",
        "p=",
        "p==1",
        "p = 1e999999",
        "p = -0.0",
        "p = nan",
        "p = inf",
        "lengths = 18446744073709551616",
        "lengths = -1",
        "lengths = 4,,,,6",
        "Lengths = 4",
        "model = DEP",
        "rounds = 4294967296",
        "seed = 99999999999999999999999999",
        "tau1 = 1\ntau1 = 2",
        "\u{0}\u{1}\u{2}",
        "p \u{3d} 0.5",
        "lengths = ４",
        "# only a comment",
        &"x".repeat(100_000),
        &format!("lengths = {}", "4,".repeat(10_000)),
    ];
    for input in nasty {
        if let Ok(config) = ConfigFile::parse(input) {
            let _ = SweepSpec::from_config(&config);
        }
    }

    let header = qbus_cli::report::CSV_HEADER;
    let nasty_csv = [
        String::new(),
        "garbage".into(),
        header.to_string(),
        format!("{header}\n"),
        format!("{header}\n,,,,,,,,,,,,,"),
        format!("{header}\n1,2,3"),
        format!("{header}\n4,nan,inf,-inf,dep,,,,,,,,,"),
        format!("{header}\n4,1,1,0,dep,1e999,,,,,,,,"),
        format!("{header}\n4,1,1,0,cpe,{}", "9".repeat(5000)),
        format!("{header}\n{}", "4,1,1,0,dep,,,,,,,,,\n".repeat(2000)),
    ];
    for input in &nasty_csv {
        if let Ok(rows) = parse_csv(input) {
            let rewritten = write_csv(&rows);
            let _ = parse_csv(&rewritten).unwrap();
        }
    }
}
