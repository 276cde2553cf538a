use std::fs;
use std::process::{Command, Output};

use ptinfo::cli::STATE_COLUMNS;

fn ptinfo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptinfo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn state_matches_table_two() {
    let o = ptinfo(&["state", "--lambda", "0.5", "--n", "0", "--l", "0"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header, STATE_COLUMNS);
    let rec = rdr.records().next().unwrap().unwrap();
    let col = |name: &str| {
        let i = header.iter().position(|h| h == name).unwrap();
        rec[i].parse::<f64>().unwrap()
    };
    assert!((col("r2") - 0.551859).abs() < 1e-5);
    assert!((col("product2") - 3.3062).abs() < 1e-3);
    assert!((col("fisher_rho") - 23.96416).abs() < 1e-3);
    assert!((col("cramer_rao") - 13.22484).abs() < 1e-3);
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let args = [
        "sweep", "--start", "0.5", "--stop", "9.5", "--step", "0.5", "--n", "1",
    ];
    let a = ptinfo(&args);
    let b = ptinfo(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lambdas: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    // λ = 0.5 and 1.0 hold no n = 1 state.
    assert_eq!(lambdas.len(), 17);
    assert!(lambdas.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(*lambdas.last().unwrap(), 9.5);
    assert!(String::from_utf8_lossy(&a.stderr).contains("skipped 2"));
}

#[test]
fn json_carries_the_csv_columns() {
    let o = ptinfo(&[
        "sweep", "--start", "2", "--stop", "3", "--step", "0.5", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let obj = row.as_object().unwrap();
        let mut keys: Vec<&String> = obj.keys().collect();
        let mut want: Vec<&str> = STATE_COLUMNS.to_vec();
        keys.sort();
        want.sort();
        assert_eq!(keys, want);
    }
    let csv = ptinfo(&["sweep", "--start", "2", "--stop", "3", "--step", "0.5"]);
    let mut rdr = csv::Reader::from_reader(csv.stdout.as_slice());
    let first = rdr.records().next().unwrap().unwrap();
    assert_eq!(
        rows[0]["r2"].as_f64().unwrap(),
        first[7].parse::<f64>().unwrap()
    );
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.csv");
    let o = ptinfo(&[
        "figure1",
        "--n",
        "0",
        "--l",
        "0",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 191);
    let row = text
        .lines()
        .find(|l| l.starts_with("100.0,"))
        .expect("λ = 100 row");
    let v: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((v - 8.39564).abs() < 1e-4);
}

#[test]
fn table_report_lists_every_cell() {
    let o = ptinfo(&["table", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 12);
    let o = ptinfo(&["table", "6", "--d0-points", "101"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("best d0"));
}

#[test]
fn exit_codes() {
    assert_eq!(ptinfo(&["state"]).status.code(), Some(2));
    assert_eq!(ptinfo(&["table", "0"]).status.code(), Some(2));
    assert_eq!(ptinfo(&["bogus"]).status.code(), Some(2));
    let unbound = ptinfo(&["state", "--lambda", "0.5", "--n", "3"]);
    assert_eq!(unbound.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unbound.stderr).contains("error"));
    let bad_m = ptinfo(&["state", "--lambda", "2", "--l", "1", "--m", "2"]);
    assert_eq!(bad_m.status.code(), Some(1));
}

#[test]
fn validate_fails_on_shipped_fixtures_and_passes_when_corrected() {
    let o = ptinfo(&["validate", "--skip-reproduction"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("462/464"), "{err}");
    assert!(err.contains("single wrong digit"));

    let dir = tempfile::tempdir().unwrap();
    let src = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for id in 1..=15u8 {
        let name = format!("table_{id:02}.csv");
        let mut text = fs::read_to_string(src.join(&name)).unwrap();
        if id == 15 {
            text = text
                .replace("7.5,247.6847,", "7.5,347.6847,")
                .replace(",781.4640,", ",1781.4640,");
        }
        fs::write(dir.path().join(&name), text).unwrap();
    }
    let o = ptinfo(&[
        "validate",
        "--skip-reproduction",
        "--fixtures",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
