use std::process::{Command, Output};

use dicke_bench::output::{CSV_COLUMNS, SCHEMA_ID};

fn dqfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqfi"))
        .args(args)
        .output()
        .expect("run dqfi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table1_passes() {
    let o = dqfi(&["table1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("58.0000"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn tight_tolerance_fails_table1() {
    let o = dqfi(&["table1", "--tolerance", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn figure_csv_schema() {
    let o = dqfi(&[
        "figure",
        "--preset",
        "fig2",
        "--probe",
        "ghz",
        "--noise",
        "global_depolarizing",
        "--p-grid",
        "0:1:0.5",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(r[0], SCHEMA_ID);
        assert_eq!(
            (r[1], r[2], r[3], r[4]),
            ("ghz", "linear", "8", "global_depolarizing")
        );
    }
    // F(1/2) stays under the convex bound (1 - p) F(0).
    let fq: Vec<f64> = rows.iter().map(|r| r[8].parse().unwrap()).collect();
    assert!((fq[0] - 64.0).abs() < 1e-9);
    assert!(fq[1] <= 32.0 + 1e-8);
    assert_eq!(fq[2], 0.0);
    // Infinite sensitivity leaves the cell empty.
    assert_eq!(rows[2][9], "");
}

#[test]
fn json_output_and_config_file() {
    let dir = std::env::temp_dir().join(format!("dqfi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    std::fs::write(
        &cfg,
        r#"{"preset": "fig5", "p_grid": {"start": 0.0, "stop": 0.0, "step": 1.0}, "format": "json"}"#,
    )
    .unwrap();
    let out = dir.join("fig5.json");
    let o = dqfi(&[
        "figure",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["schema"], SCHEMA_ID);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows
        .iter()
        .all(|r| r["ref_nlsnl"].is_number() && r["N"] == 8));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_config_exits_2() {
    assert_eq!(dqfi(&["figure", "--preset", "fig9"]).status.code(), Some(2));
    assert_eq!(
        dqfi(&["figure", "--preset", "fig2", "--p-grid", "0:1:-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(dqfi(&["verify", "--only", "table9"]).status.code(), Some(2));
    assert_eq!(dqfi(&["--threads", "0", "table3"]).status.code(), Some(2));
}

#[test]
fn capacity_exits_3() {
    let o = dqfi(&[
        "--full-cap",
        "6",
        "figure",
        "--preset",
        "fig2",
        "--probe",
        "ghz",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("capacity"));
}

#[test]
fn dump_state_reports_pair() {
    let o = dqfi(&["dump-state", "--probe", "near_optimal", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pair"], serde_json::json!([3, 5]));
    assert!((v["fq"].as_f64().unwrap() - 58.0).abs() < 1e-9);
    assert_eq!(v["amplitudes"].as_array().unwrap().len(), 9);
}

#[test]
fn table_formats_agree() {
    let csv = stdout(&dqfi(&["table3", "--format", "csv"]));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&dqfi(&["table3", "--format", "json"]))).unwrap();
    assert_eq!(
        csv.lines().count() - 1,
        json["rows"].as_array().unwrap().len()
    );
}
