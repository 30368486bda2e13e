use std::process::{Command, Output};

fn qsmart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsmart"))
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .args(args)
        .output()
        .expect("spawn qsmart")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(qsmart(&["--help"]).status.code(), Some(0));
    assert_eq!(qsmart(&["nosuch"]).status.code(), Some(1));
    assert_eq!(qsmart(&["synth", "full", "0"]).status.code(), Some(1));
    assert_eq!(qsmart(&["synth", "bogus", "3"]).status.code(), Some(1));
    // no set of small moduli covers this range
    let infeasible = qsmart(&["select", "--k", "1000000000", "--max-n", "2"]);
    assert_eq!(infeasible.status.code(), Some(2), "{}", String::from_utf8_lossy(&infeasible.stderr));
    assert_eq!(qsmart(&["dqc-add", "--a", "60", "--b", "60", "--k", "64"]).status.code(), Some(1));
    assert_eq!(qsmart(&["run", "--circuit", "/nonexistent/file"]).status.code(), Some(1));
}

#[test]
fn synth_writes_file_that_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qdma2.circ");
    let o = qsmart(&["synth", "qdma", "2", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l.starts_with("ccx ")));
    let args = [
        "run",
        "--circuit",
        path.to_str().unwrap(),
        "--noise",
        "zero",
        "--shots",
        "10",
        "--a",
        "1",
        "--b",
        "2",
        "--json",
    ];
    let run = qsmart(&args);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&run)).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn table1_zero_noise_is_exact() {
    let o = qsmart(&["table1", "--noise", "zero", "--csv", "-"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let csv_start = out.find("modulus,type").expect("csv header");
    let mut rdr = csv::Reader::from_reader(&out.as_bytes()[csv_start..]);
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "output_prob").unwrap();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        assert_eq!(&r[col], "1.000");
    }
}

#[test]
fn compare_json_and_csv_agree() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t2.csv");
    let args = ["compare", "--sizes", "6,7", "--shots-mod", "20", "--shots-full", "10", "--seed", "5"];
    let o = qsmart(&[&args[..], &["--json", "--csv", csv_path.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["kind"], "TABLE2");
    let cols: Vec<String> =
        doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    for c in ["size", "mono_qubits", "rns_set", "gain_pct"] {
        assert!(cols.iter().any(|x| x == c), "missing column {c}");
    }
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), cols);
    let csv_rows: Vec<Vec<String>> = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    let json_rows: Vec<Vec<String>> = serde_json::from_value(doc["rows"].clone()).unwrap();
    assert_eq!(csv_rows, json_rows);
    assert_eq!(csv_rows.len(), 2);
}

#[test]
fn dqc_add_reports_the_sum() {
    let o = qsmart(&["dqc-add", "--a", "17", "--b", "25", "--k", "64", "--noise", "zero", "--json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["kind"], "RUN");
    assert!(stdout(&o).contains("42"));
    let again =
        qsmart(&["dqc-add", "--a", "17", "--b", "25", "--k", "64", "--noise", "zero", "--json", "--workers", "4"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn select_trace_ends_selected() {
    let o = qsmart(&["select", "--k", "2048", "--trace"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains('5') && out.contains('9'), "{out}");
}
