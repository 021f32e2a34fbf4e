use std::process::{Command, Output};

fn polybern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polybern"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = polybern(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    polybern(args).status.code().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn single_values() {
    assert_eq!(stdout(&["value", "7", "-5"]), "17234438\n");
    assert_eq!(stdout(&["value", "6", "2"]), "-38/2205\n");
    assert_eq!(stdout(&["value", "0", "0"]), "1\n");
}

#[test]
fn multi_values() {
    assert_eq!(stdout(&["multi", "0,-1", "5"]), "486\n");
    assert_eq!(stdout(&["multi", "1,1", "4"]), "1/20\n");
    assert_eq!(stdout(&["multi", "0,0", "6"]), "64\n");
    assert_eq!(stdout(&["multi", "-1,-1", "7"]), "46965\n");
}

#[test]
fn multi_json_reports_route() {
    let doc: serde_json::Value =
        serde_json::from_str(&stdout(&["multi", "0,-1", "5", "--format", "json"])).unwrap();
    assert_eq!(doc["value"], "486");
    assert_eq!(doc["route"], "alpha");
    let doc: serde_json::Value =
        serde_json::from_str(&stdout(&["--format", "json", "multi", "1,1", "4"])).unwrap();
    assert_eq!(doc["route"], "series");
    let doc: serde_json::Value =
        serde_json::from_str(&stdout(&["--format", "json", "multi", "0,0", "6"])).unwrap();
    assert_eq!(doc["route"], "all-zero");
}

#[test]
fn alpha_expansions() {
    assert_eq!(stdout(&["alpha", "2,1"]), "3^n - 7*4^n + 8*5^n\n");
    assert_eq!(stdout(&["alpha", "3"]), "2^n - 6*3^n + 6*4^n\n");
    assert_eq!(stdout(&["alpha", "0,3,0"]), "2*4^n - 18*5^n + 24*6^n\n");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(exit_code(&["alpha", "0,0"]), 2);
    assert_eq!(exit_code(&["alpha", "1,-1"]), 2);
    assert_eq!(exit_code(&["multi", "", "3"]), 2);
    assert_eq!(exit_code(&["table", "4"]), 2);
    assert_eq!(exit_code(&["value", "-1", "2"]), 2);
    assert_eq!(exit_code(&["verify", "bogus-id"]), 2);
    assert_eq!(exit_code(&["verify", "thm-2.6-3", "--max-r", "0"]), 2);
    assert_eq!(
        exit_code(&["conjecture", "--max-k", "2", "--max-r", "2"]),
        2
    );
    assert_eq!(exit_code(&["value", "1", "1", "--format", "xml"]), 2);
    let out = polybern(&["verify", "bogus-id"]);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus-id"));
}

#[test]
fn single_index_table_csv() {
    let rows = csv_rows(&stdout(&["table", "2", "--format", "csv"]));
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.len() == 9));
    let row = rows.iter().find(|r| r[0] == "-3").unwrap();
    assert_eq!(row[1 + 4], "1066");
}

#[test]
fn two_index_table_csv() {
    let rows = csv_rows(&stdout(&["table", "3", "--format", "csv"]));
    assert_eq!(rows.len(), 7);
    let row = rows.iter().find(|r| r[0] == "(1,0)").unwrap();
    assert_eq!(row[1 + 4], "119/30");
}

#[test]
fn expansion_table_plain() {
    let text = stdout(&["table", "1"]);
    assert!(text
        .lines()
        .any(|l| l == "B_n^(-1,-2) = 3^n - 9*4^n + 12*5^n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("B_n^")).count(), 31);
}

#[test]
fn table_cells_round_trip() {
    use polybern_core::{IndexVector, Rational};
    for row in csv_rows(&stdout(&["table", "2", "--format", "csv"])) {
        let k: i64 = row[0].parse().unwrap();
        for (n, cell) in row[1..].iter().enumerate() {
            assert_eq!(
                cell.parse::<Rational>().unwrap(),
                polybern_core::polybern::pb(n as u32, k)
            );
        }
    }
    for row in csv_rows(&stdout(&["table", "3", "--format", "csv"])) {
        let indices: IndexVector = row[0].parse().unwrap();
        for (n, cell) in row[1..].iter().enumerate() {
            assert_eq!(
                cell.parse::<Rational>().unwrap(),
                polybern_core::multipoly::mpb(n as u32, &indices)
            );
        }
    }
}

#[test]
fn markdown_tables_have_alignment_row() {
    let text = stdout(&["table", "2", "--format", "markdown"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    assert!(lines[1].starts_with("| :"));
    assert!(lines[1].ends_with(": |"));
}

#[test]
fn verify_single_identity() {
    assert!(
        stdout(&["verify", "thm-2.6-3", "--max-r", "5", "--max-n", "8"])
            .starts_with("PASS thm-2.6-3")
    );
    let text = stdout(&[
        "verify",
        "thm-2.6-3",
        "--max-r",
        "5",
        "--max-n",
        "8",
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let report = &doc[0];
    assert_eq!(report["passed"], true);
    assert_eq!(report["counterexamples"], serde_json::json!([]));
    assert_eq!(report["range"]["max_r"], 5);
    assert!(report["cases"].as_u64().unwrap() > 0);
}

#[test]
fn verify_all_gives_30_reports() {
    let doc: serde_json::Value =
        serde_json::from_str(&stdout(&["verify", "all", "--format", "json"])).unwrap();
    let reports = doc.as_array().unwrap();
    assert_eq!(reports.len(), 30);
    assert!(reports.iter().all(|r| r["passed"] == true));
    let keys: Vec<&String> = reports[0].as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 5);
}

#[test]
fn conjecture_sweep() {
    let text = stdout(&["conjecture", "--max-k", "6", "--max-r", "3", "--max-n", "5"]);
    assert!(text.contains("(-1, 62, -540, 312, -72, 6)"));
    assert!(text.contains("conjecture holds"));
    let text = stdout(&["conjecture", "--max-k", "4", "--max-r", "2"]);
    assert!(text.lines().any(|l| l.trim() == "j=1: 14 10 2"));
    let text = stdout(&[
        "conjecture",
        "--max-k",
        "4",
        "--max-r",
        "2",
        "--format",
        "csv",
    ]);
    assert!(text.contains("4,2,14 10 2,\"(-1, 14, -10, 2)\",true"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["verify", "all", "--format", "json"][..],
        &["table", "3", "--format", "markdown"],
        &["conjecture"],
    ] {
        assert_eq!(polybern(args).stdout, polybern(args).stdout);
    }
}
