use std::path::Path;
use std::process::{Command, Output};

use edutree::tree::Model;
use edutree::Algorithm;
use tempfile::TempDir;

fn edutree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edutree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn compare_defaults_print_three_rows_and_three_matrices() {
    let text = stdout(&edutree(&["compare", "@embedded", "--k", "10", "--seed", "1", "--timing", "off"]));
    let summary: Vec<&str> = text.lines().take_while(|l| !l.is_empty()).collect();
    assert_eq!(summary.len(), 4);
    assert!(summary[1].starts_with("ID3"));
    assert!(summary[2].starts_with("C4.5"));
    assert!(summary[3].starts_with("CART"));
    assert_eq!(text.matches("(k = 10, seed = 1)").count(), 3);
    assert_eq!(text.matches("Precision %").count(), 3);
}

#[test]
fn compare_writes_chart_alongside_summary() {
    let dir = TempDir::new().unwrap();
    let chart = path(&dir, "fig.svg");
    let text = stdout(&edutree(&["compare", "@embedded", "--chart", &chart, "--timing", "off"]));
    assert!(text.contains("CART"));
    let svg = std::fs::read_to_string(&chart).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains(r#"viewBox="0 0 800 480""#));
    assert_eq!(svg.matches("<title>").count(), 9);
}

#[test]
fn compare_single_algorithm_gives_one_row() {
    let text = stdout(&edutree(&["compare", "@embedded", "--algorithms", "cart", "--format", "csv"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "algorithm,correct_pct,incorrect_pct,unclassified_pct,build_time_s,k,seed");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("cart,"));
}

#[test]
fn compare_orders_algorithms_canonically() {
    let text = stdout(&edutree(&["compare", "@embedded", "--algorithms", "cart,id3", "--format", "csv"]));
    let names: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["id3", "cart"]);
}

#[test]
fn compare_json_document_mirrors_report_fields() {
    let text = stdout(&edutree(&["compare", "@embedded", "--format", "json-document", "--timing", "off"]));
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let reports = doc.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for key in ["algorithm", "matrix", "correct_pct", "incorrect_pct", "unclassified_pct", "build_time_seconds", "k", "seed"] {
        assert!(reports[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    for format in ["text", "csv", "json-document", "svg"] {
        let args = ["compare", "@embedded", "--seed", "7", "--format", format, "--timing", "off"];
        assert_eq!(stdout(&edutree(&args)), stdout(&edutree(&args)), "format {format}");
    }
    for format in ["text", "csv", "json-document"] {
        let args = ["rules", "@embedded", "--algorithm", "cart", "--format", format];
        assert_eq!(stdout(&edutree(&args)), stdout(&edutree(&args)), "format {format}");
    }
}

#[test]
fn missing_data_file_exits_2_without_outputs() {
    let dir = TempDir::new().unwrap();
    let out_path = path(&dir, "summary.txt");
    let chart = path(&dir, "chart.svg");
    let out = edutree(&["compare", &path(&dir, "absent.arff"), "--output", &out_path, "--chart", &chart]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn malformed_arff_reports_line_diagnostics() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "bad.arff");
    std::fs::write(&data, "@relation r\n@attribute a {x,y}\n@attribute c {p,q}\n@data\nx,p\nz,q\n").unwrap();
    let out = edutree(&["rules", &data, "--algorithm", "id3"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(&format!("{data}:6:")), "{stderr}");
}

#[test]
fn bad_flags_exit_1() {
    for args in [
        vec!["compare", "@embedded", "--bogus"],
        vec!["compare", "@embedded", "--algorithms", "c50"],
        vec!["compare", "@embedded", "--k", "1"],
        vec!["compare", "@embedded", "--k", "49"],
        vec!["rules", "@embedded", "--algorithm", "cart", "--min-leaf", "0"],
        vec!["rules", "@embedded", "--algorithm", "id3", "--format", "svg"],
        vec!["train", "@embedded"],
        vec!["train", "@embedded", "--algorithm", "id3", "--class", "ESM"],
    ] {
        let out = edutree(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_0() {
    let out = edutree(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("compare"));
}

#[test]
fn train_then_predict_classifies_every_row() {
    let dir = TempDir::new().unwrap();
    let model = path(&dir, "id3.json");
    stdout(&edutree(&["train", "@embedded", "--algorithm", "id3", "--pruning", "off", "--output", &model]));
    assert!(Path::new(&format!("{model}.txt")).exists());
    let text = stdout(&edutree(&["predict", "@embedded", "--model", &model]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 48);
    assert!(lines.iter().all(|l| !l.contains("UNCLASSIFIED")));
    let first: Vec<&str> = lines[0].split('\t').collect();
    assert_eq!(first[0], "1");
    assert!(first[2].contains("First="));
}

#[test]
fn predict_csv_has_one_row_per_instance() {
    let dir = TempDir::new().unwrap();
    let model = path(&dir, "c45.json");
    stdout(&edutree(&["train", "@embedded", "--algorithm", "c45", "--output", &model]));
    let text = stdout(&edutree(&["predict", "@embedded", "--model", &model, "--format", "csv"]));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["row", "prediction", "p_First", "p_Second", "p_Third", "p_Fail"]);
    assert_eq!(reader.records().count(), 48);
}

#[test]
fn trained_cart_model_round_trips() {
    let text = stdout(&edutree(&["train", "@embedded", "--algorithm", "cart"]));
    let model = Model::from_json(&text).unwrap();
    assert_eq!(model.algorithm, Algorithm::Cart);
    assert_eq!(model.to_json(), text);
}

const STUDENT_LIKE: &str = "@relation students\n@attribute PSM {First,Second,Third,Fail}\n@attribute ATT {Good,Average,Poor}\n@attribute ESM {First,Second,Third,Fail}\n@data\nFirst,Good,First\nSecond,Poor,Third\n";

#[test]
fn predict_rejects_undeclared_value_with_exit_1() {
    let dir = TempDir::new().unwrap();
    let model = path(&dir, "m.json");
    let data = path(&dir, "d.arff");
    let odd = path(&dir, "odd.arff");
    std::fs::write(&data, STUDENT_LIKE).unwrap();
    std::fs::write(&odd, STUDENT_LIKE.replace("{First,Second,Third,Fail}\n@attribute ATT", "{First,Second,Third,Fail,Fourth}\n@attribute ATT") + "Fourth,Good,First\n").unwrap();
    stdout(&edutree(&["train", &data, "--algorithm", "id3", "--output", &model]));
    let out = edutree(&["predict", &odd, "--model", &model]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("PSM") && stderr.contains("Fourth"), "{stderr}");
}

#[test]
fn predict_rejects_missing_attribute_with_exit_1() {
    let dir = TempDir::new().unwrap();
    let model = path(&dir, "m.json");
    let data = path(&dir, "d.arff");
    stdout(&edutree(&["train", "@embedded", "--algorithm", "id3", "--output", &model]));
    std::fs::write(&data, "@relation r\n@attribute PSM {First,Second,Third,Fail}\n@attribute ESM {First,Second,Third,Fail}\n@data\nFirst,First\n").unwrap();
    let out = edutree(&["predict", &data, "--model", &model]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("CTG"));
}

#[test]
fn predict_accepts_csv_without_class_column() {
    let dir = TempDir::new().unwrap();
    let model = path(&dir, "m.json");
    let data = path(&dir, "d.arff");
    let rows = path(&dir, "rows.csv");
    std::fs::write(&data, STUDENT_LIKE).unwrap();
    std::fs::write(&rows, "PSM,ATT,ESM\nFirst,Good,?\nSecond,Poor,?\n").unwrap();
    stdout(&edutree(&["train", &data, "--algorithm", "cart", "--min-leaf", "1", "--pruning", "off", "--output", &model]));
    let text = stdout(&edutree(&["predict", &rows, "--model", &model]));
    let labels: Vec<&str> = text.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(labels, ["First", "Third"]);
}

#[test]
fn rules_on_embedded_id3_share_the_root_attribute() {
    let text = stdout(&edutree(&["rules", "@embedded", "--algorithm", "id3"]));
    assert!(text.lines().count() > 1);
    // The learned root is ATT; see the ledger on the PSM-root expectation.
    assert!(text.lines().all(|l| l.starts_with("IF ATT = '")));
    assert!(text.lines().all(|l| l.contains(" THEN ESM = ")));
}

#[test]
fn rules_on_pure_dataset_is_one_rule() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "pure.arff");
    std::fs::write(&data, "@relation r\n@attribute a {x,y}\n@attribute c {p,q}\n@data\nx,p\ny,p\nx,p\n").unwrap();
    for alg in ["id3", "c45", "cart"] {
        let text = stdout(&edutree(&["rules", &data, "--algorithm", alg]));
        assert_eq!(text, "IF TRUE THEN c = 'p'\n", "{alg}");
    }
}

#[test]
fn rules_csv_has_one_row_per_rule() {
    let text = stdout(&edutree(&["rules", "@embedded", "--algorithm", "cart", "--format", "csv"]));
    let plain = stdout(&edutree(&["rules", "@embedded", "--algorithm", "cart"]));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["rule", "conditions", "consequent"]);
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), plain.lines().count());
    assert!(records[0][1].starts_with("PSM IN {"));
    assert!(records[0][2].starts_with("ESM = '"));
}

#[test]
fn merged_rules_are_never_more_numerous() {
    let plain = stdout(&edutree(&["rules", "@embedded", "--algorithm", "id3"]));
    let merged = stdout(&edutree(&["rules", "@embedded", "--algorithm", "id3", "--merge-siblings"]));
    assert!(merged.lines().count() < plain.lines().count());
    assert!(merged.contains(" IN {"));
}

#[test]
fn csv_input_uses_schema_header() {
    let dir = TempDir::new().unwrap();
    let header = path(&dir, "h.arff");
    let rows = path(&dir, "rows.csv");
    std::fs::write(&header, STUDENT_LIKE).unwrap();
    std::fs::write(&rows, "PSM,ATT,ESM\nFirst,Good,First\nSecond,Poor,Third\nFirst,Average,First\n").unwrap();
    let text = stdout(&edutree(&["rules", &rows, "--schema", &header, "--algorithm", "id3"]));
    assert_eq!(text.lines().count(), 4);
    let out = edutree(&["rules", &rows, "--algorithm", "id3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_file_receives_report() {
    let dir = TempDir::new().unwrap();
    let target = path(&dir, "report.csv");
    let out = edutree(&["compare", "@embedded", "--format", "csv", "--output", &target]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&target).unwrap().lines().count(), 4);
}
