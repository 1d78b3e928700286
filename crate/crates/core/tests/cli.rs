mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use feature2vec::eval::EvalReport;
use feature2vec::store::{load_archive, report_from_json, save_archive};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_feature2vec"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn synthetic() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let s = common::synthetic(24, 16, 3, 10, 0.01, 5, 7);
        let mut vectors = common::embedding_text(&s.words);
        // two words that are not concepts in the norms
        vectors.push_str(&format!("door {}\n", ["0.1"; 10].join(" ")));
        vectors.push_str(&format!("dragon {}\n", ["-0.2"; 10].join(" ")));
        std::fs::write(dir.path().join("vectors.txt"), vectors).unwrap();
        std::fs::write(dir.path().join("norms.tsv"), common::norms_text(&s.norms)).unwrap();
        Workspace { dir }
    }

    /// Word vectors equal to each concept's production-frequency vector, so a
    /// linear map recovers the norms exactly.
    fn identity() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let rows = [
            [9, 0, 0],
            [0, 9, 0],
            [0, 0, 9],
            [9, 5, 0],
            [5, 9, 0],
            [0, 9, 5],
            [0, 5, 9],
            [9, 0, 5],
            [5, 0, 9],
            [9, 5, 7],
            [5, 7, 9],
            [7, 9, 5],
        ];
        let mut norms = String::from("concept\tfeature\tpf\n");
        let mut vectors = String::new();
        for (c, row) in rows.iter().enumerate() {
            for (f, pf) in row.iter().enumerate().filter(|(_, pf)| **pf > 0) {
                norms.push_str(&format!("c{c}\tf{f}\t{pf}\n"));
            }
            vectors.push_str(&format!("c{c} {} {} {}\n", row[0], row[1], row[2]));
        }
        std::fs::write(dir.path().join("vectors.txt"), vectors).unwrap();
        std::fs::write(dir.path().join("norms.tsv"), norms).unwrap();
        Workspace { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).display().to_string()
    }

    fn train(&self, extra: &[&str]) -> PathBuf {
        let out = self.path("model.archive");
        let mut args = vec![
            "train",
            "--embeddings",
            &self.path("vectors.txt"),
            "--norms",
            &self.path("norms.tsv"),
            "--out",
            &out,
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        args.extend(extra.iter().map(|s| s.to_string()));
        let o = bin().args(&args).output().unwrap();
        assert!(o.status.success(), "train failed: {}", stderr(&o));
        PathBuf::from(out)
    }

    fn evaluate(&self, model: &Path, format: &str) -> String {
        let o = run(&[
            "evaluate",
            "--model",
            model.to_str().unwrap(),
            "--format",
            format,
        ]);
        assert!(o.status.success(), "evaluate failed: {}", stderr(&o));
        stdout(&o)
    }
}

#[test]
fn missing_norms_file_is_an_input_error_naming_the_path() {
    let ws = Workspace::synthetic();
    let missing = ws.path("nope.tsv");
    let o = run(&[
        "train",
        "--embeddings",
        &ws.path("vectors.txt"),
        "--norms",
        &missing,
        "--method",
        "f2v",
        "--out",
        &ws.path("m.archive"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains(&missing), "{err}");
    assert_eq!(
        err.lines()
            .filter(|l| l.starts_with("feature2vec: error"))
            .count(),
        1
    );
    assert!(!Path::new(&ws.path("m.archive")).exists());
}

#[test]
fn rank_without_words_is_a_usage_error() {
    let ws = Workspace::synthetic();
    let model = ws.train(&["--method", "f2v", "--epochs", "2"]);
    let o = run(&["rank", "--model", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["rank", "--model", model.to_str().unwrap(), "--words"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_method_is_a_usage_error() {
    let ws = Workspace::synthetic();
    let o = run(&[
        "train",
        "--embeddings",
        &ws.path("vectors.txt"),
        "--norms",
        &ws.path("norms.tsv"),
        "--method",
        "svm",
        "--out",
        &ws.path("m.archive"),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ranking_words_outside_the_norms_marks_no_gold() {
    let ws = Workspace::synthetic();
    let model = ws.train(&["--method", "f2v", "--epochs", "5"]);
    let o = run(&[
        "rank",
        "--model",
        model.to_str().unwrap(),
        "--words",
        "door",
        "dragon",
        "--top",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("door\t") && lines[1].starts_with("dragon\t"));
    for line in &lines {
        assert_eq!(line.split('\t').nth(1).unwrap().split(' ').count(), 5);
    }
    assert!(!out.contains('*'));

    // a concept word does get its gold features marked in the JSON form
    let o = run(&[
        "rank",
        "--model",
        model.to_str().unwrap(),
        "--words",
        "concept00",
        "--top",
        "24",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let gold = json[0]["features"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["in_gold"] == true)
        .count();
    assert_eq!(gold, 3);
}

#[test]
fn unknown_rank_word_reports_but_others_succeed() {
    let ws = Workspace::synthetic();
    let model = ws.train(&["--method", "f2v", "--epochs", "2"]);
    let o = run(&[
        "rank",
        "--model",
        model.to_str().unwrap(),
        "--words",
        "door",
        "unicorn",
    ]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("unicorn"));
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = run(&[
        "rank",
        "--model",
        model.to_str().unwrap(),
        "--words",
        "unicorn",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

fn table_cells(table: &str) -> Vec<String> {
    table
        .lines()
        .nth(1)
        .unwrap()
        .split_whitespace()
        .skip(3)
        .map(String::from)
        .collect()
}

#[test]
fn json_and_table_report_the_same_numbers() {
    let ws = Workspace::synthetic();
    for method in [
        ["--method", "f2v", "--epochs", "10"],
        ["--method", "plsr", "--components", "5"],
    ] {
        let model = ws.train(&method);
        let report: EvalReport = report_from_json(&ws.evaluate(&model, "json")).unwrap();
        let table = ws.evaluate(&model, "table");
        let mut expected: Vec<String> = report
            .retrieval
            .values()
            .map(|v| format!("{v:.2}"))
            .collect();
        expected.push(format!("{:.2}", report.overlap_train));
        expected.push(format!("{:.2}", report.overlap_test));
        assert_eq!(table_cells(&table), expected, "{table}");
        assert_eq!(
            report.retrieval.keys().copied().collect::<Vec<_>>(),
            vec![1, 5, 10, 20]
        );
    }
}

#[test]
fn exact_linear_data_scores_perfectly() {
    let ws = Workspace::identity();
    let model = ws.train(&["--method", "plsr", "--components", "3", "--n-train", "9"]);
    let report = report_from_json(&ws.evaluate(&model, "json")).unwrap();
    for (n, acc) in &report.retrieval {
        assert_eq!(*acc, 100.0, "top {n}");
    }
    assert_eq!(report.overlap_train, 100.0);
    assert_eq!(report.overlap_test, 100.0);
}

#[test]
fn saved_and_reloaded_model_gives_identical_metrics() {
    let ws = Workspace::synthetic();
    let model = ws.train(&["--method", "f2v", "--epochs", "10"]);
    let before = ws.evaluate(&model, "json");
    let copy = ws.dir.path().join("copy.archive");
    save_archive(&load_archive(&model).unwrap(), &copy).unwrap();
    assert_eq!(
        std::fs::read(&model).unwrap(),
        std::fs::read(&copy).unwrap()
    );
    assert_eq!(ws.evaluate(&copy, "json"), before);
}

#[test]
fn evaluate_rejects_a_truncated_archive() {
    let ws = Workspace::synthetic();
    let model = ws.train(&["--method", "plsr", "--components", "3"]);
    let text = std::fs::read_to_string(&model).unwrap();
    std::fs::write(&model, &text[..text.len() / 2]).unwrap();
    let o = run(&["evaluate", "--model", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("feature2vec: error"));
}

#[test]
fn loss_trace_has_one_row_per_epoch() {
    let ws = Workspace::synthetic();
    let model = ws.train(&["--method", "f2v", "--epochs", "7"]);
    let trace = std::fs::read_to_string(format!("{}.trace.tsv", model.display())).unwrap();
    let rows: Vec<&str> = trace
        .lines()
        .filter(|l| l.starts_with(char::is_numeric))
        .collect();
    assert_eq!(rows.len(), 7, "{trace}");
}
