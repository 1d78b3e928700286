use std::fmt::Write as _;

use crate::eval::{EvalReport, Pool, RankedWord};

/// Pretty JSON with stable key order (struct order, sorted maps).
pub fn report_to_json(report: &EvalReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
    s.push('\n');
    s
}

pub fn report_from_json(text: &str) -> Result<EvalReport, serde_json::Error> {
    serde_json::from_str(text)
}

/// Plain-text table: one retrieval column per N, then train/test overlap.
pub fn report_to_table(reports: &[EvalReport]) -> String {
    let mut ns: Vec<usize> = reports
        .iter()
        .flat_map(|r| r.retrieval.keys().copied())
        .collect();
    ns.sort_unstable();
    ns.dedup();

    let mut header = vec![
        "Model".to_string(),
        "Dataset".to_string(),
        "Pool".to_string(),
    ];
    header.extend(ns.iter().map(|n| format!("Top {n}")));
    header.push("Train".into());
    header.push("Test".into());

    let mut rows = vec![header];
    for r in reports {
        let mut row = vec![
            r.method.clone(),
            r.dataset.clone(),
            match r.pool {
                Pool::All => "all".into(),
                Pool::Test => "test".into(),
            },
        ];
        row.extend(ns.iter().map(|n| {
            r.retrieval
                .get(n)
                .map(|v| format!("{v:.2}"))
                .unwrap_or_else(|| "-".into())
        }));
        row.push(format!("{:.2}", r.overlap_train));
        row.push(format!("{:.2}", r.overlap_test));
        rows.push(row);
    }

    let widths: Vec<usize> = (0..rows[0].len())
        .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (c, w))| {
                if j < 3 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).expect("writing to a String");
    }
    out
}

/// One line per word; gold features are wrapped in asterisks.
pub fn ranked_words_to_table(words: &[RankedWord]) -> String {
    let mut out = String::new();
    for w in words {
        if let Ok(rows) = &w.rows {
            let feats: Vec<String> = rows
                .iter()
                .map(|r| {
                    if r.in_gold {
                        format!("*{}*", r.feature)
                    } else {
                        r.feature.clone()
                    }
                })
                .collect();
            writeln!(out, "{}\t{}", w.word, feats.join(" ")).expect("writing to a String");
        }
    }
    out
}

pub fn ranked_words_to_json(words: &[RankedWord]) -> String {
    let value: Vec<serde_json::Value> = words
        .iter()
        .map(|w| match &w.rows {
            Ok(rows) => serde_json::json!({ "word": w.word, "features": rows }),
            Err(e) => serde_json::json!({ "word": w.word, "error": e }),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&value).expect("rankings always serialize");
    s.push('\n');
    s
}
