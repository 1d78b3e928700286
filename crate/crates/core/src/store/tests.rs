use std::sync::Arc;

use ndarray::array;

use super::*;
use crate::corpus::{read_norms, DataSplit, EmbeddingMatrix};
use crate::f2v::{self, F2vConfig};
use crate::plsr;

fn f2v_archive() -> ModelArchive {
    let norms =
        read_norms("concept\tfeature\tpf\ncat\ta\t5\ncat\tb\t6\ndog\tb\t7\ndog\tc\t5\n".as_bytes())
            .unwrap();
    let words = EmbeddingMatrix::new(
        norms.concepts().clone(),
        array![[0.3, -1.0, 0.25], [1.0e-7, 2.0, -0.0]],
    )
    .unwrap();
    let mut cfg = F2vConfig::new(3);
    cfg.epochs = 2;
    cfg.negative_rate = 1;
    let out = f2v::train(&norms, &DataSplit::all_train(2, 0), Arc::new(words), &cfg).unwrap();
    let mut archive = ModelArchive::new(ArchivedModel::F2v(out.model));
    archive.run.insert("norms".into(), "toy norms.tsv".into());
    archive.split = Some(SplitRecord {
        seed: 9,
        train: vec!["cat".into()],
        test: vec!["dog".into()],
    });
    archive
}

fn plsr_archive() -> ModelArchive {
    let x = array![[1.0, 0.3], [2.0, -0.7], [3.5, 0.1], [0.2, 1.9]];
    let y = array![
        [1.0, 0.0, 5.0],
        [0.0, 6.0, 1.0],
        [5.0, 1.0, 0.0],
        [2.0, 2.0, 2.0]
    ];
    let model = plsr::fit(x.view(), y.view(), 2).unwrap();
    let features = crate::corpus::Vocabulary::from_entries(["a", "b", "c"]).unwrap();
    ModelArchive::new(ArchivedModel::Plsr { model, features })
}

#[test]
fn round_trip_is_exact() {
    for archive in [f2v_archive(), plsr_archive()] {
        let text = archive.to_text();
        let back = ModelArchive::from_text(&text).unwrap();
        assert_eq!(back, archive);
        assert_eq!(back.to_text(), text);
    }
}

#[test]
fn save_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.archive");
    let b = dir.path().join("b.archive");
    save_archive(&f2v_archive(), &a).unwrap();
    save_archive(&f2v_archive(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(load_archive(&a).unwrap(), f2v_archive());
    save_model(plsr_archive().model, &a).unwrap();
    assert_eq!(load_model(&a).unwrap(), plsr_archive().model);
}

#[test]
fn truncated_archive_is_an_error() {
    let text = f2v_archive().to_text();
    for cut in [0, 10, text.len() / 3, text.len() / 2, text.len() - 5] {
        assert!(
            ModelArchive::from_text(&text[..cut]).is_err(),
            "cut at {cut}"
        );
    }
}

#[test]
fn newer_version_is_rejected() {
    let text = plsr_archive()
        .to_text()
        .replace("format_version 1", "format_version 2");
    assert!(matches!(
        ModelArchive::from_text(&text),
        Err(StoreError::UnsupportedVersion {
            found: 2,
            supported: 1
        })
    ));
}

#[test]
fn shape_mismatch_names_block() {
    let text = f2v_archive()
        .to_text()
        .replace("matrix adam_m 3 3", "matrix adam_m 2 3");
    match ModelArchive::from_text(&text) {
        Err(StoreError::Block { .. }) | Err(StoreError::Parse { .. }) => {}
        other => panic!("{other:?}"),
    }
    let text = plsr_archive()
        .to_text()
        .replace("tokens features 3\na\nb\nc", "tokens features 2\na\nb");
    match ModelArchive::from_text(&text) {
        Err(StoreError::Block { block, .. }) => assert_eq!(block, "y_mean"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn floats_use_seventeen_digits() {
    let text = plsr_archive().to_text();
    let line = text
        .lines()
        .find(|l| l.starts_with("vector x_mean"))
        .unwrap();
    assert!(line.ends_with(" 2"));
    let values = text
        .lines()
        .skip_while(|l| !l.starts_with("vector x_mean"))
        .nth(1)
        .unwrap();
    let first = values.split(' ').next().unwrap();
    let mantissa = first.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
}
