use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use ndarray::{Array1, Array2};

use super::StoreError;
use crate::corpus::{EmbeddingMatrix, Vocabulary};
use crate::f2v::{AdamState, F2vConfig, F2vModel};
use crate::plsr::PlsrModel;

pub const MAGIC: &str = "feature2vec-archive";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    F2v,
    Plsr,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::F2v => "f2v",
            ModelKind::Plsr => "plsr",
        }
    }
}

/// Train/test concept names and the seed that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRecord {
    pub seed: u64,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArchivedModel {
    F2v(F2vModel),
    Plsr {
        model: PlsrModel,
        features: Vocabulary,
    },
}

impl ArchivedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            ArchivedModel::F2v(_) => ModelKind::F2v,
            ArchivedModel::Plsr { .. } => ModelKind::Plsr,
        }
    }
}

/// A model plus the run metadata needed to reproduce and evaluate it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelArchive {
    /// Free-form run configuration echo; keys and values must be single-line
    /// and keys must not contain whitespace.
    pub run: BTreeMap<String, String>,
    pub split: Option<SplitRecord>,
    pub model: ArchivedModel,
}

impl ModelArchive {
    pub fn new(model: ArchivedModel) -> Self {
        Self {
            run: BTreeMap::new(),
            split: None,
            model,
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.model.kind()
    }

    /// Serializes to the text archive format. Output is a pure function of
    /// the archive contents.
    pub fn to_text(&self) -> String {
        let mut w = Writer::default();
        w.line(MAGIC);
        w.line(&format!("format_version {FORMAT_VERSION}"));
        w.line(&format!("kind {}", self.kind().as_str()));
        for (k, v) in &self.run {
            w.line(&format!("run {k} {v}"));
        }
        if let Some(split) = &self.split {
            w.line(&format!("split_seed {}", split.seed));
            w.tokens("split_train", &split.train);
            w.tokens("split_test", &split.test);
        }
        match &self.model {
            ArchivedModel::F2v(m) => {
                let c = m.config();
                for (k, v) in config_pairs(c) {
                    w.line(&format!("config {k} {v}"));
                }
                w.line(&format!("adam_step {}", m.adam().t));
                w.tokens("features", m.features().entries());
                w.tokens("concepts", m.words().vocab().entries());
                w.matrix("words", m.words().rows());
                w.matrix("feature_embeddings", m.feature_embeddings());
                w.matrix("adam_m", &m.adam().m);
                w.matrix("adam_v", &m.adam().v);
            }
            ArchivedModel::Plsr { model, features } => {
                w.line(&format!(
                    "inner_iterations {}",
                    join(model.inner_iterations().iter().map(|v| v.to_string()))
                ));
                w.tokens("features", features.entries());
                w.vector("x_mean", model.x_mean().as_slice().expect("contiguous"));
                w.vector("y_mean", model.y_mean().as_slice().expect("contiguous"));
                w.vector("residual_ss", model.residual_ss());
                w.matrix("x_weights", model.x_weights());
                w.matrix("x_loadings", model.x_loadings());
                w.matrix("y_loadings", model.y_loadings());
            }
        }
        w.line("end");
        w.out
    }

    pub fn from_text(text: &str) -> Result<Self, StoreError> {
        let mut r = Reader::new(text);
        let magic = r.next_line()?;
        if magic != MAGIC {
            return Err(r.err(format!("not an archive (first line {magic:?})")));
        }
        let version: u32 = r
            .keyed("format_version")?
            .parse()
            .map_err(|_| r.err("bad format_version".into()))?;
        if version != FORMAT_VERSION {
            return Err(StoreError::UnsupportedVersion {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let kind = match r.keyed("kind")? {
            "f2v" => ModelKind::F2v,
            "plsr" => ModelKind::Plsr,
            other => return Err(r.err(format!("unknown kind {other:?}"))),
        };
        let mut run = BTreeMap::new();
        while let Some(rest) = r.peek_keyed("run") {
            let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
            run.insert(k.to_string(), v.to_string());
            r.advance();
        }
        let split = if r.peek_keyed("split_seed").is_some() {
            let seed = r
                .keyed("split_seed")?
                .parse()
                .map_err(|_| r.err("bad split_seed".into()))?;
            let train = r.tokens("split_train")?;
            let test = r.tokens("split_test")?;
            Some(SplitRecord { seed, train, test })
        } else {
            None
        };

        let model = match kind {
            ModelKind::F2v => {
                let mut pairs = BTreeMap::new();
                while let Some(rest) = r.peek_keyed("config") {
                    let (k, v) = rest
                        .split_once(' ')
                        .ok_or_else(|| r.err("config line without value".into()))?;
                    pairs.insert(k.to_string(), v.to_string());
                    r.advance();
                }
                let config = config_from_pairs(&pairs).map_err(|m| block_err("config", m))?;
                let t: u64 = r
                    .keyed("adam_step")?
                    .parse()
                    .map_err(|_| r.err("bad adam_step".into()))?;
                let features = vocab("features", r.tokens("features")?)?;
                let concepts = vocab("concepts", r.tokens("concepts")?)?;
                let words = r.matrix("words")?;
                let embeddings = r.matrix("feature_embeddings")?;
                let m = r.matrix("adam_m")?;
                let v = r.matrix("adam_v")?;
                let words = EmbeddingMatrix::new(concepts, words)
                    .map_err(|e| block_err("words", e.to_string()))?;
                let model = F2vModel::from_parts(
                    features,
                    embeddings,
                    Arc::new(words),
                    config,
                    AdamState { m, v, t },
                )
                .map_err(|e| block_err("feature_embeddings", e.to_string()))?;
                ArchivedModel::F2v(model)
            }
            ModelKind::Plsr => {
                let iters = r.keyed("inner_iterations")?;
                let inner_iterations = iters
                    .split_ascii_whitespace()
                    .map(str::parse)
                    .collect::<Result<Vec<usize>, _>>()
                    .map_err(|_| block_err("inner_iterations", "not integers".into()))?;
                let features = vocab("features", r.tokens("features")?)?;
                let x_mean = r.vector("x_mean")?;
                let y_mean = r.vector("y_mean")?;
                let residual_ss = r.vector("residual_ss")?.to_vec();
                let w = r.matrix("x_weights")?;
                let p = r.matrix("x_loadings")?;
                let q = r.matrix("y_loadings")?;
                if y_mean.len() != features.len() {
                    return Err(block_err(
                        "y_mean",
                        format!("length {} for {} features", y_mean.len(), features.len()),
                    ));
                }
                let model = PlsrModel::from_parts(x_mean, y_mean, w, p, q)
                    .map_err(|e| block_err("x_weights", e.to_string()))?
                    .with_diagnostics(inner_iterations, residual_ss);
                ArchivedModel::Plsr { model, features }
            }
        };
        if r.next_line()? != "end" {
            return Err(r.err("expected end marker".into()));
        }
        Ok(Self { run, split, model })
    }
}

pub fn save_archive(archive: &ModelArchive, path: impl AsRef<Path>) -> Result<(), StoreError> {
    let path = path.as_ref();
    fs::write(path, archive.to_text()).map_err(|e| StoreError::io(path, e))
}

pub fn load_archive(path: impl AsRef<Path>) -> Result<ModelArchive, StoreError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| StoreError::io(path, e))?;
    ModelArchive::from_text(&text)
}

/// Saves a bare model with no run metadata.
pub fn save_model(model: ArchivedModel, path: impl AsRef<Path>) -> Result<(), StoreError> {
    save_archive(&ModelArchive::new(model), path)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ArchivedModel, StoreError> {
    Ok(load_archive(path)?.model)
}

fn config_pairs(c: &F2vConfig) -> Vec<(&'static str, String)> {
    vec![
        ("dim", c.dim.to_string()),
        ("learning_rate", float(c.learning_rate)),
        ("epochs", c.epochs.to_string()),
        ("negative_rate", c.negative_rate.to_string()),
        ("batch_size", c.batch_size.to_string()),
        ("adam_beta1", float(c.adam_beta1)),
        ("adam_beta2", float(c.adam_beta2)),
        ("adam_epsilon", float(c.adam_epsilon)),
        ("init_scale", float(c.init_scale)),
        ("seed", c.seed.to_string()),
    ]
}

fn config_from_pairs(p: &BTreeMap<String, String>) -> Result<F2vConfig, String> {
    fn get<T: std::str::FromStr>(p: &BTreeMap<String, String>, key: &str) -> Result<T, String> {
        p.get(key)
            .ok_or_else(|| format!("missing {key}"))?
            .parse()
            .map_err(|_| format!("invalid {key}"))
    }
    Ok(F2vConfig {
        dim: get(p, "dim")?,
        learning_rate: get(p, "learning_rate")?,
        epochs: get(p, "epochs")?,
        negative_rate: get(p, "negative_rate")?,
        batch_size: get(p, "batch_size")?,
        adam_beta1: get(p, "adam_beta1")?,
        adam_beta2: get(p, "adam_beta2")?,
        adam_epsilon: get(p, "adam_epsilon")?,
        init_scale: get(p, "init_scale")?,
        seed: get(p, "seed")?,
    })
}

fn vocab(block: &str, tokens: Vec<String>) -> Result<Vocabulary, StoreError> {
    Vocabulary::from_entries(tokens).map_err(|e| block_err(block, e.to_string()))
}

fn block_err(block: &str, message: String) -> StoreError {
    StoreError::Block {
        block: block.to_string(),
        message,
    }
}

/// 17 significant digits: exact round trip for `f64`.
fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(" ")
}

#[derive(Default)]
struct Writer {
    out: String,
}

impl Writer {
    fn line(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn tokens(&mut self, name: &str, tokens: &[String]) {
        self.line(&format!("tokens {name} {}", tokens.len()));
        for t in tokens {
            self.line(t);
        }
    }

    fn vector(&mut self, name: &str, values: &[f64]) {
        self.line(&format!("vector {name} {}", values.len()));
        self.line(&join(values.iter().map(|&v| float(v))));
    }

    fn matrix(&mut self, name: &str, m: &Array2<f64>) {
        self.line(&format!("matrix {name} {} {}", m.nrows(), m.ncols()));
        for row in m.rows() {
            let mut line = String::with_capacity(row.len() * 24);
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                write!(line, "{v:.16e}").expect("writing to a String");
            }
            self.line(&line);
        }
    }
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().collect(),
            pos: 0,
        }
    }

    fn err(&self, message: String) -> StoreError {
        StoreError::Parse {
            line: self.pos,
            message,
        }
    }

    fn next_line(&mut self) -> Result<&'a str, StoreError> {
        let line = *self
            .lines
            .get(self.pos)
            .ok_or(StoreError::Truncated { line: self.pos + 1 })?;
        self.pos += 1;
        Ok(line)
    }

    fn advance(&mut self) {
        self.pos += 1;
    }

    fn peek_keyed(&self, key: &str) -> Option<&'a str> {
        let line = self.lines.get(self.pos)?;
        line.strip_prefix(key)?.strip_prefix(' ')
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str, StoreError> {
        let line = self.next_line()?;
        if line == key {
            return Ok("");
        }
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected {key:?}, found {line:?}")))
    }

    fn header(&mut self, kind: &str, name: &str) -> Result<Vec<usize>, StoreError> {
        let rest = self.keyed(kind)?;
        let mut parts = rest.split(' ');
        if parts.next() != Some(name) {
            return Err(self.err(format!("expected {kind} {name:?}")));
        }
        parts
            .map(|p| {
                p.parse()
                    .map_err(|_| block_err(name, format!("bad shape {rest:?}")))
            })
            .collect()
    }

    fn tokens(&mut self, name: &str) -> Result<Vec<String>, StoreError> {
        let shape = self.header("tokens", name)?;
        let [n] = shape[..] else {
            return Err(block_err(name, "expected one length".into()));
        };
        (0..n)
            .map(|_| self.next_line().map(str::to_string))
            .collect()
    }

    fn floats(&mut self, name: &str, expected: usize) -> Result<Vec<f64>, StoreError> {
        let line = self.next_line()?;
        let values = line
            .split_ascii_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| block_err(name, format!("line {}: bad number {t:?}", self.pos)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != expected {
            return Err(block_err(
                name,
                format!(
                    "line {}: expected {expected} values, found {}",
                    self.pos,
                    values.len()
                ),
            ));
        }
        Ok(values)
    }

    fn vector(&mut self, name: &str) -> Result<Array1<f64>, StoreError> {
        let shape = self.header("vector", name)?;
        let [n] = shape[..] else {
            return Err(block_err(name, "expected one length".into()));
        };
        Ok(Array1::from(self.floats(name, n)?))
    }

    fn matrix(&mut self, name: &str) -> Result<Array2<f64>, StoreError> {
        let shape = self.header("matrix", name)?;
        let [rows, cols] = shape[..] else {
            return Err(block_err(name, "expected rows and columns".into()));
        };
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            data.extend(self.floats(name, cols)?);
        }
        Array2::from_shape_vec((rows, cols), data).map_err(|e| block_err(name, e.to_string()))
    }
}
