//! `feature2vec` command line: `train`, `evaluate`, `rank`.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage or input error. Errors
//! are reported as a single `feature2vec: error[<kind>]: <message>` line.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;

use crate::corpus::{
    align, lexicon_word, load_embeddings, make_split, parse_alias_file, parse_norms_file,
    AlignedNorms, CorpusError, DataSplit, EmbeddingMatrix,
};
use crate::eval::{self, EvalError, EvalOptions, Pool, Similarity};
use crate::f2v::{self, F2vConfig, F2vError};
use crate::linalg::rank_descending;
use crate::plsr::{self, PlsrError};
use crate::store::{self, ArchivedModel, ModelArchive, SplitRecord, StoreError};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOP_K: usize = 10;
pub const DEFAULT_COMPONENTS: usize = 50;

#[derive(Debug, Parser)]
#[command(
    name = "feature2vec",
    version,
    about = "Embed property norms in a pretrained word space"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Align inputs, split, fit a model and write an archive.
    Train(TrainArgs),
    /// Score an archived model: top-N retrieval and top-K feature overlap.
    Evaluate(EvaluateArgs),
    /// Print the top-ranked features for words from the lexicon.
    Rank(RankArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    F2v,
    Plsr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Pretrained vectors in GloVe text format.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Norms TSV with header `concept<TAB>feature<TAB>pf`.
    #[arg(long)]
    pub norms: PathBuf,
    /// Optional TSV mapping concept names to lexicon words.
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Reject embedding files whose dimension differs.
    #[arg(long)]
    pub expected_dim: Option<usize>,
}

/// Input overrides; anything omitted is taken from the archive.
#[derive(Debug, Clone, Default, Args)]
pub struct InputOverrides {
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub norms: Option<PathBuf>,
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    #[arg(long)]
    pub expected_dim: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Training concepts; defaults to 75% of the aligned concepts.
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long, default_value_t = F2vConfig::DEFAULT_EPOCHS)]
    pub epochs: usize,
    #[arg(long = "neg-rate", default_value_t = F2vConfig::DEFAULT_NEGATIVE_RATE)]
    pub negative_rate: usize,
    #[arg(long = "lr", default_value_t = F2vConfig::DEFAULT_LEARNING_RATE)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = F2vConfig::DEFAULT_BATCH_SIZE)]
    pub batch_size: usize,
    /// Uniform init half-width; defaults to 0.5 / dim.
    #[arg(long)]
    pub init_scale: Option<f64>,
    #[arg(long, default_value_t = 0.9)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.999)]
    pub beta2: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub adam_eps: f64,
    /// PLSR latent dimension.
    #[arg(long, default_value_t = DEFAULT_COMPONENTS)]
    pub components: usize,
    /// Label used in reports; defaults to the norms file stem.
    #[arg(long)]
    pub dataset: Option<String>,
    /// Archive destination.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch loss (f2v) or per-component RSS (plsr); defaults to `<out>.trace.tsv`.
    #[arg(long)]
    pub loss_trace: Option<PathBuf>,
    /// Dropped-concept report destination; defaults to stderr.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub inputs: InputOverrides,
    #[arg(long, value_delimiter = ',', default_values_t = eval::DEFAULT_NS)]
    pub ns: Vec<usize>,
    #[arg(long, value_enum, default_value_t = PoolArg::All)]
    pub pool: PoolArg,
    #[arg(long, value_enum, default_value_t = SimilarityArg::Cosine)]
    pub similarity: SimilarityArg,
    /// Weight composed concept vectors by production frequency.
    #[arg(long)]
    pub weighted: bool,
    /// Expected split seed; a mismatch with the archive only warns.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub inputs: InputOverrides,
    #[arg(long, num_args = 1.., required = true)]
    pub words: Vec<String>,
    #[arg(long = "top", default_value_t = DEFAULT_TOP_K)]
    pub top_k: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PoolArg {
    All,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimilarityArg {
    Cosine,
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Input,
    Internal,
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Input, message)
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Internal => 1,
            ErrorKind::Usage | ErrorKind::Input => 2,
        }
    }

    /// Single machine-parsable line.
    pub fn line(&self) -> String {
        let kind = match self.kind {
            ErrorKind::Usage => "usage",
            ErrorKind::Input => "input",
            ErrorKind::Internal => "internal",
        };
        format!(
            "feature2vec: error[{kind}]: {}",
            self.message.replace('\n', " ")
        )
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<F2vError> for CliError {
    fn from(e: F2vError) -> Self {
        let kind = match e {
            F2vError::Config(_)
            | F2vError::DimensionMismatch { .. }
            | F2vError::Unsatisfiable(_) => ErrorKind::Input,
            _ => ErrorKind::Internal,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<PlsrError> for CliError {
    fn from(e: PlsrError) -> Self {
        let kind = match e {
            PlsrError::ComponentsOutOfRange { .. }
            | PlsrError::RankDeficient { .. }
            | PlsrError::TooFewSamples(_) => ErrorKind::Input,
            _ => ErrorKind::Internal,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::F2v(e) => e.into(),
            EvalError::Plsr(e) => e.into(),
            other => CliError::input(other.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.line());
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(args) => cmd_train(&args),
        Command::Evaluate(args) => cmd_evaluate(&args),
        Command::Rank(args) => cmd_rank(&args),
    }
}

fn require_file(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "{what} file not found: {}",
            path.display()
        )))
    }
}

struct LoadedInputs {
    data: AlignedNorms,
    lexicon: EmbeddingMatrix,
}

/// Parses norms and aliases, loads only the embedding rows that can be used
/// (concept words plus `extra_words`), and aligns.
fn load_inputs(inputs: &InputArgs, extra_words: &[String]) -> Result<LoadedInputs, CliError> {
    require_file(&inputs.norms, "norms")?;
    require_file(&inputs.embeddings, "embeddings")?;
    if let Some(a) = &inputs.aliases {
        require_file(a, "aliases")?;
    }
    let norms = parse_norms_file(&inputs.norms)?;
    let aliases = inputs.aliases.as_ref().map(parse_alias_file).transpose()?;
    let mut keep: HashSet<String> = norms
        .concepts()
        .entries()
        .iter()
        .map(|c| lexicon_word(c, aliases.as_ref()).to_string())
        .collect();
    keep.extend(extra_words.iter().map(|w| w.to_lowercase()));
    let lexicon = load_embeddings(&inputs.embeddings, inputs.expected_dim, Some(&keep))?;
    let data = align(&norms, &lexicon, aliases.as_ref())?;
    Ok(LoadedInputs { data, lexicon })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::new(ErrorKind::Internal, e.to_string()))
        }
    }
}

fn default_n_train(n_concepts: usize) -> usize {
    (n_concepts * 3 / 4).clamp(1, n_concepts.saturating_sub(1).max(1))
}

fn dataset_label(explicit: Option<&str>, norms: &Path) -> String {
    explicit
        .map(str::to_string)
        .or_else(|| norms.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "norms".into())
}

pub fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    let loaded = load_inputs(&args.inputs, &[])?;
    let data = &loaded.data;

    let mut report = Vec::new();
    data.write_report(&mut report).expect("writing to a Vec");
    match &args.report {
        Some(p) => {
            fs::write(p, &report).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?
        }
        None => {
            let _ = std::io::stderr().write_all(&report);
        }
    }

    let n = data.norms.n_concepts();
    if n < 2 {
        return Err(CliError::input(format!(
            "need at least 2 aligned concepts, found {n}"
        )));
    }
    let n_train = args.n_train.unwrap_or_else(|| default_n_train(n));
    let split = make_split(&data.norms, n_train, args.seed)?;
    let dim = data.vectors.dim();

    let mut run = BTreeMap::new();
    let dataset = dataset_label(args.dataset.as_deref(), &args.inputs.norms);
    run.insert("dataset".to_string(), dataset);
    run.insert(
        "embeddings".to_string(),
        args.inputs.embeddings.display().to_string(),
    );
    run.insert("norms".to_string(), args.inputs.norms.display().to_string());
    if let Some(a) = &args.inputs.aliases {
        run.insert("aliases".to_string(), a.display().to_string());
    }
    if let Some(d) = args.inputs.expected_dim {
        run.insert("expected_dim".to_string(), d.to_string());
    }
    run.insert("seed".to_string(), args.seed.to_string());
    run.insert("n_train".to_string(), n_train.to_string());
    run.insert(
        "dropped_concepts".to_string(),
        data.dropped_concepts.len().to_string(),
    );

    let (model, trace, summary) = match args.method {
        Method::F2v => {
            let config = F2vConfig {
                dim,
                learning_rate: args.learning_rate,
                epochs: args.epochs,
                negative_rate: args.negative_rate,
                batch_size: args.batch_size,
                adam_beta1: args.beta1,
                adam_beta2: args.beta2,
                adam_epsilon: args.adam_eps,
                init_scale: args.init_scale.unwrap_or(0.5 / dim as f64),
                seed: args.seed,
            };
            run.insert("method".to_string(), "f2v".to_string());
            let out = f2v::train(&data.norms, &split, Arc::new(data.vectors.clone()), &config)?;
            let mut trace = String::from("epoch\tmean_loss\n");
            for (i, l) in out.loss_trace.iter().enumerate() {
                writeln!(trace, "{}\t{l:.17e}", i + 1).expect("writing to a String");
            }
            let last = out
                .loss_trace
                .last()
                .map(|l| format!("{l:.6}"))
                .unwrap_or_else(|| "n/a".into());
            (
                ArchivedModel::F2v(out.model),
                trace,
                format!("final_loss={last}"),
            )
        }
        Method::Plsr => {
            run.insert("method".to_string(), "plsr".to_string());
            run.insert("components".to_string(), args.components.to_string());
            let (x, y) = plsr_training_data(data, split.train());
            let model = plsr::fit(x.view(), y.view(), args.components)?;
            let mut trace = String::from("component\tresidual_ss\n");
            for (i, r) in model.residual_ss().iter().enumerate() {
                writeln!(trace, "{}\t{r:.17e}", i + 1).expect("writing to a String");
            }
            let last = model.residual_ss().last().copied().unwrap_or(f64::NAN);
            let summary = format!("components={} residual_ss={last:.6}", model.n_components());
            let features = data.norms.features().clone();
            (ArchivedModel::Plsr { model, features }, trace, summary)
        }
    };

    let names = |set: &BTreeSet<usize>| {
        set.iter()
            .map(|&c| data.norms.concepts().token(c).to_string())
            .collect()
    };
    let archive = ModelArchive {
        run,
        split: Some(SplitRecord {
            seed: split.seed(),
            train: names(split.train()),
            test: names(split.test()),
        }),
        model,
    };
    store::save_archive(&archive, &args.out)?;
    let trace_path = args.loss_trace.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".trace.tsv");
        PathBuf::from(p)
    });
    fs::write(&trace_path, trace)
        .map_err(|e| CliError::input(format!("{}: {e}", trace_path.display())))?;

    println!(
        "trained {}: concepts={} train={} test={} features={} dropped={} {summary}",
        archive.kind().as_str(),
        n,
        split.train().len(),
        split.test().len(),
        data.norms.n_features(),
        data.dropped_concepts.len(),
    );
    Ok(())
}

/// Word vectors and production-frequency rows of `concepts`, in index order.
pub fn plsr_training_data(
    data: &AlignedNorms,
    concepts: &BTreeSet<usize>,
) -> (Array2<f64>, Array2<f64>) {
    let k = data.norms.n_features();
    let mut x = Array2::zeros((concepts.len(), data.vectors.dim()));
    let mut y = Array2::zeros((concepts.len(), k));
    for (i, &c) in concepts.iter().enumerate() {
        x.row_mut(i).assign(&data.vectors.row(c));
        for &(f, pf) in data.norms.features_of(c) {
            y[[i, f]] = f64::from(pf);
        }
    }
    (x, y)
}

fn resolve_inputs(
    overrides: &InputOverrides,
    archive: &ModelArchive,
) -> Result<InputArgs, CliError> {
    let recorded = |key: &str| archive.run.get(key).map(PathBuf::from);
    let missing = |what: &str| {
        CliError::new(
            ErrorKind::Usage,
            format!("--{what} not given and not recorded in the archive"),
        )
    };
    Ok(InputArgs {
        embeddings: overrides
            .embeddings
            .clone()
            .or_else(|| recorded("embeddings"))
            .ok_or_else(|| missing("embeddings"))?,
        norms: overrides
            .norms
            .clone()
            .or_else(|| recorded("norms"))
            .ok_or_else(|| missing("norms"))?,
        aliases: overrides.aliases.clone().or_else(|| recorded("aliases")),
        expected_dim: overrides
            .expected_dim
            .or_else(|| archive.run.get("expected_dim").and_then(|d| d.parse().ok())),
    })
}

fn restore_split(archive: &ModelArchive, data: &AlignedNorms) -> Result<DataSplit, CliError> {
    let record = archive
        .split
        .as_ref()
        .ok_or_else(|| CliError::input("archive has no recorded split"))?;
    let lookup = |names: &[String]| -> Result<BTreeSet<usize>, CliError> {
        names
            .iter()
            .map(|n| {
                data.norms.concepts().get(n).ok_or_else(|| {
                    CliError::input(format!("split concept {n:?} is not in the aligned norms"))
                })
            })
            .collect()
    };
    Ok(DataSplit::new(
        lookup(&record.train)?,
        lookup(&record.test)?,
        record.seed,
        data.norms.n_concepts(),
    )?)
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    require_file(&args.model, "model")?;
    let archive = store::load_archive(&args.model)?;
    let inputs = resolve_inputs(&args.inputs, &archive)?;
    let loaded = load_inputs(&inputs, &[])?;
    let split = restore_split(&archive, &loaded.data)?;
    if let Some(seed) = args.seed {
        if seed != split.seed() {
            log::warn!(
                "--seed {seed} differs from the archive's split seed {}; using the archived split",
                split.seed()
            );
        }
    }
    let opts = EvalOptions {
        ns: args.ns.clone(),
        pool: match args.pool {
            PoolArg::All => Pool::All,
            PoolArg::Test => Pool::Test,
        },
        similarity: match args.similarity {
            SimilarityArg::Cosine => Similarity::Cosine,
            SimilarityArg::Euclidean => Similarity::Euclidean,
        },
        weighted: args.weighted,
    };
    let dataset = archive
        .run
        .get("dataset")
        .cloned()
        .unwrap_or_else(|| dataset_label(None, &inputs.norms));
    let mut report = match &archive.model {
        ArchivedModel::F2v(model) => {
            if model.features() != loaded.data.norms.features() {
                return Err(CliError::input(
                    "archive features do not match the aligned norms",
                ));
            }
            eval::evaluate_f2v(model, &loaded.data, &split, &opts, &dataset)?
        }
        ArchivedModel::Plsr { model, features } => {
            if features != loaded.data.norms.features() {
                return Err(CliError::input(
                    "archive features do not match the aligned norms",
                ));
            }
            eval::evaluate_plsr(model, &loaded.data, &split, &opts, &dataset)?
        }
    };
    for (k, v) in &archive.run {
        report.parameters.insert(format!("run.{k}"), v.clone());
    }
    report.parameters.insert(
        "eval.pool".into(),
        format!("{:?}", opts.pool).to_lowercase(),
    );
    report.parameters.insert(
        "eval.ns".into(),
        opts.ns
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    let text = match args.format {
        Format::Json => store::report_to_json(&report),
        Format::Table => store::report_to_table(std::slice::from_ref(&report)),
    };
    write_output(args.out.as_deref(), &text)
}

pub fn cmd_rank(args: &RankArgs) -> Result<(), CliError> {
    if args.words.is_empty() {
        return Err(CliError::new(ErrorKind::Usage, "no words given"));
    }
    if args.top_k == 0 {
        return Err(CliError::new(ErrorKind::Usage, "--top must be positive"));
    }
    require_file(&args.model, "model")?;
    let archive = store::load_archive(&args.model)?;
    let inputs = resolve_inputs(&args.inputs, &archive)?;
    let loaded = load_inputs(&inputs, &args.words)?;
    let norms = &loaded.data.norms;
    let ranked = match &archive.model {
        ArchivedModel::F2v(model) => {
            eval::qualitative_table(model, &args.words, &loaded.lexicon, args.top_k, norms)
        }
        ArchivedModel::Plsr { model, features } => eval::qualitative_table_with(
            |v| {
                let y = model.predict(v)?;
                Ok(rank_descending(
                    y.as_slice().expect("contiguous"),
                    args.top_k,
                ))
            },
            features,
            &args.words,
            &loaded.lexicon,
            norms,
        ),
    };
    let mut ok = 0;
    for w in &ranked {
        match &w.rows {
            Ok(_) => ok += 1,
            Err(e) => eprintln!("feature2vec: error[word]: {e}"),
        }
    }
    let text = match args.format {
        Format::Json => store::ranked_words_to_json(&ranked),
        Format::Table => store::ranked_words_to_table(&ranked),
    };
    write_output(args.out.as_deref(), &text)?;
    if ok == 0 {
        return Err(CliError::input(
            "none of the requested words could be ranked",
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_split_size() {
        assert_eq!(default_n_train(541), 405);
        assert_eq!(default_n_train(2), 1);
        assert_eq!(default_n_train(4), 3);
    }

    #[test]
    fn parses_full_training_configuration() {
        let cli = Cli::try_parse_from([
            "feature2vec",
            "train",
            "--embeddings",
            "e.txt",
            "--norms",
            "n.tsv",
            "--method",
            "f2v",
            "--epochs",
            "120",
            "--neg-rate",
            "20",
            "--lr",
            "0.001",
            "--out",
            "m.archive",
        ])
        .unwrap();
        let Command::Train(t) = cli.command else {
            panic!()
        };
        assert_eq!(
            (t.epochs, t.negative_rate, t.learning_rate, t.seed),
            (120, 20, 0.001, 42)
        );
    }

    #[test]
    fn evaluate_defaults_to_table_one_columns() {
        let cli = Cli::try_parse_from(["feature2vec", "evaluate", "--model", "m"]).unwrap();
        let Command::Evaluate(e) = cli.command else {
            panic!()
        };
        assert_eq!(e.ns, vec![1, 5, 10, 20]);
        let cli = Cli::try_parse_from(["feature2vec", "evaluate", "--model", "m", "--ns", "1,3"])
            .unwrap();
        let Command::Evaluate(e) = cli.command else {
            panic!()
        };
        assert_eq!(e.ns, vec![1, 3]);
    }

    #[test]
    fn rank_requires_words() {
        assert!(Cli::try_parse_from(["feature2vec", "rank", "--model", "m"]).is_err());
        assert!(Cli::try_parse_from(["feature2vec", "rank", "--model", "m", "--words"]).is_err());
    }
}
