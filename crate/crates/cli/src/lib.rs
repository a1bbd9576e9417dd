//! The `abn` command line tool: learn, score, predict, evaluate, verify and
//! generate synthetic data.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage, I/O or schema
//! errors.

pub mod model;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use abn_core::dataset::read_instances_from_path;
use abn_core::learner::learn_structure;
use abn_core::mdl::mdl_score;
use abn_core::oracle::{brute_force_optimal, OracleOptions, DEFAULT_ENUMERATION_CAP};
use abn_core::sampling::sample_dataset;
use abn_core::{
    Dataset, FittedClassifier, LearnOptions, LogBase, MissingPolicy, Mode, Schema, Smoothing,
    WeightMode,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{format_real, ModelDocument};

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] abn_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "abn", version, about = "Learn and apply augmented Bayes network classifiers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a structure and its parameters from a CSV file.
    Learn(LearnArgs),
    /// Recompute the MDL score of a saved model's structure on a CSV file.
    Score(ScoreArgs),
    /// Predict the class of every row of a CSV file.
    Predict(PredictArgs),
    /// Report accuracy and the confusion matrix on labelled data.
    Eval(EvalArgs),
    /// Compare the learner against exhaustive search over all forests.
    Verify(VerifyArgs),
    /// Sample a synthetic CSV data set from a model.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Naive,
    Tan,
    Abn,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Naive => Mode::Naive,
            ModeArg::Tan => Mode::Tan,
            ModeArg::Abn => Mode::Abn,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    /// Conditional mutual information of the pair.
    Cost,
    /// Information minus the pair's parameter penalty.
    Gain,
}

impl From<WeightArg> for WeightMode {
    fn from(w: WeightArg) -> Self {
        match w {
            WeightArg::Cost => WeightMode::Cost,
            WeightArg::Gain => WeightMode::Gain,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SmoothingArg {
    Mle,
    Laplace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    Natural,
    Two,
}

impl From<LogBaseArg> for LogBase {
    fn from(b: LogBaseArg) -> Self {
        match b {
            LogBaseArg::Natural => LogBase::Natural,
            LogBaseArg::Two => LogBase::Two,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MissingArg {
    /// Skip rows with an empty cell.
    DropRow,
    /// Fail on the first empty cell.
    Error,
}

impl From<MissingArg> for MissingPolicy {
    fn from(m: MissingArg) -> Self {
        match m {
            MissingArg::DropRow => MissingPolicy::DropRow,
            MissingArg::Error => MissingPolicy::Error,
        }
    }
}

/// CSV reading options shared by every command that reads data.
#[derive(Debug, Args)]
pub struct CsvArgs {
    /// Field delimiter (a single ASCII character).
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// What to do with rows that have empty cells.
    #[arg(long, value_enum, default_value_t = MissingArg::DropRow)]
    pub missing: MissingArg,
}

impl CsvArgs {
    fn delimiter(&self) -> Result<u8, CliError> {
        u8::try_from(self.delimiter)
            .ok()
            .filter(u8::is_ascii)
            .ok_or_else(|| CliError::Usage(format!("delimiter `{}` is not ASCII", self.delimiter)))
    }

    fn load(&self, path: &Path, class: &str) -> Result<Dataset, CliError> {
        Ok(Dataset::load_csv(path, class, self.missing.into(), self.delimiter()?)?)
    }

    fn load_with_schema(&self, path: &Path, schema: &Schema) -> Result<Dataset, CliError> {
        Ok(Dataset::load_csv_with_schema(
            path,
            schema,
            self.missing.into(),
            self.delimiter()?,
        )?)
    }
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    /// Training data (CSV with a header row).
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the class column.
    #[arg(long)]
    pub class: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Abn)]
    pub mode: ModeArg,
    /// Edge weight for the spanning forest (ignored by --mode tan, which
    /// always uses cost).
    #[arg(long, value_enum, default_value_t = WeightArg::Cost)]
    pub weight: WeightArg,
    #[arg(long, value_enum, default_value_t = SmoothingArg::Laplace)]
    pub smoothing: SmoothingArg,
    /// Pseudo-count for Laplace smoothing.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = LogBaseArg::Natural)]
    pub log_base: LogBaseArg,
    /// Where to write the model document (JSON).
    #[arg(long)]
    pub output: PathBuf,
    /// Fraction of rows held out for a test accuracy report.
    #[arg(long, requires = "seed")]
    pub holdout: Option<f64>,
    /// Seed for the holdout split.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the base the model was learned with.
    #[arg(long, value_enum)]
    pub log_base: Option<LogBaseArg>,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Rows to classify; a class column, if present, is ignored.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Labelled rows, class column included.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub class: String,
    /// Largest attribute count searched exhaustively; above the default the
    /// search becomes very slow.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub max_attributes: usize,
    #[arg(long, value_enum, default_value_t = LogBaseArg::Natural)]
    pub log_base: LogBaseArg,
    /// Which learner must reach the optimum for exit status 0.
    #[arg(long, value_enum, default_value_t = WeightArg::Gain)]
    pub require: WeightArg,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Model document to sample from; probabilities may be plain numbers.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output CSV; standard output if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Runs a parsed command, writing reports to `out`. Returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Learn(args) => learn(args, out),
        Command::Score(args) => score(args, out),
        Command::Predict(args) => predict(args, out),
        Command::Eval(args) => eval(args, out),
        Command::Verify(args) => verify(args, out),
        Command::Gen(args) => gen(args, out),
    }
}

fn smoothing(kind: SmoothingArg, alpha: f64) -> Result<Smoothing, CliError> {
    match kind {
        SmoothingArg::Mle => Ok(Smoothing::Mle),
        SmoothingArg::Laplace if alpha > 0.0 && alpha.is_finite() => Ok(Smoothing::Laplace(alpha)),
        SmoothingArg::Laplace => Err(CliError::Usage(format!(
            "--alpha must be positive, got {alpha}"
        ))),
    }
}

fn split_holdout(data: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset), CliError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "--holdout must be strictly between 0 and 1, got {fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..data.n_rows()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = ((data.n_rows() as f64) * fraction).round() as usize;
    if n_test == 0 || n_test == data.n_rows() {
        return Err(CliError::Usage(format!(
            "--holdout {fraction} leaves an empty split of {} rows",
            data.n_rows()
        )));
    }
    let (test, train) = order.split_at(n_test);
    let (mut train, mut test) = (train.to_vec(), test.to_vec());
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.select_rows(&train)?, data.select_rows(&test)?))
}

fn learn(args: LearnArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let smoothing = smoothing(args.smoothing, args.alpha)?;
    let data = args.csv.load(&args.input, &args.class)?;
    let (train, test) = match args.holdout {
        Some(fraction) => {
            let seed = args.seed.expect("clap enforces --seed with --holdout");
            let (train, test) = split_holdout(&data, fraction, seed)?;
            (train, Some(test))
        }
        None => (data, None),
    };

    let mode = Mode::from(args.mode);
    let weight = match mode {
        Mode::Tan => WeightMode::Cost,
        _ => args.weight.into(),
    };
    let base = LogBase::from(args.log_base);
    let structure = learn_structure::<f64>(&train, &LearnOptions::new(mode, weight).with_base(base))?;
    let score: f64 = mdl_score(&structure, &train, base)?;
    let model = FittedClassifier::fit(structure, &train, smoothing)?;
    let evaluation = test.as_ref().map(|t| model.evaluate(t)).transpose()?;

    ModelDocument::from_classifier(&model, mode, weight, Some(score)).save(&args.output)?;

    let schema = model.schema();
    writeln!(out, "mode: {mode} (weight: {weight}, log base: {base})")?;
    writeln!(out, "rows: {}", train.n_rows())?;
    writeln!(out, "arcs: {}", model.structure().arcs().len())?;
    for arc in model.structure().arcs() {
        writeln!(
            out,
            "  {} -> {}",
            schema.attribute(arc.parent).name,
            schema.attribute(arc.child).name
        )?;
    }
    writeln!(out, "parameters: {}", model.structure().parameter_count())?;
    writeln!(out, "mdl: {}", format_real(score))?;
    if let (Some(e), Some(t)) = (evaluation, test) {
        writeln!(out, "holdout rows: {}", t.n_rows())?;
        writeln!(out, "holdout accuracy: {:.6} ({}/{})", e.accuracy, e.correct, e.n_rows)?;
    }
    writeln!(out, "model: {}", args.output.display())?;
    Ok(EXIT_OK)
}

fn load_model(path: &Path) -> Result<FittedClassifier, CliError> {
    ModelDocument::load(path)?.to_classifier()
}

fn score(args: ScoreArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let model = load_model(&args.model)?;
    let data = args.csv.load_with_schema(&args.input, model.schema())?;
    let base = args.log_base.map(LogBase::from).unwrap_or(model.meta().base);
    let score: f64 = mdl_score(model.structure(), &data, base)?;
    writeln!(out, "rows: {}", data.n_rows())?;
    writeln!(out, "parameters: {}", model.structure().parameter_count())?;
    writeln!(out, "mdl: {}", format_real(score))?;
    Ok(EXIT_OK)
}

fn predict(args: PredictArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let model = load_model(&args.model)?;
    let instances = read_instances_from_path(
        &args.input,
        model.schema(),
        args.csv.missing.into(),
        args.csv.delimiter()?,
    )?;
    let class = model.schema().class_attribute();
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["prediction".to_string()];
    header.extend(class.domain.iter().map(|label| format!("p_{label}")));
    writer.write_record(&header)?;
    for instance in &instances {
        let p = model.predict(instance)?;
        let mut record = vec![p.label];
        record.extend(p.posterior.iter().map(|&q| format_real(q)));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(EXIT_OK)
}

fn eval(args: EvalArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let model = load_model(&args.model)?;
    let data = args.csv.load_with_schema(&args.input, model.schema())?;
    let e = model.evaluate(&data)?;
    let labels = &model.schema().class_attribute().domain;
    writeln!(out, "rows: {}", e.n_rows)?;
    writeln!(out, "accuracy: {:.6} ({}/{})", e.accuracy, e.correct, e.n_rows)?;
    writeln!(out, "confusion (rows: actual, columns: predicted):")?;
    let width = labels
        .iter()
        .map(String::len)
        .chain(e.confusion.iter().flatten().map(|c| c.to_string().len()))
        .max()
        .unwrap_or(1);
    write!(out, "{:>width$}", "")?;
    for label in labels {
        write!(out, " {label:>width$}")?;
    }
    writeln!(out)?;
    for (label, row) in labels.iter().zip(&e.confusion) {
        write!(out, "{label:>width$}")?;
        for count in row {
            write!(out, " {count:>width$}")?;
        }
        writeln!(out)?;
    }
    Ok(EXIT_OK)
}

fn format_edges(schema: &Schema, edges: &[(usize, usize)]) -> String {
    if edges.is_empty() {
        return "(none)".to_string();
    }
    edges
        .iter()
        .map(|&(i, j)| format!("{}-{}", schema.attribute(i).name, schema.attribute(j).name))
        .collect::<Vec<_>>()
        .join(", ")
}

fn verdict(matches: bool) -> &'static str {
    if matches {
        "MATCH"
    } else {
        "MISMATCH"
    }
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let data = args.csv.load(&args.input, &args.class)?;
    let options = OracleOptions {
        cap: args.max_attributes,
        base: args.log_base.into(),
    };
    let report = brute_force_optimal::<f64>(&data, &options)?;
    let schema = data.schema();
    writeln!(out, "attributes: {}", schema.n_features())?;
    writeln!(out, "structures examined: {}", report.structures_examined)?;
    writeln!(out, "optimal mdl: {}", format_real(report.optimal_mdl))?;
    for set in &report.optimal_arc_sets {
        writeln!(out, "optimal edges: {}", format_edges(schema, set))?;
    }
    writeln!(
        out,
        "gain learner: {} mdl {} edges {}",
        verdict(report.learner_matches),
        format_real(report.learner_mdl),
        format_edges(schema, &report.learner_edges)
    )?;
    writeln!(
        out,
        "cost learner: {} mdl {} edges {}",
        verdict(report.cost_mode_matches),
        format_real(report.cost_mode_mdl),
        format_edges(schema, &report.cost_mode_edges)
    )?;
    if !report.cost_mode_matches {
        writeln!(
            out,
            "cost learner gap: {}",
            format_real(report.cost_mode_mdl - report.optimal_mdl)
        )?;
    }
    writeln!(out, "tolerance: {:e}", report.tolerance)?;
    let matched = match args.require {
        WeightArg::Gain => report.learner_matches,
        WeightArg::Cost => report.cost_mode_matches,
    };
    Ok(if matched {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

fn gen(args: GenArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let model = load_model(&args.model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let data = sample_dataset(&model, args.rows, &mut rng)?;
    match &args.output {
        Some(path) => {
            let mut file = File::create(path).map_err(|e| CliError::io(path, e))?;
            write_dataset(&data, &mut file)?;
            writeln!(out, "wrote {} rows to {}", data.n_rows(), path.display())?;
        }
        None => write_dataset(&data, out)?,
    }
    Ok(EXIT_OK)
}

fn write_dataset(data: &Dataset, out: &mut dyn Write) -> Result<(), CliError> {
    let schema = data.schema();
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(schema.attributes().iter().map(|a| a.name.as_str()))?;
    for r in 0..data.n_rows() {
        writer.write_record(
            (0..schema.len()).map(|k| schema.attribute(k).domain[data.value(r, k)].as_str()),
        )?;
    }
    writer.flush()?;
    Ok(())
}
