use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ndk_core::{Error, KernelSpec, Result, SmoConfig};

#[derive(Debug, Parser)]
#[command(name = "ndk", version, about = "NDK support vector machines for text categorization")]
pub struct Cli {
    /// Threads for per-category training.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,

    /// Also write the resolved run configuration (JSON) here.
    #[arg(long, global = true)]
    pub run_config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Tokenize a labelled corpus and write train/validation/test feature files.
    Featurize(FeaturizeArgs),
    /// Train a binary model, or one model per category with --out-dir.
    Train(TrainArgs),
    /// Decision values of a binary model.
    Predict(PredictArgs),
    /// Multi-label evaluation of a model directory.
    Eval(EvalArgs),
    /// Prediction timing of every path and reference kernel.
    Bench(BenchArgs),
    /// Exhaustive hyperparameter search on a validation split.
    Gridsearch(GridArgs),
    /// Documents per number of categories and per category.
    Histogram(HistogramArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct FeaturizeArgs {
    /// Directory with one UTF-8 text file per document.
    #[arg(long)]
    pub corpus: PathBuf,
    /// `doc_id<TAB>cat[,cat...]` lines.
    #[arg(long)]
    pub labels: PathBuf,
    /// Output prefix.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// `gmean` (per-category tfidf/GSS geometric mean) or `tfidf`.
    #[arg(long, default_value = "gmean")]
    pub mode: String,
    /// Train, validation and test fractions.
    #[arg(long, default_value = "0.6,0.2,0.2")]
    pub split: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Map unlabelled documents to the category `none`.
    #[arg(long)]
    pub none_category: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KernelArgs {
    /// linear, square, cubic, poly, rbf or ndk.
    #[arg(long, default_value = "ndk")]
    pub kernel: String,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c: f64,
    /// Polynomial degree for `poly`.
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
}

impl KernelArgs {
    pub fn spec(&self) -> Result<KernelSpec> {
        match self.kernel.as_str() {
            "linear" => Ok(KernelSpec::Linear),
            "square" => KernelSpec::polynomial(self.a, self.c, 2),
            "cubic" => KernelSpec::polynomial(self.a, self.c, 3),
            "poly" => KernelSpec::polynomial(self.a, self.c, self.degree),
            "rbf" => KernelSpec::rbf(self.gamma),
            "ndk" => KernelSpec::ndk(self.a, self.c),
            other => Err(Error::InvalidInput(format!("unknown kernel `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SmoArgs {
    /// Soft-margin penalty.
    #[arg(long = "C", default_value_t = 1.0)]
    pub cost: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 10)]
    pub max_passes: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4096)]
    pub cache_rows: usize,
}

impl SmoArgs {
    pub fn config(&self) -> SmoConfig {
        SmoConfig {
            c: self.cost,
            tol: self.tol,
            max_passes: self.max_passes,
            max_iters: self.max_iters,
            seed: self.seed,
            cache_rows: self.cache_rows,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    /// Feature file, or a directory of per-category feature files.
    #[arg(long)]
    pub data: PathBuf,
    /// Positive category for a binary model; without it labels must be +1/-1.
    #[arg(long)]
    pub category: Option<String>,
    /// Binary model output.
    #[arg(long, conflicts_with = "out_dir", required_unless_present = "out_dir")]
    pub out: Option<PathBuf>,
    /// One model per category, written as `<category>.model`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub smo: SmoArgs,
    /// Duplicate positives until each category reaches the target ratio.
    #[arg(long)]
    pub oversample: bool,
    /// Positive ratio for --oversample; defaults to the largest ratio found.
    #[arg(long)]
    pub target_ratio: Option<f64>,
    /// Held-out data used to retune each bias for F1.
    #[arg(long)]
    pub tune_on: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Feature file, or a per-category directory together with --category.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub category: Option<String>,
    /// dual, precomputed or primal.
    #[arg(long, default_value = "dual")]
    pub path: String,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// Directory written by `train --out-dir`.
    #[arg(long)]
    pub models: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "dual")]
    pub path: String,
    /// fallback or independent.
    #[arg(long, default_value = "fallback")]
    pub mode: String,
    /// Print aligned text instead of TSV.
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// Directory with `ndk/` (required) and optional `square/`, `cubic/`,
    /// `rbf/`, `linear/` model directories.
    #[arg(long, required_unless_present = "synthetic")]
    pub models: Option<PathBuf>,
    /// Probe data for --models.
    #[arg(long, requires = "models")]
    pub data: Option<PathBuf>,
    /// Benchmark randomly generated models instead.
    #[arg(long, conflicts_with = "models")]
    pub synthetic: bool,
    #[arg(long, default_value_t = 10_000)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.01)]
    pub density: f64,
    /// Support vectors per synthetic model.
    #[arg(long, default_value_t = 2000)]
    pub m: usize,
    #[arg(long, default_value_t = 1000)]
    pub probes: usize,
    #[arg(long, default_value_t = 1)]
    pub categories: usize,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct GridArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub validation: PathBuf,
    /// linear, square, cubic, rbf or ndk.
    #[arg(long, default_value = "ndk")]
    pub family: String,
    /// Comma-separated C values replacing the default list.
    #[arg(long = "C")]
    pub cost: Option<String>,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "fallback")]
    pub mode: String,
    #[arg(long)]
    pub oversample: bool,
    /// Best configuration and full table as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct HistogramArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub none_category: bool,
}

pub fn parse_fractions(s: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("bad split `{s}`")))?;
    <[f64; 3]>::try_from(parts).map_err(|_| Error::InvalidInput(format!("split needs three fractions, got `{s}`")))
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number `{p}`")))
        })
        .collect()
}
