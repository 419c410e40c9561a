//! Command-line front end: argument definitions, configuration resolution,
//! exit codes and the subcommand implementations.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use massround::dataset::Annotation;
use massround::pipeline::{DetectMode, FeatureMode};
use massround::{Label, RunConfig, Stage};

pub mod commands;
pub mod records;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DETECTION: u8 = 3;
pub const EXIT_CONFIG: u8 = 4;

/// Error carrying the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub stage: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, stage: &'static str, message: impl Into<String>) -> Self {
        Self { code, stage, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, "input", message)
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, "config", message)
    }

    pub fn output(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(EXIT_FAILURE, "output", format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.stage, self.message)
    }
}

impl std::error::Error for CliError {}

pub fn stage_name(stage: Stage) -> &'static str {
    match stage {
        Stage::Input => "input",
        Stage::Detection => "detection",
        Stage::Geometry => "geometry",
        Stage::Classification => "classification",
        Stage::Config => "config",
    }
}

impl From<massround::Error> for CliError {
    fn from(e: massround::Error) -> Self {
        let stage = e.stage();
        let code = match stage {
            Stage::Input | Stage::Classification => EXIT_INPUT,
            Stage::Detection | Stage::Geometry => EXIT_DETECTION,
            Stage::Config => EXIT_CONFIG,
        };
        Self::new(code, stage_name(stage), e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "massround", version, about = "Roundness analysis of mammographic masses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one image and write a single-row feature CSV.
    Analyze(AnalyzeArgs),
    /// Analyze every annotated record of a MIAS-style image directory.
    Batch(BatchArgs),
    /// Train the linear classifier on a feature CSV.
    Train(TrainArgs),
    /// Evaluate a model, or score a predictions file.
    Eval(EvalArgs),
    /// Write a synthetic shape corpus.
    Synth(SynthArgs),
    /// Write the overlay, geometry and signature of one image.
    Render(RenderArgs),
}

fn parse_roi(s: &str) -> std::result::Result<Annotation, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, r] = parts.as_slice() else {
        return Err("expected X,Y,RADIUS".into());
    };
    let num = |v: &str| v.parse::<u32>().map_err(|_| format!("bad number {v:?}"));
    Ok(Annotation { center_x: num(x)?, center_y: num(y)?, radius: num(r)? })
}

fn parse_label(s: &str) -> std::result::Result<Label, String> {
    s.parse::<Label>().map_err(|_| format!("unknown label {s:?}"))
}

fn parse_kebab<T: serde::de::DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

/// Pipeline settings: a JSON file plus per-field overrides.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON file with any subset of the run configuration fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_bins: Option<usize>,
    #[arg(long)]
    pub smoothing_window: Option<usize>,
    #[arg(long)]
    pub prominence: Option<f64>,
    #[arg(long)]
    pub min_separation: Option<usize>,
    /// Side of the square structuring element.
    #[arg(long)]
    pub se_side: Option<usize>,
    #[arg(long)]
    pub min_area: Option<usize>,
    #[arg(long)]
    pub margin_factor: Option<f64>,
    /// Regularization strength of the classifier.
    #[arg(long = "lambda")]
    pub regularization: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// default, count-only or symmetric-diff.
    #[arg(long = "feature", value_parser = parse_kebab::<FeatureMode>)]
    pub feature_mode: Option<FeatureMode>,
    /// annotation or auto.
    #[arg(long, value_parser = parse_kebab::<DetectMode>)]
    pub detect: Option<DetectMode>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                RunConfig::from_json(&text).map_err(|e| CliError::config(e.to_string()))?
            }
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        apply!(
            n_bins,
            smoothing_window,
            prominence,
            min_separation,
            se_side,
            min_area,
            margin_factor,
            regularization,
            epochs,
            seed,
            test_fraction,
            feature_mode,
            detect
        );
        cfg.validate().map_err(|e| CliError::config(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Input PGM image.
    pub image: PathBuf,
    /// Lesion annotation X,Y,RADIUS in MIAS coordinates (origin bottom-left).
    #[arg(long, value_parser = parse_roi)]
    pub roi: Option<Annotation>,
    /// Known label recorded in the CSV row.
    #[arg(long, value_parser = parse_label)]
    pub label: Option<Label>,
    /// Row identifier; defaults to the file stem.
    #[arg(long)]
    pub id: Option<String>,
    /// Output CSV; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Also write the overlay image.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Input PGM image.
    pub image: PathBuf,
    /// Lesion annotation X,Y,RADIUS in MIAS coordinates (origin bottom-left).
    #[arg(long, value_parser = parse_roi)]
    pub roi: Option<Annotation>,
    /// Overlay PGM to write.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Polygon and circle as JSON.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Radial signature CSV.
    #[arg(long)]
    pub signature: Option<PathBuf>,
    /// Signature extrema CSV.
    #[arg(long)]
    pub extrema: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BatchArgs {
    /// Directory holding `<refnum>.pgm` images.
    #[arg(long)]
    pub images: PathBuf,
    /// MIAS info file.
    #[arg(long)]
    pub info: PathBuf,
    /// Output feature CSV.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Directory for per-image overlays.
    #[arg(long)]
    pub overlays: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Feature CSV with labels.
    #[arg(long)]
    pub features: PathBuf,
    /// Model JSON to write.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Feature CSV with labels.
    #[arg(long, requires = "model", conflicts_with = "predictions")]
    pub features: Option<PathBuf>,
    /// Model JSON written by `train`.
    #[arg(long, requires = "features")]
    pub model: Option<PathBuf>,
    /// CSV with `prediction` and `truth` label columns, scored directly.
    #[arg(long, required_unless_present = "features")]
    pub predictions: Option<PathBuf>,
    /// Score every labeled row instead of the model's held-out split.
    #[arg(long)]
    pub all: bool,
    /// Metrics JSON to write; the text table goes beside it with a .txt suffix.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Row label in the text table.
    #[arg(long, default_value = "Proposed")]
    pub scheme: String,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 40)]
    pub n_per_class: usize,
    /// Write 1024x1024 mammogram-like images plus a MIAS info file instead of masks.
    #[arg(long)]
    pub mias: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Batch(a) => commands::batch(&a).map(|_| ()),
        Command::Train(a) => commands::train(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Synth(a) => commands::synth(&a),
        Command::Render(a) => commands::render(&a),
    }
}
