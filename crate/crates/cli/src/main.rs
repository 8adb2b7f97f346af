//! `sg`: batch workflows over sketch corpora.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::LevelFilter;
use sg_core::ingest::GeneratorProfile;
use sg_core::PrimitiveType;

#[derive(Parser, Debug)]
#[command(name = "sg", version, about = "Parametric CAD sketch toolkit")]
struct Cli {
    /// Worker threads for per-sketch work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Corpus statistics report.
    Stats(StatsArgs),
    /// Keep sketches that pass the corpus filters.
    Filter(FilterArgs),
    /// Seeded train/test split.
    Split(SplitArgs),
    /// Construction sequences, optionally tokenized.
    Sequence(SequenceArgs),
    /// Compression-based entropy rate of tokenized sequences.
    Entropy(EntropyArgs),
    /// Solve every sketch.
    Solve(SolveArgs),
    /// Drag one primitive and re-solve.
    Edit(EditArgs),
    /// Infer constraints for each sketch.
    Autoconstrain(AutoArgs),
    /// Precision, recall and F1 of predicted constraints.
    Eval(EvalArgs),
    /// SVG output for one sketch.
    Render(RenderArgs),
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Corpus file (or use --in).
    #[arg(required_unless_present = "input", conflicts_with = "input")]
    path: Option<PathBuf>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Also write comma-separated tables to this directory.
    #[arg(long)]
    csv_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FilterArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    min_primitives: usize,
    #[arg(long, default_value_t = 1)]
    min_constraints: usize,
    #[arg(long)]
    max_primitives: Option<usize>,
    /// Comma-separated primitive types, e.g. Point,Line,Circle,Arc.
    #[arg(long, value_delimiter = ',', value_parser = parse_primitive_type)]
    allowed_types: Option<Vec<PrimitiveType>>,
}

#[derive(Args, Debug)]
struct SplitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    test_count: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Canonical,
    ConstraintsLast,
}

#[derive(Args, Debug)]
struct SequenceArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Order::Canonical)]
    order: Order,
    /// Write token streams, one per line, to this file.
    #[arg(long)]
    tokens: Option<PathBuf>,
    /// Write the token vocabulary as JSON to this file.
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long)]
    max_primitives: Option<usize>,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    #[arg(long)]
    max_primitives: Option<usize>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    /// Comma-separated primitive ids held in place.
    #[arg(long, value_delimiter = ',')]
    fixed: Vec<String>,
}

#[derive(Args, Debug)]
struct EditArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Sketch id, or a 0-based record index.
    #[arg(long)]
    id: String,
    /// Primitive to drag.
    #[arg(long)]
    primitive: String,
    /// Displacement `dx,dy` in meters.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    translate: (f64, f64),
    #[arg(long, value_delimiter = ',')]
    fixed: Vec<String>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AutoArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Drop the input constraints before inference instead of keeping them
    /// alongside the predictions.
    #[arg(long)]
    strip_constraints: bool,
    #[arg(long, default_value_t = sg_core::autoconstrain::DEFAULT_DOF_TARGET)]
    dof_target: usize,
    /// Satisfaction tolerance for candidate enumeration.
    #[arg(long, default_value_t = sg_core::autoconstrain::ENUMERATION_TOLERANCE)]
    tol: f64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gt: PathBuf,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Sketch id, or a 0-based record index.
    #[arg(long)]
    id: String,
    /// One SVG per construction step, written to --out-dir.
    #[arg(long, requires = "out_dir")]
    steps: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, required_unless_present = "steps")]
    out: Option<PathBuf>,
    /// Hand-drawn style with noise sigma = this fraction of the diagonal.
    #[arg(long, requires = "seed")]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    stroke_width: Option<f64>,
    /// Embed the sketch id (and seed) in an SVG comment.
    #[arg(long)]
    metadata: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "autoconstrain", value_parser = parse_profile)]
    profile: GeneratorProfile,
}

fn parse_primitive_type(s: &str) -> Result<PrimitiveType, String> {
    s.trim().parse().map_err(|e| format!("{e}"))
}

fn parse_profile(s: &str) -> Result<GeneratorProfile, String> {
    s.parse()
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected dx,dy")?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn init_logging() -> Result<(), String> {
    let level = match std::env::var("SG_LOG").as_deref() {
        Err(_) | Ok("") => LevelFilter::Warn,
        Ok("off") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        Ok(other) => return Err(format!("SG_LOG must be off, info or debug, not {other:?}")),
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Err(e) = init_logging() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
