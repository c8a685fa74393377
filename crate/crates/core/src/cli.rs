//! Command-line front end: `transform`, `extract`, `evaluate`, `synth`.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classifier::{DecisionRule, DEFAULT_TRAIN_PER_CLASS};
use crate::error::{Error, Result};
use crate::experiment::{self, ExperimentConfig};
use crate::imageio::{self, DEFAULT_TILE_SIZE};
use crate::operators::{self, Operator};
use crate::pipelines::PipelineKind;
use crate::synth;

#[derive(Debug, Parser)]
#[command(name = "texclass", version, about = "Texture feature extraction and minimum-distance classification")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Suppress progress output.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a 3x3 operator to an image and write the code image as PGM.
    Transform(TransformArgs),
    /// Tile a dataset and write one feature file per pipeline.
    Extract(ExtractArgs),
    /// Split, classify and report accuracy per pipeline.
    Evaluate(EvaluateArgs),
    /// Write a deterministic synthetic texture dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OperatorArg {
    Lbp,
    Ts,
}

impl From<OperatorArg> for Operator {
    fn from(op: OperatorArg) -> Self {
        match op {
            OperatorArg::Lbp => Operator::Lbp,
            OperatorArg::Ts => Operator::TextureSpectrum,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    NearestPrototype,
    NearestNeighbor,
}

impl From<RuleArg> for DecisionRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::NearestPrototype => DecisionRule::NearestPrototype,
            RuleArg::NearestNeighbor => DecisionRule::NearestNeighbor,
        }
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Input PGM (8-bit).
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub op: OperatorArg,
    /// Output PGM of codes (maxval 255 for lbp, 6560 for ts).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the code histogram as `code<TAB>count` lines.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Pipeline to run; repeatable (default: all six).
    #[arg(long = "pipeline", value_parser = parse_pipeline)]
    pub pipelines: Vec<PipelineKind>,
    #[arg(long, default_value_t = DEFAULT_TILE_SIZE)]
    pub tile_size: usize,
}

impl PipelineArgs {
    fn selected(&self) -> Vec<PipelineKind> {
        if self.pipelines.is_empty() {
            PipelineKind::ALL.to_vec()
        } else {
            let mut p = self.pipelines.clone();
            p.sort();
            p.dedup();
            p
        }
    }
}

fn parse_pipeline(s: &str) -> Result<PipelineKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Dataset root laid out as `<root>/<class>/<image>.pgm`.
    #[arg(long)]
    pub dataset: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Output directory for `features_<PIPELINE>.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset root; features are extracted on the fly.
    #[arg(long, required_unless_present = "features")]
    pub dataset: Option<PathBuf>,
    /// Previously extracted feature file; repeatable.
    #[arg(long)]
    pub features: Vec<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long, default_value_t = DEFAULT_TRAIN_PER_CLASS)]
    pub train_per_class: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of splits, seeded `seed, seed+1, ...`.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "nearest-prototype")]
    pub rule: RuleArg,
    /// Output directory for the reports.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = synth::DEFAULT_SIZE)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn progress(quiet: bool, msg: impl AsRef<str>) {
    if !quiet {
        eprintln!("{}", msg.as_ref());
    }
}

fn transform(args: &TransformArgs, quiet: bool) -> Result<()> {
    let image = imageio::load_image(&args.input)?;
    let codes = operators::transform(&image, args.op.into())?;
    fs::write(&args.out, codes.to_pgm()).map_err(|e| Error::io(&args.out, e))?;
    if let Some(path) = &args.histogram {
        let hist = operators::histogram(&codes);
        let mut body = String::new();
        for (code, count) in hist.bins().iter().enumerate() {
            body.push_str(&format!("{code}\t{count}\n"));
        }
        fs::write(path, body).map_err(|e| Error::io(path, e))?;
    }
    progress(
        quiet,
        format!(
            "{}: {}x{} codes, alphabet {}",
            Operator::from(args.op),
            codes.width(),
            codes.height(),
            codes.alphabet()
        ),
    );
    Ok(())
}

fn extract(args: &ExtractArgs, quiet: bool) -> Result<()> {
    let dataset = imageio::scan_dataset(&args.dataset)?;
    let pipelines = args.pipeline.selected();
    progress(
        quiet,
        format!(
            "extracting {} pipeline(s) from {} class(es)",
            pipelines.len(),
            dataset.classes.len()
        ),
    );
    let (sets, summary) = experiment::extract_dataset(&dataset, &pipelines, args.pipeline.tile_size)?;
    experiment::report_skipped(&summary);
    if summary.images_read == 0 {
        return Err(Error::InvalidDataset("no readable images".into()));
    }
    let written = experiment::write_feature_files(&args.out, &sets)?;
    for path in &written {
        progress(quiet, format!("wrote {}", path.display()));
    }
    progress(
        quiet,
        format!(
            "{} image(s), {} tile(s), {} skipped",
            summary.images_read,
            summary.tiles,
            summary.skipped.len()
        ),
    );
    Ok(())
}

fn evaluate(args: &EvaluateArgs, quiet: bool) -> Result<()> {
    let config = ExperimentConfig {
        dataset_root: args.dataset.clone(),
        feature_files: args.features.clone(),
        pipelines: if args.pipeline.pipelines.is_empty() && !args.features.is_empty() {
            Vec::new()
        } else {
            args.pipeline.selected()
        },
        tile_size: args.pipeline.tile_size,
        train_per_class: args.train_per_class,
        seed: args.seed,
        trials: args.trials,
        rule: args.rule.into(),
        out_dir: args.out.clone(),
        quiet,
    };
    let report = experiment::run_experiment(&config)?;
    experiment::write_reports(&config.out_dir, &report)?;
    for s in &report.pipelines {
        if s.trials.len() > 1 {
            println!(
                "{}\t{} ± {}",
                s.pipeline,
                experiment::percent(s.mean_average),
                experiment::percent(s.std_average)
            );
        } else {
            println!("{}\t{}", s.pipeline, experiment::percent(s.mean_average));
        }
    }
    Ok(())
}

fn synth(args: &SynthArgs, quiet: bool) -> Result<()> {
    for path in synth::write_dataset(&args.out, args.size, args.seed)? {
        progress(quiet, format!("wrote {}", path.display()));
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let quiet = cli.quiet;
    pool.install(|| match &cli.command {
        Command::Transform(a) => transform(a, quiet),
        Command::Extract(a) => extract(a, quiet),
        Command::Evaluate(a) => evaluate(a, quiet),
        Command::Synth(a) => synth(a, quiet),
    })
}
