//! Dataset-level feature extraction, repeated split/classify trials, and the
//! report files written by the command-line tool.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::{self, DecisionRule, EvaluationReport, LabeledSample, SplitSpec, TileId};
use crate::error::{Error, Result};
use crate::features;
use crate::imageio::{self, Dataset, DEFAULT_TILE_SIZE};
use crate::operators::CONVENTION_VERSION;
use crate::pipelines::{self, PipelineKind};

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub dataset_root: Option<PathBuf>,
    pub feature_files: Vec<PathBuf>,
    pub pipelines: Vec<PipelineKind>,
    pub tile_size: usize,
    pub train_per_class: usize,
    pub seed: u64,
    pub trials: usize,
    pub rule: DecisionRule,
    pub out_dir: PathBuf,
    pub quiet: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset_root: None,
            feature_files: Vec::new(),
            pipelines: PipelineKind::ALL.to_vec(),
            tile_size: DEFAULT_TILE_SIZE,
            train_per_class: classifier::DEFAULT_TRAIN_PER_CLASS,
            seed: 0,
            trials: 1,
            rule: DecisionRule::NearestPrototype,
            out_dir: PathBuf::from("out"),
            quiet: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pipelines.is_empty() && self.feature_files.is_empty() {
            return Err(Error::InvalidConfig("select at least one pipeline".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.train_per_class == 0 {
            return Err(Error::InvalidConfig("train-per-class must be at least 1".into()));
        }
        Ok(())
    }

    /// `seed, seed + 1, ..., seed + trials - 1` (wrapping).
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.trials as u64).map(|t| self.seed.wrapping_add(t)).collect()
    }

    fn progress(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractSummary {
    pub images_read: usize,
    pub tiles: usize,
    /// `(path, reason)` of every image that could not be used.
    pub skipped: Vec<(PathBuf, String)>,
}

/// Samples per pipeline, each list in (class, image, tile index) order.
pub type SampleSets = BTreeMap<PipelineKind, Vec<LabeledSample>>;

fn source_id(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Tiles every image and runs each pipeline on every tile. Unreadable or
/// undersized images are skipped and reported in the summary.
pub fn extract_dataset(
    dataset: &Dataset,
    pipelines: &[PipelineKind],
    tile_size: usize,
) -> Result<(SampleSets, ExtractSummary)> {
    if tile_size < pipelines::MIN_TILE_SIDE {
        return Err(Error::InvalidTileSize {
            tile_size,
            reason: format!("pipelines need at least {}", pipelines::MIN_TILE_SIDE),
        });
    }
    let mut sets: SampleSets = pipelines.iter().map(|&p| (p, Vec::new())).collect();
    let mut summary = ExtractSummary::default();
    for (class_index, class) in dataset.classes.iter().enumerate() {
        for path in &class.images {
            let tiles = imageio::load_image(path).and_then(|img| imageio::tile(&img, tile_size));
            let tiles = match tiles {
                Ok(t) => t,
                Err(e) => {
                    summary.skipped.push((path.clone(), e.to_string()));
                    continue;
                }
            };
            summary.images_read += 1;
            summary.tiles += tiles.len();
            let source = source_id(&dataset.root, path);
            for &pipeline in pipelines {
                let vectors = tiles
                    .tiles
                    .par_iter()
                    .map(|t| pipelines::extract(t, pipeline))
                    .collect::<Result<Vec<_>>>()?;
                let out = sets.get_mut(&pipeline).expect("pipeline inserted above");
                out.extend(vectors.into_iter().enumerate().map(|(index, features)| LabeledSample {
                    class_index,
                    class_label: class.label.clone(),
                    tile_id: TileId {
                        source: source.clone(),
                        index,
                    },
                    features,
                }));
            }
        }
    }
    reindex_classes(&mut sets);
    Ok((sets, summary))
}

/// Class indices must be contiguous even when a whole class was skipped.
fn reindex_classes(sets: &mut SampleSets) {
    for samples in sets.values_mut() {
        let mut present: Vec<usize> = samples.iter().map(|s| s.class_index).collect();
        present.sort_unstable();
        present.dedup();
        for s in samples.iter_mut() {
            s.class_index = present.binary_search(&s.class_index).expect("index collected above");
        }
    }
}

pub fn feature_file_name(pipeline: PipelineKind) -> String {
    format!("features_{pipeline}.csv")
}

pub fn write_feature_files(out_dir: &Path, sets: &SampleSets) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    for (&pipeline, samples) in sets {
        let path = out_dir.join(feature_file_name(pipeline));
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        features::write_features(std::io::BufWriter::new(file), pipeline, samples)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub pipeline: PipelineKind,
    pub seed: u64,
    /// Class label → accuracy fraction.
    pub per_class: BTreeMap<String, f64>,
    pub confusion: Vec<Vec<u64>>,
    pub average: f64,
}

impl TrialReport {
    fn new(seed: u64, report: &EvaluationReport) -> Self {
        Self {
            pipeline: report.pipeline,
            seed,
            per_class: report
                .class_labels
                .iter()
                .cloned()
                .zip(report.per_class_accuracy.iter().copied())
                .collect(),
            confusion: report.confusion.clone(),
            average: report.average_accuracy,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineSummary {
    pub pipeline: PipelineKind,
    pub class_labels: Vec<String>,
    pub trials: Vec<TrialReport>,
    /// Per-class accuracy averaged over trials, in class-index order.
    pub mean_per_class: Vec<f64>,
    pub mean_average: f64,
    /// Sample standard deviation of the average accuracy; 0 for one trial.
    pub std_average: f64,
}

pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One split/prototype/classify round per seed.
pub fn run_trials(
    samples: &[LabeledSample],
    train_per_class: usize,
    seeds: &[u64],
    rule: DecisionRule,
) -> Result<PipelineSummary> {
    let Some(first) = samples.first() else {
        return Err(Error::InvalidDataset("no samples to evaluate".into()));
    };
    let classes = samples.iter().map(|s| s.class_index).max().unwrap_or(0) + 1;
    if classes < 2 {
        return Err(Error::InvalidDataset("need at least 2 classes to classify".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("no seeds".into()));
    }
    let mut class_labels = Vec::new();
    let mut trials = Vec::with_capacity(seeds.len());
    let mut per_class_sum = vec![0.0; classes];
    for &seed in seeds {
        let (train, test) = classifier::split(samples, SplitSpec { seed, train_per_class })?;
        let refs = rule.references(train)?;
        let report = classifier::evaluate(test, &refs)?;
        for (acc, v) in per_class_sum.iter_mut().zip(&report.per_class_accuracy) {
            *acc += v;
        }
        class_labels.clone_from(&report.class_labels);
        trials.push(TrialReport::new(seed, &report));
    }
    let averages: Vec<f64> = trials.iter().map(|t| t.average).collect();
    let (mean_average, std_average) = mean_and_std(&averages);
    let n = seeds.len() as f64;
    Ok(PipelineSummary {
        pipeline: first.features.pipeline,
        class_labels,
        trials,
        mean_per_class: per_class_sum.into_iter().map(|s| s / n).collect(),
        mean_average,
        std_average,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MachineReport {
    pub convention: &'static str,
    pub rule: DecisionRule,
    pub train_per_class: usize,
    pub seeds: Vec<u64>,
    pub pipelines: Vec<PipelineSummary>,
}

pub fn percent(fraction: f64) -> String {
    format!("{:.3}", 100.0 * fraction)
}

/// Rows are classes, columns are pipelines; accuracies in percent.
pub fn accuracy_table(summaries: &[PipelineSummary]) -> String {
    let mut out = String::from("class");
    for s in summaries {
        write!(out, ",{}", s.pipeline).unwrap();
    }
    out.push('\n');
    let labels = summaries.first().map(|s| s.class_labels.clone()).unwrap_or_default();
    for (k, label) in labels.iter().enumerate() {
        out.push_str(&csv_field(label));
        for s in summaries {
            let cell = s.mean_per_class.get(k).map_or_else(String::new, |&v| percent(v));
            write!(out, ",{cell}").unwrap();
        }
        out.push('\n');
    }
    out.push_str("Average");
    for s in summaries {
        write!(out, ",{}", percent(s.mean_average)).unwrap();
    }
    out.push('\n');
    if summaries.iter().any(|s| s.trials.len() > 1) {
        out.push_str("StdDev");
        for s in summaries {
            write!(out, ",{}", percent(s.std_average)).unwrap();
        }
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Long-format `pipeline<TAB>class<TAB>accuracy_pct` rows for plotting.
pub fn plot_data(summaries: &[PipelineSummary]) -> String {
    let mut out = String::from("# pipeline\tclass\taccuracy_pct\n");
    for s in summaries {
        for (label, v) in s.class_labels.iter().zip(&s.mean_per_class) {
            writeln!(out, "{}\t{}\t{}", s.pipeline, label, percent(*v)).unwrap();
        }
        writeln!(out, "{}\tAverage\t{}", s.pipeline, percent(s.mean_average)).unwrap();
    }
    out
}

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TABLE: &str = "accuracy_table.csv";
pub const REPORT_PLOT: &str = "accuracy_plot.tsv";

pub fn write_reports(out_dir: &Path, report: &MachineReport) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    let files = [
        (REPORT_JSON, json),
        (REPORT_TABLE, accuracy_table(&report.pipelines)),
        (REPORT_PLOT, plot_data(&report.pipelines)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Reads `dataset_root` (extracting on the fly) or the given feature files,
/// then runs every selected pipeline over all seeds.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MachineReport> {
    config.validate()?;
    let sets = load_samples(config)?;
    let seeds = config.seeds();
    let mut pipelines = Vec::with_capacity(sets.len());
    for (pipeline, samples) in &sets {
        config.progress(format!("evaluating {pipeline} over {} seed(s)", seeds.len()));
        pipelines.push(run_trials(samples, config.train_per_class, &seeds, config.rule)?);
    }
    Ok(MachineReport {
        convention: CONVENTION_VERSION,
        rule: config.rule,
        train_per_class: config.train_per_class,
        seeds,
        pipelines,
    })
}

fn load_samples(config: &ExperimentConfig) -> Result<SampleSets> {
    let mut sets = SampleSets::new();
    for path in &config.feature_files {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let parsed = features::read_features(file)?;
        if sets.insert(parsed.pipeline, parsed.samples).is_some() {
            return Err(Error::InvalidConfig(format!(
                "pipeline {} given by more than one feature file",
                parsed.pipeline
            )));
        }
    }
    if let Some(root) = &config.dataset_root {
        let wanted: Vec<PipelineKind> = config
            .pipelines
            .iter()
            .copied()
            .filter(|p| !sets.contains_key(p))
            .collect();
        if !wanted.is_empty() {
            let dataset = imageio::scan_dataset(root)?;
            let (extracted, summary) = extract_dataset(&dataset, &wanted, config.tile_size)?;
            report_skipped(&summary);
            sets.extend(extracted);
        }
    } else if !config.feature_files.is_empty() && !config.pipelines.is_empty() {
        sets.retain(|p, _| config.pipelines.contains(p));
    }
    if sets.is_empty() {
        return Err(Error::InvalidConfig(
            "nothing to evaluate: give --dataset or --features".into(),
        ));
    }
    Ok(sets)
}

pub fn report_skipped(summary: &ExtractSummary) {
    for (path, reason) in &summary.skipped {
        eprintln!("warning: skipped {}: {reason}", path.display());
    }
}
