//! Seeded train/test splitting and minimum-distance classification.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pipelines::{FeatureVector, PipelineKind};

pub const DEFAULT_TRAIN_PER_CLASS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TileId {
    pub source: String,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    /// Lexicographic rank of `class_label` among the dataset's classes.
    pub class_index: usize,
    pub class_label: String,
    pub tile_id: TileId,
    pub features: FeatureVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitSpec {
    pub seed: u64,
    pub train_per_class: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            train_per_class: DEFAULT_TRAIN_PER_CLASS,
        }
    }
}

/// Groups sample positions by class, preserving input order within a class.
fn by_class<'a, I>(samples: I) -> BTreeMap<usize, Vec<&'a LabeledSample>>
where
    I: IntoIterator<Item = &'a LabeledSample>,
{
    let mut groups: BTreeMap<usize, Vec<&LabeledSample>> = BTreeMap::new();
    for s in samples {
        groups.entry(s.class_index).or_default().push(s);
    }
    groups
}

/// Picks `count` of `0..len` without replacement.
///
/// The generator is ChaCha8 seeded with `seed` (via `seed_from_u64`) on stream
/// `stream`; the draw is a partial Fisher–Yates shuffle using
/// `random_range(k..len)` for step `k`. The chosen positions are returned in
/// ascending order.
pub fn choose_indices(seed: u64, stream: u64, len: usize, count: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut pool: Vec<usize> = (0..len).collect();
    for k in 0..count.min(len) {
        let j = rng.random_range(k..len);
        pool.swap(k, j);
    }
    let mut chosen = pool[..count.min(len)].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Per class, draws exactly `train_per_class` training samples; the rest are
/// test samples. Class `k` uses stream `k` of the seeded generator (see
/// [`choose_indices`]), so each class's split is independent of the others.
pub fn split(
    samples: &[LabeledSample],
    spec: SplitSpec,
) -> Result<(Vec<&LabeledSample>, Vec<&LabeledSample>)> {
    if spec.train_per_class == 0 {
        return Err(Error::InvalidSplit("train_per_class must be at least 1".into()));
    }
    let groups = by_class(samples);
    if groups.is_empty() {
        return Err(Error::InvalidSplit("no samples".into()));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (&class_index, members) in &groups {
        if members.len() <= spec.train_per_class {
            return Err(Error::InvalidSplit(format!(
                "class {} has {} samples, needs more than {}",
                members[0].class_label,
                members.len(),
                spec.train_per_class
            )));
        }
        let chosen = choose_indices(spec.seed, class_index as u64, members.len(), spec.train_per_class);
        let mut next = chosen.iter().peekable();
        for (pos, s) in members.iter().enumerate() {
            if next.peek() == Some(&&pos) {
                next.next();
                train.push(*s);
            } else {
                test.push(*s);
            }
        }
    }
    Ok((train, test))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassPrototype {
    pub class_index: usize,
    pub pipeline: PipelineKind,
    pub mean_vector: Vec<f64>,
}

fn check_pipeline(expected: PipelineKind, found: PipelineKind) -> Result<()> {
    if expected != found {
        return Err(Error::MixedPipelines {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

/// Entrywise mean of each class's training vectors, ordered by class index.
/// Class indices must be contiguous from 0.
pub fn build_prototypes<'a, I>(train: I) -> Result<Vec<ClassPrototype>>
where
    I: IntoIterator<Item = &'a LabeledSample>,
{
    let groups = by_class(train);
    let Some(first) = groups.values().next().and_then(|g| g.first()) else {
        return Err(Error::InvalidSplit("no training samples".into()));
    };
    let pipeline = first.features.pipeline;
    let mut prototypes = Vec::with_capacity(groups.len());
    for (expected, (&class_index, members)) in groups.iter().enumerate() {
        if class_index != expected {
            return Err(Error::InvalidSplit(format!(
                "class index {expected} has no training samples"
            )));
        }
        let dim = members[0].features.len();
        let mut sum = vec![0.0; dim];
        for s in members {
            check_pipeline(pipeline, s.features.pipeline)?;
            if s.features.len() != dim {
                return Err(Error::LengthMismatch {
                    left: s.features.len(),
                    right: dim,
                });
            }
            for (acc, v) in sum.iter_mut().zip(&s.features.values) {
                *acc += v;
            }
        }
        let count = members.len() as f64;
        prototypes.push(ClassPrototype {
            class_index,
            pipeline,
            mean_vector: sum.into_iter().map(|v| v / count).collect(),
        });
    }
    Ok(prototypes)
}

/// One "prototype" per training sample; classifying against these is the
/// 1-nearest-neighbor rule.
pub fn exemplars<'a, I>(train: I) -> Vec<ClassPrototype>
where
    I: IntoIterator<Item = &'a LabeledSample>,
{
    train
        .into_iter()
        .map(|s| ClassPrototype {
            class_index: s.class_index,
            pipeline: s.features.pipeline,
            mean_vector: s.features.values.clone(),
        })
        .collect()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Index of the class whose prototype is nearest; ties go to the lowest
/// class index regardless of list order.
pub fn classify(feature: &FeatureVector, prototypes: &[ClassPrototype]) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    for proto in prototypes {
        check_pipeline(proto.pipeline, feature.pipeline)?;
        let d = euclidean(&feature.values, &proto.mean_vector)?;
        let better = match best {
            None => true,
            Some((bd, bc)) => d < bd || (d == bd && proto.class_index < bc),
        };
        if better {
            best = Some((d, proto.class_index));
        }
    }
    best.map(|(_, c)| c).ok_or(Error::NoPrototypes)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionRule {
    /// Distance to the class mean of the training vectors.
    #[default]
    NearestPrototype,
    /// Distance to every individual training vector.
    NearestNeighbor,
}

impl DecisionRule {
    pub fn references<'a, I>(self, train: I) -> Result<Vec<ClassPrototype>>
    where
        I: IntoIterator<Item = &'a LabeledSample>,
    {
        match self {
            DecisionRule::NearestPrototype => build_prototypes(train),
            DecisionRule::NearestNeighbor => Ok(exemplars(train)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub pipeline: PipelineKind,
    pub class_labels: Vec<String>,
    /// `confusion[k][m]`: class-`k` test samples assigned to class `m`.
    pub confusion: Vec<Vec<u64>>,
    /// Fractions in `[0, 1]`.
    pub per_class_accuracy: Vec<f64>,
    /// Unweighted mean of `per_class_accuracy`.
    pub average_accuracy: f64,
}

pub fn unweighted_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn evaluate<'a, I>(test: I, prototypes: &[ClassPrototype]) -> Result<EvaluationReport>
where
    I: IntoIterator<Item = &'a LabeledSample>,
{
    let test: Vec<&LabeledSample> = test.into_iter().collect();
    let Some(first) = test.first() else {
        return Err(Error::InvalidSplit("empty test set".into()));
    };
    if prototypes.is_empty() {
        return Err(Error::NoPrototypes);
    }
    let pipeline = first.features.pipeline;
    let classes = test
        .iter()
        .map(|s| s.class_index)
        .chain(prototypes.iter().map(|p| p.class_index))
        .max()
        .unwrap_or(0)
        + 1;

    let predictions: Vec<usize> = test
        .par_iter()
        .map(|s| {
            check_pipeline(pipeline, s.features.pipeline)?;
            classify(&s.features, prototypes)
        })
        .collect::<Result<_>>()?;

    let mut labels: Vec<Option<String>> = vec![None; classes];
    let mut confusion = vec![vec![0u64; classes]; classes];
    for (s, &predicted) in test.iter().zip(&predictions) {
        labels[s.class_index].get_or_insert_with(|| s.class_label.clone());
        confusion[s.class_index][predicted] += 1;
    }

    let class_labels = labels
        .into_iter()
        .enumerate()
        .map(|(k, l)| l.ok_or_else(|| Error::InvalidSplit(format!("class index {k} has no test samples"))))
        .collect::<Result<Vec<_>>>()?;
    let per_class_accuracy: Vec<f64> = confusion
        .iter()
        .enumerate()
        .map(|(k, row)| row[k] as f64 / row.iter().sum::<u64>() as f64)
        .collect();
    let average_accuracy = unweighted_mean(&per_class_accuracy);

    Ok(EvaluationReport {
        pipeline,
        class_labels,
        confusion,
        per_class_accuracy,
        average_accuracy,
    })
}
