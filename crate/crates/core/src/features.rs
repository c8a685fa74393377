//! Feature files: one CSV record per tile.
//!
//! ```text
//! #pipeline=LBPTS,dimension=6561,convention=lbp3x3-rowmajor-v1
//! class_label,source_image,tile_index,pipeline,v0,v1,...
//! bark,bark/d12.pgm,0,LBPTS,0.25,0,...
//! ```
//!
//! The first line is metadata; files produced under a different neighbor
//! convention are rejected on read. Values are written in Rust's shortest
//! round-trip float notation, so reading a file back reproduces the vectors
//! bit-for-bit.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read, Write};

use crate::classifier::{LabeledSample, TileId};
use crate::error::{Error, Result};
use crate::operators::CONVENTION_VERSION;
use crate::pipelines::{FeatureVector, PipelineKind};

const FIXED_COLUMNS: [&str; 4] = ["class_label", "source_image", "tile_index", "pipeline"];

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureFile {
    pub pipeline: PipelineKind,
    pub samples: Vec<LabeledSample>,
}

fn metadata_line(pipeline: PipelineKind) -> String {
    format!(
        "#pipeline={},dimension={},convention={}\n",
        pipeline,
        pipeline.dimension(),
        CONVENTION_VERSION
    )
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::MalformedFeatures {
        line,
        reason: e.to_string(),
    }
}

pub fn write_features<W: Write>(mut out: W, pipeline: PipelineKind, samples: &[LabeledSample]) -> Result<()> {
    let io = |e| Error::io("<feature output>", e);
    out.write_all(metadata_line(pipeline).as_bytes()).map_err(io)?;
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..pipeline.dimension()).map(|k| format!("v{k}")));
    writer.write_record(&header).map_err(csv_error)?;

    let mut record = Vec::with_capacity(header.len());
    for s in samples {
        if s.features.pipeline != pipeline {
            return Err(Error::MixedPipelines {
                expected: pipeline.to_string(),
                found: s.features.pipeline.to_string(),
            });
        }
        record.clear();
        record.push(s.class_label.clone());
        record.push(s.tile_id.source.clone());
        record.push(s.tile_id.index.to_string());
        record.push(pipeline.to_string());
        record.extend(s.features.values.iter().map(|v| v.to_string()));
        writer.write_record(&record).map_err(csv_error)?;
    }
    writer.flush().map_err(io)?;
    Ok(())
}

fn parse_metadata(line: &str) -> Result<PipelineKind> {
    let bad = |reason: String| Error::MalformedFeatures { line: 1, reason };
    let body = line
        .trim_end_matches(['\n', '\r'])
        .strip_prefix('#')
        .ok_or_else(|| bad("missing metadata line".into()))?;
    let mut pipeline = None;
    let mut dimension = None;
    let mut convention = None;
    for field in body.split(',') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| bad(format!("metadata field {field:?} is not key=value")))?;
        match key.trim() {
            "pipeline" => pipeline = Some(value.trim().parse::<PipelineKind>()?),
            "dimension" => {
                dimension = Some(
                    value
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| bad(format!("bad dimension {value:?}")))?,
                )
            }
            "convention" => convention = Some(value.trim().to_owned()),
            _ => {}
        }
    }
    let pipeline = pipeline.ok_or_else(|| bad("metadata lacks pipeline".into()))?;
    match dimension {
        Some(d) if d == pipeline.dimension() => {}
        Some(d) => {
            return Err(bad(format!(
                "dimension {d} does not match {pipeline} ({})",
                pipeline.dimension()
            )))
        }
        None => return Err(bad("metadata lacks dimension".into())),
    }
    match convention.as_deref() {
        Some(CONVENTION_VERSION) => Ok(pipeline),
        Some(other) => Err(bad(format!(
            "convention {other:?} differs from {CONVENTION_VERSION:?}"
        ))),
        None => Err(bad("metadata lacks convention".into())),
    }
}

struct RawRecord {
    label: String,
    source: String,
    index: usize,
    values: Vec<f64>,
}

pub fn read_features<R: Read>(input: R) -> Result<FeatureFile> {
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input
        .read_line(&mut first)
        .map_err(|e| Error::MalformedFeatures {
            line: 1,
            reason: e.to_string(),
        })?;
    let pipeline = parse_metadata(&first)?;
    let dim = pipeline.dimension();

    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.len() != FIXED_COLUMNS.len() + dim
        || header.iter().zip(FIXED_COLUMNS).any(|(h, want)| h != want)
    {
        return Err(Error::MalformedFeatures {
            line: 2,
            reason: "unexpected column header".into(),
        });
    }

    let mut raw = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 3;
        let record = record.map_err(csv_error)?;
        let bad = |reason: String| Error::MalformedFeatures { line, reason };
        if record.len() != FIXED_COLUMNS.len() + dim {
            return Err(bad(format!("expected {} fields, found {}", FIXED_COLUMNS.len() + dim, record.len())));
        }
        let index = record[2]
            .parse::<usize>()
            .map_err(|_| bad(format!("bad tile index {:?}", &record[2])))?;
        if record[3].parse::<PipelineKind>()? != pipeline {
            return Err(bad(format!("record pipeline {} differs from {pipeline}", &record[3])));
        }
        let values = record
            .iter()
            .skip(FIXED_COLUMNS.len())
            .map(|v| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(bad(format!("bad value {v:?}"))),
            })
            .collect::<Result<Vec<f64>>>()?;
        raw.push(RawRecord {
            label: record[0].to_owned(),
            source: record[1].to_owned(),
            index,
            values,
        });
    }

    let labels: BTreeSet<&str> = raw.iter().map(|r| r.label.as_str()).collect();
    let rank = |label: &str| labels.iter().position(|&l| l == label).unwrap_or(0);
    let ranks: Vec<usize> = raw.iter().map(|r| rank(&r.label)).collect();
    let samples = raw
        .into_iter()
        .zip(ranks)
        .map(|(r, class_index)| {
            Ok(LabeledSample {
                class_index,
                class_label: r.label,
                tile_id: TileId {
                    source: r.source,
                    index: r.index,
                },
                features: FeatureVector::new(pipeline, r.values)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureFile { pipeline, samples })
}

pub fn parse_features(bytes: &[u8]) -> Result<FeatureFile> {
    read_features(bytes)
}
