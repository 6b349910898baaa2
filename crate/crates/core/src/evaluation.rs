//! Scoring of localization runs against ground truth.
//!
//! Only frames with visible ground truth are scored. A scored frame without a
//! prediction counts toward `missing_fraction` and contributes no error.
//! Sums run in frame-id order with pairwise summation so that results do not
//! depend on how frames were produced.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::AnnotationRecord;
use crate::geometry::{camera_floor_distance, CameraConfig, FloorPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no visible ground-truth frames to evaluate")]
    EmptyGroundTruth,
    #[error("no errors to summarise")]
    EmptyInput,
    #[error("need at least 2 predicted frames, got {0}")]
    InsufficientData(usize),
    #[error("unknown scenario label `{0}`")]
    UnknownLabel(String),
    #[error("frame {0} has no scenario label")]
    Unlabeled(u64),
}

/// Per-frame predictions keyed by frame id; `None` marks a missing prediction.
pub type Predictions = BTreeMap<u64, Option<FloorPoint>>;

pub fn euclidean_error(gt: FloorPoint, pred: FloorPoint) -> f64 {
    ((gt.x - pred.x).powi(2) + (gt.y - pred.y).powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub error: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub mean: f64,
    /// Population standard deviation.
    pub stdev: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Frames with visible ground truth.
    pub n_frames: usize,
    pub n_predicted: usize,
    pub missing_fraction: f64,
    /// Absent when nothing was predicted.
    pub errors: Option<ErrorStats>,
    pub cdf: Vec<CdfPoint>,
}

impl EvalReport {
    pub fn mean(&self) -> Option<f64> {
        self.errors.map(|e| e.mean)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite")
    }
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Errors of predicted frames in frame order, plus counts.
fn scored_errors(predictions: &Predictions, ground_truth: &[AnnotationRecord]) -> (Vec<(u64, f64)>, usize) {
    let mut gt: Vec<&AnnotationRecord> = ground_truth.iter().filter(|r| r.visible).collect();
    gt.sort_by_key(|r| r.frame_id);
    let errors = gt
        .iter()
        .filter_map(|r| {
            let pred = predictions.get(&r.frame_id).copied().flatten()?;
            Some((r.frame_id, euclidean_error(r.position, pred)))
        })
        .collect();
    (errors, gt.len())
}

pub fn evaluate_run(predictions: &Predictions, ground_truth: &[AnnotationRecord]) -> Result<EvalReport, EvalError> {
    let (errors, n_frames) = scored_errors(predictions, ground_truth);
    if n_frames == 0 {
        return Err(EvalError::EmptyGroundTruth);
    }
    let values: Vec<f64> = errors.iter().map(|(_, e)| *e).collect();
    Ok(report_from_errors(&values, n_frames))
}

fn report_from_errors(values: &[f64], n_frames: usize) -> EvalReport {
    let n_predicted = values.len();
    let missing_fraction = (n_frames - n_predicted) as f64 / n_frames as f64;
    let (errors, cdf) = if values.is_empty() {
        (None, Vec::new())
    } else {
        let n = values.len() as f64;
        let mean = pairwise_sum(values) / n;
        let squares: Vec<f64> = values.iter().map(|e| (e - mean).powi(2)).collect();
        let stdev = (pairwise_sum(&squares) / n).sqrt();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (
            Some(ErrorStats {
                // the mean can round just outside [min, max] for nearly constant data
                mean: mean.clamp(min, max),
                stdev,
                min,
                max,
            }),
            error_cdf(values).expect("non-empty"),
        )
    };
    EvalReport {
        n_frames,
        n_predicted,
        missing_fraction,
        errors,
        cdf,
    }
}

/// Empirical CDF: the i-th smallest error is paired with `(i + 1) / n`.
pub fn error_cdf(errors: &[f64]) -> Result<Vec<CdfPoint>, EvalError> {
    if errors.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, error)| CdfPoint {
            error,
            fraction: (i + 1) as f64 / n,
        })
        .collect())
}

/// Two-column CSV with a header row.
pub fn cdf_to_csv(cdf: &[CdfPoint]) -> String {
    let mut out = String::from("error_cm,cumulative_fraction\n");
    for p in cdf {
        out.push_str(&format!("{},{}\n", p.error, p.fraction));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceErrorSeries {
    /// `(distance, error)` in cm, in frame order.
    pub pairs: Vec<(f64, f64)>,
    /// Pearson coefficient; 0 when either series has zero variance.
    pub correlation: f64,
    pub degenerate: bool,
}

/// Pearson correlation, or `None` when either input has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = pairwise_sum(xs) / n;
    let my = pairwise_sum(ys) / n;
    let cross: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let vx: Vec<f64> = xs.iter().map(|x| (x - mx).powi(2)).collect();
    let vy: Vec<f64> = ys.iter().map(|y| (y - my).powi(2)).collect();
    let (sxy, sxx, syy) = (pairwise_sum(&cross), pairwise_sum(&vx), pairwise_sum(&vy));
    let scale_x = xs.iter().map(|x| x.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let scale_y = ys.iter().map(|y| y.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let flat = |s: f64, scale: f64| s <= (1e-12 * scale).powi(2) * n;
    if flat(sxx, scale_x) || flat(syy, scale_y) {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Error against the ground-truth distance from the camera's floor projection.
pub fn error_vs_distance(
    predictions: &Predictions,
    ground_truth: &[AnnotationRecord],
    cam: &CameraConfig,
) -> Result<DistanceErrorSeries, EvalError> {
    let gt: BTreeMap<u64, &AnnotationRecord> = ground_truth.iter().map(|r| (r.frame_id, r)).collect();
    let (errors, _) = scored_errors(predictions, ground_truth);
    if errors.len() < 2 {
        return Err(EvalError::InsufficientData(errors.len()));
    }
    let pairs: Vec<(f64, f64)> = errors
        .iter()
        .map(|(frame, e)| (camera_floor_distance(cam, gt[frame].position), *e))
        .collect();
    let ds: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let es: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (correlation, degenerate) = match pearson(&ds, &es) {
        Some(r) => (r, false),
        None => (0.0, true),
    };
    Ok(DistanceErrorSeries {
        pairs,
        correlation,
        degenerate,
    })
}

/// The five scenario types of the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioType {
    Baseline,
    Table,
    TableAndChair,
    TableSideways,
    TableStanding,
}

impl ScenarioType {
    pub const ALL: [ScenarioType; 5] = [
        ScenarioType::Baseline,
        ScenarioType::Table,
        ScenarioType::TableAndChair,
        ScenarioType::TableSideways,
        ScenarioType::TableStanding,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioType::Baseline => "baseline",
            ScenarioType::Table => "table",
            ScenarioType::TableAndChair => "table_and_chair",
            ScenarioType::TableSideways => "table_sideways",
            ScenarioType::TableStanding => "table_standing",
        }
    }

    /// 1-based type number.
    pub fn number(&self) -> u8 {
        ScenarioType::ALL.iter().position(|s| s == self).unwrap() as u8 + 1
    }
}

impl FromStr for ScenarioType {
    type Err = EvalError;

    /// Accepts either the type number `1..=5` or its snake_case name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        ScenarioType::ALL
            .into_iter()
            .find(|t| t.as_str() == s || t.number().to_string() == s)
            .ok_or_else(|| EvalError::UnknownLabel(s.to_string()))
    }
}

impl fmt::Display for ScenarioType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One report per scenario type present among the visible ground-truth frames.
pub fn group_by_scenario(
    predictions: &Predictions,
    ground_truth: &[AnnotationRecord],
    labels: &BTreeMap<u64, String>,
) -> Result<BTreeMap<ScenarioType, EvalReport>, EvalError> {
    let mut groups: BTreeMap<ScenarioType, Vec<AnnotationRecord>> = BTreeMap::new();
    for r in ground_truth.iter().filter(|r| r.visible) {
        let label = labels.get(&r.frame_id).ok_or(EvalError::Unlabeled(r.frame_id))?;
        groups.entry(label.parse()?).or_default().push(*r);
    }
    if groups.is_empty() {
        return Err(EvalError::EmptyGroundTruth);
    }
    groups
        .into_iter()
        .map(|(scenario, gt)| Ok((scenario, evaluate_run(predictions, &gt)?)))
        .collect()
}
