//! detections → feet → floor → (fusion) → positions.
//!
//! Frames are independent. They may be processed on several threads but
//! the resulting tracks are always assembled in frame order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::{
    load_annotations, load_detections, load_scene_config, merge_ground_truth, AnnotationRecord, DatasetError,
    Detection, DetectionRecord, SceneConfig,
};
use crate::evaluation::{evaluate_run, EvalError, EvalReport, Predictions};
use crate::feet::{
    extend_bbox, feet_from_bbox, feet_from_skeleton_with, FeetEstimate, FeetMethod, SkeletonOptions,
    DEFAULT_BBOX_ASPECT,
};
use crate::fusion::{fuse_many, CameraEstimate};
use crate::geometry::{camera_floor_distance, camera_slant_distance, CameraConfig, FloorPoint, GeometryError, Homography};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("camera {camera}: {source}")]
    Geometry {
        camera: String,
        #[source]
        source: GeometryError,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Pose,
    Bbox,
    BboxExtended,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pose => "pose",
            Method::Bbox => "bbox",
            Method::BboxExtended => "bbox-extended",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pose" => Ok(Method::Pose),
            "bbox" => Ok(Method::Bbox),
            "bbox-extended" | "bbox_extended" => Ok(Method::BboxExtended),
            other => Err(format!("unknown method `{other}` (expected pose, bbox or bbox-extended)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Distance used to weight cameras during fusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FusionDistance {
    /// Along the floor from the camera's foot point.
    #[default]
    Floor,
    /// Straight line from the camera itself.
    Slant,
}

impl FusionDistance {
    pub fn as_str(&self) -> &'static str {
        match self {
            FusionDistance::Floor => "floor",
            FusionDistance::Slant => "slant",
        }
    }

    pub fn measure(&self, cam: &CameraConfig, p: FloorPoint) -> f64 {
        match self {
            FusionDistance::Floor => camera_floor_distance(cam, p),
            FusionDistance::Slant => camera_slant_distance(cam, p),
        }
    }
}

impl FromStr for FusionDistance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "floor" => Ok(FusionDistance::Floor),
            "slant" => Ok(FusionDistance::Slant),
            other => Err(format!("unknown fusion distance `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenes: Vec<SceneConfig>,
    pub method: Method,
    /// Proportions, confidence threshold, pairs and extension mode.
    pub skeleton: SkeletonOptions,
    pub bbox_aspect: f64,
    pub fuse: bool,
    pub fusion_distance: FusionDistance,
    /// Worker threads for per-frame work.
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(scenes: Vec<SceneConfig>) -> Self {
        Self {
            scenes,
            method: Method::Pose,
            skeleton: SkeletonOptions::default(),
            bbox_aspect: DEFAULT_BBOX_ASPECT,
            fuse: false,
            fusion_distance: FusionDistance::Floor,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.scenes.is_empty() {
            return Err(PipelineError::Config("at least one scene is required".into()));
        }
        for s in &self.scenes {
            s.validate()?;
        }
        let ids = self.camera_ids();
        if ids.iter().collect::<BTreeSet<_>>().len() != ids.len() {
            return Err(PipelineError::Config(format!("camera ids are not unique: {}", ids.join(", "))));
        }
        if !(0.0..=1.0).contains(&self.skeleton.conf_threshold) {
            return Err(PipelineError::Config("confidence threshold must be in [0, 1]".into()));
        }
        if !(self.bbox_aspect.is_finite() && self.bbox_aspect > 0.0) {
            return Err(PipelineError::Config("bbox aspect must be positive".into()));
        }
        self.skeleton
            .proportions
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.jobs == 0 {
            return Err(PipelineError::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// `camera_id` from each scene, or `camN` by position.
    pub fn camera_ids(&self) -> Vec<String> {
        camera_ids(&self.scenes)
    }
}

pub fn camera_ids(scenes: &[SceneConfig]) -> Vec<String> {
    scenes
        .iter()
        .enumerate()
        .map(|(i, s)| s.camera_id_or(&format!("cam{}", i + 1)))
        .collect()
}

/// Method tag of a track row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TrackMethod {
    Feet(FeetMethod),
    /// Combined from more than one camera.
    Fused,
}

impl TrackMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrackMethod::Feet(m) => m.as_str(),
            TrackMethod::Fused => "fused",
        }
    }
}

impl FromStr for TrackMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fused" => Ok(TrackMethod::Fused),
            other => other.parse().map(TrackMethod::Feet),
        }
    }
}

impl fmt::Display for TrackMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackRow {
    pub frame_id: u64,
    pub position: Option<FloorPoint>,
    /// Set exactly when `position` is.
    pub method: Option<TrackMethod>,
    pub cameras: Vec<String>,
    /// Why the frame has no position. Not serialized.
    pub reason: Option<String>,
}

impl TrackRow {
    pub fn found(frame_id: u64, position: FloorPoint, method: TrackMethod, cameras: Vec<String>) -> Self {
        Self {
            frame_id,
            position: Some(position),
            method: Some(method),
            cameras,
            reason: None,
        }
    }

    pub fn absent(frame_id: u64, reason: impl Into<String>) -> Self {
        Self {
            frame_id,
            position: None,
            method: None,
            cameras: Vec::new(),
            reason: Some(reason.into()),
        }
    }
}

/// Per-frame positions with strictly increasing frame ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PositionTrack {
    rows: Vec<TrackRow>,
}

impl PositionTrack {
    pub fn new(rows: Vec<TrackRow>) -> Result<Self, PipelineError> {
        if let Some(w) = rows.windows(2).find(|w| w[0].frame_id >= w[1].frame_id) {
            return Err(PipelineError::Config(format!(
                "track frames must increase strictly ({} then {})",
                w[0].frame_id, w[1].frame_id
            )));
        }
        if rows.iter().any(|r| r.position.is_some() != r.method.is_some()) {
            return Err(PipelineError::Config("a row has a position without a method or vice versa".into()));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[TrackRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, frame_id: u64) -> Option<&TrackRow> {
        self.rows
            .binary_search_by_key(&frame_id, |r| r.frame_id)
            .ok()
            .map(|i| &self.rows[i])
    }

    pub fn predictions(&self) -> Predictions {
        self.rows.iter().map(|r| (r.frame_id, r.position)).collect()
    }

    pub fn method_counts(&self) -> BTreeMap<TrackMethod, usize> {
        let mut counts = BTreeMap::new();
        for m in self.rows.iter().filter_map(|r| r.method) {
            *counts.entry(m).or_insert(0) += 1;
        }
        counts
    }

    /// `frame_id,X,Y,method,cameras` with a header; absent frames are
    /// `frame_id,,,missing,`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(POSITIONS_HEADER);
        out.push('\n');
        for r in &self.rows {
            match (r.position, r.method) {
                (Some(p), Some(m)) => {
                    out.push_str(&format!("{},{},{},{},{}\n", r.frame_id, p.x, p.y, m, r.cameras.join(";")))
                }
                _ => out.push_str(&format!("{},,,missing,\n", r.frame_id)),
            }
        }
        out
    }
}

pub const POSITIONS_HEADER: &str = "frame_id,X,Y,method,cameras";

pub fn parse_positions(text: &str) -> Result<PositionTrack, DatasetError> {
    use crate::dataset::DatasetError as E;
    let parse_err = |line, message: String| E::Parse {
        source_name: None,
        line,
        message,
    };
    let mut rows: BTreeMap<u64, TrackRow> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') || content == POSITIONS_HEADER {
            continue;
        }
        let f: Vec<&str> = content.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(parse_err(line, format!("expected 5 fields, got {}", f.len())));
        }
        let frame_id: u64 = f[0]
            .parse()
            .map_err(|_| parse_err(line, format!("frame id `{}` is not a non-negative integer", f[0])))?;
        let row = if f[3] == "missing" {
            if !(f[1].is_empty() && f[2].is_empty() && f[4].is_empty()) {
                return Err(parse_err(line, "missing row carries values".into()));
            }
            TrackRow::absent(frame_id, "missing in input")
        } else {
            let num = |s: &str, what: &str| -> Result<f64, DatasetError> {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(line, format!("{what}: `{s}` is not a finite number")))
            };
            let method: TrackMethod = f[3].parse().map_err(|e| parse_err(line, e))?;
            let cameras: Vec<String> = f[4].split(';').filter(|c| !c.is_empty()).map(String::from).collect();
            if cameras.is_empty() {
                return Err(parse_err(line, "no contributing camera".into()));
            }
            TrackRow::found(frame_id, FloorPoint::new(num(f[1], "X")?, num(f[2], "Y")?), method, cameras)
        };
        if rows.insert(frame_id, row).is_some() {
            return Err(E::DuplicateFrame {
                source_name: None,
                frame: frame_id,
                line,
            });
        }
    }
    Ok(PositionTrack {
        rows: rows.into_values().collect(),
    })
}

pub fn load_positions(path: &Path) -> Result<PositionTrack, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_positions(&text).map_err(|e| e.in_file(path))
}

/// Outcome for one detection.
#[derive(Debug, Clone, PartialEq)]
pub enum Localized {
    Found { position: FloorPoint, method: FeetMethod },
    Absent { reason: String },
}

impl Localized {
    pub fn position(&self) -> Option<FloorPoint> {
        match self {
            Localized::Found { position, .. } => Some(*position),
            Localized::Absent { .. } => None,
        }
    }
}

pub fn localize_frame(det: &DetectionRecord, h: &Homography, cfg: &RunConfig) -> Localized {
    let estimate = match (cfg.method, &det.payload) {
        (Method::Pose, Detection::Skeleton(s)) => feet_from_skeleton_with(s, &cfg.skeleton),
        (Method::Bbox, Detection::Bbox(b)) => feet_from_bbox(b),
        (Method::BboxExtended, Detection::Bbox(b)) => match feet_from_bbox(&extend_bbox(b, cfg.bbox_aspect)) {
            FeetEstimate::Found { point, .. } => FeetEstimate::Found {
                point,
                method: FeetMethod::BboxExtended,
            },
            skipped => skipped,
        },
        (m, d) => FeetEstimate::Skipped {
            reason: format!("method {m} cannot use a {} detection", d.kind()),
        },
    };
    match estimate {
        FeetEstimate::Found { point, method } => match h.project(point) {
            Ok(position) => Localized::Found { position, method },
            Err(e) => Localized::Absent { reason: e.to_string() },
        },
        FeetEstimate::Skipped { reason } => Localized::Absent { reason },
    }
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| PipelineError::Config(format!("cannot start {jobs} workers: {e}")))
}

/// Per-camera tracks over `frames` (detection frames are added).
pub fn localize_cameras(
    detections: &[Vec<DetectionRecord>],
    extra_frames: &BTreeSet<u64>,
    cfg: &RunConfig,
) -> Result<Vec<PositionTrack>, PipelineError> {
    cfg.validate()?;
    if detections.len() != cfg.scenes.len() {
        return Err(PipelineError::Config(format!(
            "{} scene(s) but {} detection set(s)",
            cfg.scenes.len(),
            detections.len()
        )));
    }
    let ids = cfg.camera_ids();
    let homographies = cfg
        .scenes
        .iter()
        .zip(&ids)
        .map(|(s, id)| {
            s.homography().map_err(|source| PipelineError::Geometry {
                camera: id.clone(),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let by_frame: Vec<BTreeMap<u64, &DetectionRecord>> = detections
        .iter()
        .map(|d| d.iter().map(|r| (r.frame_id, r)).collect())
        .collect();
    let mut frames = extra_frames.clone();
    for m in &by_frame {
        frames.extend(m.keys());
    }
    let frames: Vec<u64> = frames.into_iter().collect();

    let pool = thread_pool(cfg.jobs)?;
    let tracks = pool.install(|| {
        by_frame
            .iter()
            .zip(&homographies)
            .zip(&ids)
            .map(|((dets, h), id)| {
                let rows: Vec<TrackRow> = frames
                    .par_iter()
                    .map(|&frame| match dets.get(&frame) {
                        None => TrackRow::absent(frame, "no detection"),
                        Some(det) => match localize_frame(det, h, cfg) {
                            Localized::Found { position, method } => {
                                TrackRow::found(frame, position, TrackMethod::Feet(method), vec![id.clone()])
                            }
                            Localized::Absent { reason } => TrackRow::absent(frame, reason),
                        },
                    })
                    .collect();
                PositionTrack { rows }
            })
            .collect()
    });
    Ok(tracks)
}

/// Frame-by-frame inverse-distance fusion of per-camera tracks.
pub fn fuse_tracks(
    tracks: &[PositionTrack],
    cameras: &[(String, CameraConfig)],
    distance: FusionDistance,
) -> Result<PositionTrack, PipelineError> {
    if tracks.is_empty() || tracks.len() != cameras.len() {
        return Err(PipelineError::Config(format!(
            "{} track(s) for {} camera(s)",
            tracks.len(),
            cameras.len()
        )));
    }
    let frames: BTreeSet<u64> = tracks.iter().flat_map(|t| t.rows.iter().map(|r| r.frame_id)).collect();
    let mut rows = Vec::with_capacity(frames.len());
    for frame in frames {
        let mut single_method = None;
        let estimates: Vec<CameraEstimate> = tracks
            .iter()
            .zip(cameras)
            .map(|(t, (id, cam))| {
                let row = t.get(frame).filter(|r| r.position.is_some());
                match row {
                    Some(r) => {
                        let p = r.position.expect("filtered");
                        single_method = r.method;
                        CameraEstimate::present(id.clone(), p, distance.measure(cam, p))
                            .unwrap_or_else(|_| CameraEstimate::missing(id.clone()))
                    }
                    None => CameraEstimate::missing(id.clone()),
                }
            })
            .collect();
        let fused = fuse_many(&estimates).map_err(|e| PipelineError::Config(e.to_string()))?;
        rows.push(match fused.position {
            None => TrackRow::absent(frame, "no camera has a position"),
            Some(p) => {
                let method = if fused.contributors.len() > 1 {
                    TrackMethod::Fused
                } else {
                    single_method.expect("one contributor")
                };
                TrackRow::found(frame, p, method, fused.contributors)
            }
        });
    }
    Ok(PositionTrack { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub camera_tracks: Vec<PositionTrack>,
    pub fused: Option<PositionTrack>,
    /// Report for the fused track when fusion ran, else for the first camera.
    pub report: EvalReport,
    pub camera_reports: Vec<EvalReport>,
}

impl RunOutput {
    pub fn track(&self) -> &PositionTrack {
        self.fused.as_ref().unwrap_or(&self.camera_tracks[0])
    }
}

pub fn run(
    detections: &[Vec<DetectionRecord>],
    ground_truth: &[AnnotationRecord],
    cfg: &RunConfig,
) -> Result<RunOutput, PipelineError> {
    let gt_frames: BTreeSet<u64> = ground_truth.iter().map(|r| r.frame_id).collect();
    let camera_tracks = localize_cameras(detections, &gt_frames, cfg)?;
    let fused = if cfg.fuse {
        let cams: Vec<(String, CameraConfig)> = cfg
            .camera_ids()
            .into_iter()
            .zip(cfg.scenes.iter().map(SceneConfig::camera_config))
            .collect();
        Some(fuse_tracks(&camera_tracks, &cams, cfg.fusion_distance)?)
    } else {
        None
    };
    let camera_reports = camera_tracks
        .iter()
        .map(|t| evaluate_run(&t.predictions(), ground_truth))
        .collect::<Result<Vec<_>, _>>()?;
    let report = match &fused {
        Some(t) => evaluate_run(&t.predictions(), ground_truth)?,
        None => camera_reports[0].clone(),
    };
    Ok(RunOutput {
        camera_tracks,
        fused,
        report,
        camera_reports,
    })
}

/// Merges any number of annotation sets pairwise, in order.
pub fn merge_all(sets: &[Vec<AnnotationRecord>]) -> Vec<AnnotationRecord> {
    let mut iter = sets.iter();
    let Some(first) = iter.next() else {
        return Vec::new();
    };
    iter.fold(first.clone(), |acc, next| merge_ground_truth(&acc, next))
}

/// Loads everything from disk, then [`run`].
pub fn run_files(
    scene_paths: &[&Path],
    detection_paths: &[&Path],
    annotation_paths: &[&Path],
    mut cfg: RunConfig,
) -> Result<RunOutput, PipelineError> {
    cfg.scenes = scene_paths
        .iter()
        .map(|p| load_scene_config(p))
        .collect::<Result<_, _>>()?;
    let detections = detection_paths
        .iter()
        .map(|p| load_detections(p))
        .collect::<Result<Vec<_>, _>>()?;
    let annotations = annotation_paths
        .iter()
        .map(|p| load_annotations(p))
        .collect::<Result<Vec<_>, _>>()?;
    run(&detections, &merge_all(&annotations), &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::LengthUnit;
    use crate::feet::{BoundingBox, JointName, Skeleton};
    use crate::geometry::ImagePoint;

    fn unit_square_scene() -> SceneConfig {
        SceneConfig {
            camera_id: None,
            image_width: 100,
            image_height: 100,
            units: LengthUnit::Cm,
            camera_height: 100.0,
            camera_x: 0.0,
            camera_y: 0.0,
            grid_width: 1.0,
            grid_height: 1.0,
            homography_points: [
                ImagePoint::new(0.0, 0.0),
                ImagePoint::new(1.0, 0.0),
                ImagePoint::new(1.0, 1.0),
                ImagePoint::new(0.0, 1.0),
            ],
        }
    }

    fn bbox_record(frame_id: u64, b: BoundingBox) -> DetectionRecord {
        DetectionRecord {
            frame_id,
            payload: Detection::Bbox(b),
            detector_id: None,
        }
    }

    #[test]
    fn identity_bbox() {
        let mut cfg = RunConfig::new(vec![unit_square_scene()]);
        cfg.method = Method::Bbox;
        let det = bbox_record(0, BoundingBox::new(10.0, 10.0, 20.0, 40.0, 0.9).unwrap());
        let out = localize_frame(&det, &Homography::IDENTITY, &cfg);
        assert_eq!(
            out,
            Localized::Found {
                position: FloorPoint::new(15.0, 40.0),
                method: FeetMethod::Bbox
            }
        );
    }

    #[test]
    fn nose_only_is_absent() {
        let cfg = RunConfig::new(vec![unit_square_scene()]);
        let s = Skeleton::new().with(JointName::Nose, ImagePoint::new(5.0, 5.0), 0.9).unwrap();
        let det = DetectionRecord {
            frame_id: 0,
            payload: Detection::Skeleton(s),
            detector_id: None,
        };
        assert!(matches!(localize_frame(&det, &Homography::IDENTITY, &cfg), Localized::Absent { .. }));
    }

    #[test]
    fn method_payload_mismatch_is_absent() {
        let cfg = RunConfig::new(vec![unit_square_scene()]);
        let det = bbox_record(0, BoundingBox::new(0.0, 0.0, 1.0, 1.0, 0.9).unwrap());
        match localize_frame(&det, &Homography::IDENTITY, &cfg) {
            Localized::Absent { reason } => assert!(reason.contains("bbox")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_detections_all_missing() {
        let cfg = RunConfig::new(vec![unit_square_scene()]);
        let gt: Vec<_> = (0..5).map(|i| AnnotationRecord::visible(i, 0.0, 0.0)).collect();
        let out = run(&[Vec::new()], &gt, &cfg).unwrap();
        assert_eq!(out.report.missing_fraction, 1.0);
        assert_eq!(out.track().len(), 5);
    }

    #[test]
    fn positions_csv_round_trip() {
        let track = PositionTrack::new(vec![
            TrackRow::found(0, FloorPoint::new(1.5, -2.25), TrackMethod::Fused, vec!["a".into(), "b".into()]),
            TrackRow::absent(1, "x"),
            TrackRow::found(3, FloorPoint::new(0.1, 0.2), TrackMethod::Feet(FeetMethod::Extended), vec!["a".into()]),
        ])
        .unwrap();
        let csv = track.to_csv();
        assert!(csv.contains("\n1,,,missing,\n"));
        let back = parse_positions(&csv).unwrap();
        assert_eq!(back.to_csv(), csv);
        assert_eq!(back.predictions(), track.predictions());
    }

    #[test]
    fn track_requires_increasing_frames() {
        let rows = vec![TrackRow::absent(2, ""), TrackRow::absent(2, "")];
        assert!(PositionTrack::new(rows).is_err());
    }

    #[test]
    fn fusion_falls_back_to_single_camera() {
        let cams = vec![
            ("a".to_string(), unit_square_scene().camera_config()),
            ("b".to_string(), unit_square_scene().camera_config()),
        ];
        let t1 = PositionTrack::new(vec![TrackRow::found(
            0,
            FloorPoint::new(3.0, 4.0),
            TrackMethod::Feet(FeetMethod::Bbox),
            vec!["a".into()],
        )])
        .unwrap();
        let t2 = PositionTrack::new(vec![TrackRow::absent(0, "")]).unwrap();
        let fused = fuse_tracks(&[t1, t2], &cams, FusionDistance::Floor).unwrap();
        let row = &fused.rows()[0];
        assert_eq!(row.position, Some(FloorPoint::new(3.0, 4.0)));
        assert_eq!(row.method, Some(TrackMethod::Feet(FeetMethod::Bbox)));
        assert_eq!(row.cameras, vec!["a".to_string()]);
    }
}
