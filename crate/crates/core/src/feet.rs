//! Image-space feet estimation from bounding boxes and pose skeletons.
//!
//! With a skeleton the feet are the midpoint of the ankles when both are
//! confidently detected. Otherwise the body midline is regressed through the
//! midpoints of left/right joint pairs and extended downward by the body
//! proportion remaining below the lowest detected level.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::ImagePoint;

pub const DEFAULT_CONF_THRESHOLD: f64 = 0.3;
pub const DEFAULT_BBOX_ASPECT: f64 = 2.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeetError {
    #[error("invalid bounding box: {0}")]
    InvalidBox(String),
    #[error("invalid body proportions: {0}")]
    InvalidProportions(String),
    #[error("invalid joint {joint}: {reason}")]
    InvalidJoint { joint: JointName, reason: String },
    #[error("unknown joint name `{0}`")]
    UnknownJoint(String),
    #[error("unknown body level `{0}`")]
    UnknownLevel(String),
}

/// An axis-aligned detection box in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    pub confidence: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64, confidence: f64) -> Result<Self, FeetError> {
        let b = Self {
            x_min,
            y_min,
            x_max,
            y_max,
            confidence,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), FeetError> {
        let coords = [self.x_min, self.y_min, self.x_max, self.y_max];
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(FeetError::InvalidBox("non-finite coordinate".into()));
        }
        if !(self.x_min < self.x_max && self.y_min < self.y_max) {
            return Err(FeetError::InvalidBox(format!(
                "expected min < max, got ({}, {}, {}, {})",
                self.x_min, self.y_min, self.x_max, self.y_max
            )));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(FeetError::InvalidBox(format!(
                "confidence {} outside [0, 1]",
                self.confidence
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

macro_rules! joints {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// The 18 keypoints of the pose skeleton.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum JointName {
            $($variant),*
        }

        impl JointName {
            pub const ALL: [JointName; 18] = [$(JointName::$variant),*];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $(JointName::$variant => $name),*
                }
            }
        }

        impl FromStr for JointName {
            type Err = FeetError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok(JointName::$variant),)*
                    other => Err(FeetError::UnknownJoint(other.to_string())),
                }
            }
        }
    };
}

joints! {
    Nose => "nose",
    Neck => "neck",
    LeftEye => "left_eye",
    RightEye => "right_eye",
    LeftEar => "left_ear",
    RightEar => "right_ear",
    LeftShoulder => "left_shoulder",
    RightShoulder => "right_shoulder",
    LeftElbow => "left_elbow",
    RightElbow => "right_elbow",
    LeftWrist => "left_wrist",
    RightWrist => "right_wrist",
    LeftHip => "left_hip",
    RightHip => "right_hip",
    LeftKnee => "left_knee",
    RightKnee => "right_knee",
    LeftAnkle => "left_ankle",
    RightAnkle => "right_ankle",
}

impl fmt::Display for JointName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Horizontal body lines whose height above the ground is a fixed fraction
/// of standing height. Ordered from the top of the body down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyLevel {
    /// Eye and ear line.
    Head,
    Shoulder,
    Hip,
    Knee,
    Ankle,
}

impl BodyLevel {
    pub const ALL: [BodyLevel; 5] = [
        BodyLevel::Head,
        BodyLevel::Shoulder,
        BodyLevel::Hip,
        BodyLevel::Knee,
        BodyLevel::Ankle,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BodyLevel::Head => "head",
            BodyLevel::Shoulder => "shoulder",
            BodyLevel::Hip => "hip",
            BodyLevel::Knee => "knee",
            BodyLevel::Ankle => "ankle",
        }
    }
}

impl FromStr for BodyLevel {
    type Err = FeetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BodyLevel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| FeetError::UnknownLevel(s.to_string()))
    }
}

impl fmt::Display for BodyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A left/right joint pair whose midpoint lies on the body midline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementaryPair {
    pub left: JointName,
    pub right: JointName,
    pub level: BodyLevel,
}

/// Default pairs: eyes, ears, shoulders, hips, knees, ankles.
pub const DEFAULT_PAIRS: [ComplementaryPair; 6] = [
    ComplementaryPair {
        left: JointName::LeftEye,
        right: JointName::RightEye,
        level: BodyLevel::Head,
    },
    ComplementaryPair {
        left: JointName::LeftEar,
        right: JointName::RightEar,
        level: BodyLevel::Head,
    },
    ComplementaryPair {
        left: JointName::LeftShoulder,
        right: JointName::RightShoulder,
        level: BodyLevel::Shoulder,
    },
    ComplementaryPair {
        left: JointName::LeftHip,
        right: JointName::RightHip,
        level: BodyLevel::Hip,
    },
    ComplementaryPair {
        left: JointName::LeftKnee,
        right: JointName::RightKnee,
        level: BodyLevel::Knee,
    },
    ComplementaryPair {
        left: JointName::LeftAnkle,
        right: JointName::RightAnkle,
        level: BodyLevel::Ankle,
    },
];

/// A detected keypoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    pub point: ImagePoint,
    pub confidence: f64,
}

/// Keypoints of one person in one frame. At most one entry per joint.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    joints: BTreeMap<JointName, Keypoint>,
}

impl Skeleton {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces a joint.
    pub fn insert(&mut self, joint: JointName, point: ImagePoint, confidence: f64) -> Result<(), FeetError> {
        if !point.is_finite() {
            return Err(FeetError::InvalidJoint {
                joint,
                reason: "non-finite coordinate".into(),
            });
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(FeetError::InvalidJoint {
                joint,
                reason: format!("confidence {confidence} outside [0, 1]"),
            });
        }
        self.joints.insert(joint, Keypoint { point, confidence });
        Ok(())
    }

    pub fn with(mut self, joint: JointName, point: ImagePoint, confidence: f64) -> Result<Self, FeetError> {
        self.insert(joint, point, confidence)?;
        Ok(self)
    }

    pub fn get(&self, joint: JointName) -> Option<&Keypoint> {
        self.joints.get(&joint)
    }

    pub fn remove(&mut self, joint: JointName) -> Option<Keypoint> {
        self.joints.remove(&joint)
    }

    pub fn len(&self) -> usize {
        self.joints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joints.is_empty()
    }

    /// Joints in `JointName` order.
    pub fn iter(&self) -> impl Iterator<Item = (JointName, &Keypoint)> {
        self.joints.iter().map(|(k, v)| (*k, v))
    }

    fn confident(&self, joint: JointName, threshold: f64) -> Option<ImagePoint> {
        self.joints
            .get(&joint)
            .filter(|k| k.confidence >= threshold)
            .map(|k| k.point)
    }
}

/// Heights of the body levels as fractions of standing height, measured from
/// the ground.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyProportions {
    level_fraction: BTreeMap<BodyLevel, f64>,
    /// Height of the ankle keypoint above the sole, as a fraction of
    /// standing height.
    pub ankle_ground_fraction: f64,
}

impl Default for BodyProportions {
    fn default() -> Self {
        Self::new(
            [
                (BodyLevel::Head, 0.94),
                (BodyLevel::Shoulder, 0.82),
                (BodyLevel::Hip, 0.52),
                (BodyLevel::Knee, 0.28),
                (BodyLevel::Ankle, 0.04),
            ],
            0.04,
        )
        .expect("default proportions are valid")
    }
}

impl BodyProportions {
    pub fn new(levels: [(BodyLevel, f64); 5], ankle_ground_fraction: f64) -> Result<Self, FeetError> {
        let level_fraction: BTreeMap<_, _> = levels.into_iter().collect();
        let p = Self {
            level_fraction,
            ankle_ground_fraction,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), FeetError> {
        let mut previous = f64::INFINITY;
        for level in BodyLevel::ALL {
            let f = *self
                .level_fraction
                .get(&level)
                .ok_or_else(|| FeetError::InvalidProportions(format!("missing level {level}")))?;
            if !(f > 0.0 && f <= 1.0) {
                return Err(FeetError::InvalidProportions(format!(
                    "{level} fraction {f} outside (0, 1]"
                )));
            }
            if !(f < previous) {
                return Err(FeetError::InvalidProportions(format!(
                    "{level} fraction {f} is not below the level above it"
                )));
            }
            previous = f;
        }
        if !(self.ankle_ground_fraction >= 0.0 && self.ankle_ground_fraction < 1.0) {
            return Err(FeetError::InvalidProportions(format!(
                "ankle_ground_fraction {} outside [0, 1)",
                self.ankle_ground_fraction
            )));
        }
        Ok(())
    }

    pub fn fraction(&self, level: BodyLevel) -> f64 {
        self.level_fraction[&level]
    }

    pub fn set_fraction(&mut self, level: BodyLevel, fraction: f64) -> Result<(), FeetError> {
        let old = self.level_fraction.insert(level, fraction);
        if let Err(e) = self.validate() {
            if let Some(old) = old {
                self.level_fraction.insert(level, old);
            }
            return Err(e);
        }
        Ok(())
    }
}

/// How a feet point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeetMethod {
    Ankles,
    Extended,
    Bbox,
    BboxExtended,
}

impl FeetMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeetMethod::Ankles => "ankles",
            FeetMethod::Extended => "extended",
            FeetMethod::Bbox => "bbox",
            FeetMethod::BboxExtended => "bbox_extended",
        }
    }
}

impl FromStr for FeetMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ankles" => Ok(FeetMethod::Ankles),
            "extended" => Ok(FeetMethod::Extended),
            "bbox" => Ok(FeetMethod::Bbox),
            "bbox_extended" => Ok(FeetMethod::BboxExtended),
            other => Err(format!("unknown feet method `{other}`")),
        }
    }
}

impl fmt::Display for FeetMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeetEstimate {
    Found { point: ImagePoint, method: FeetMethod },
    Skipped { reason: String },
}

impl FeetEstimate {
    pub fn point(&self) -> Option<ImagePoint> {
        match self {
            FeetEstimate::Found { point, .. } => Some(*point),
            FeetEstimate::Skipped { .. } => None,
        }
    }
}

/// Bottom-centre of the box.
pub fn feet_from_bbox(b: &BoundingBox) -> FeetEstimate {
    FeetEstimate::Found {
        point: ImagePoint::new((b.x_min + b.x_max) / 2.0, b.y_max),
        method: FeetMethod::Bbox,
    }
}

/// Grows the box downward until height/width reaches `target_height_over_width`.
/// Boxes already at or above the target are returned unchanged.
pub fn extend_bbox(b: &BoundingBox, target_height_over_width: f64) -> BoundingBox {
    let width = b.width();
    if b.height() / width < target_height_over_width {
        BoundingBox {
            y_max: b.y_min + target_height_over_width * width,
            ..*b
        }
    } else {
        *b
    }
}

/// The regressed body midline `x = slope·y + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Midline {
    pub slope: f64,
    pub intercept: f64,
}

impl Midline {
    pub fn x_at(&self, y: f64) -> f64 {
        self.slope * y + self.intercept
    }

    /// Unit direction along the line with increasing `y`.
    pub fn downward(&self) -> (f64, f64) {
        let norm = self.slope.hypot(1.0);
        (self.slope / norm, 1.0 / norm)
    }
}

/// A left/right midpoint that passed the confidence threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelMidpoint {
    pub level: BodyLevel,
    pub point: ImagePoint,
}

/// Midpoints of every pair in `pairs` whose joints both reach `conf_threshold`.
pub fn level_midpoints(s: &Skeleton, pairs: &[ComplementaryPair], conf_threshold: f64) -> Vec<LevelMidpoint> {
    pairs
        .iter()
        .filter_map(|pair| {
            let l = s.confident(pair.left, conf_threshold)?;
            let r = s.confident(pair.right, conf_threshold)?;
            Some(LevelMidpoint {
                level: pair.level,
                point: l.midpoint(&r),
            })
        })
        .collect()
}

/// Least-squares fit of `x = m·y + k` through the given points. `None` with
/// fewer than two points or when every point has the same `y`.
pub fn fit_midline(points: &[ImagePoint]) -> Option<Midline> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_y = points.iter().map(|p| p.y).sum::<f64>() / n;
    let mean_x = points.iter().map(|p| p.x).sum::<f64>() / n;
    let syy: f64 = points.iter().map(|p| (p.y - mean_y).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.y - mean_y) * (p.x - mean_x)).sum();
    let spread = points
        .iter()
        .map(|p| (p.y - mean_y).abs())
        .fold(0.0_f64, f64::max);
    if spread <= 1e-12 * (1.0 + mean_y.abs()) {
        return None;
    }
    let slope = sxy / syy;
    Some(Midline {
        slope,
        intercept: mean_x - slope * mean_y,
    })
}

/// Body midline through the complementary-pair midpoints of `s` using the
/// default pairs. `None` when fewer than two qualifying midpoints exist.
pub fn body_midline(s: &Skeleton, conf_threshold: f64) -> Option<Midline> {
    let mids: Vec<ImagePoint> = level_midpoints(s, &DEFAULT_PAIRS, conf_threshold)
        .into_iter()
        .map(|m| m.point)
        .collect();
    fit_midline(&mids)
}

/// How far to extend below the lowest detected level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionMode {
    /// Arc length along the regressed midline.
    #[default]
    ArcLength,
    /// Vertical pixel drop; the point stays on the midline.
    VerticalDrop,
}

impl FromStr for ExtensionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arc_length" | "arc-length" => Ok(ExtensionMode::ArcLength),
            "vertical_drop" | "vertical-drop" => Ok(ExtensionMode::VerticalDrop),
            other => Err(format!("unknown extension mode `{other}`")),
        }
    }
}

/// Settings for skeleton-based feet estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonOptions {
    pub proportions: BodyProportions,
    pub conf_threshold: f64,
    pub pairs: Vec<ComplementaryPair>,
    pub extension: ExtensionMode,
}

impl Default for SkeletonOptions {
    fn default() -> Self {
        Self {
            proportions: BodyProportions::default(),
            conf_threshold: DEFAULT_CONF_THRESHOLD,
            pairs: DEFAULT_PAIRS.to_vec(),
            extension: ExtensionMode::ArcLength,
        }
    }
}

/// Feet estimate with the default pair list and arc-length extension.
pub fn feet_from_skeleton(s: &Skeleton, props: &BodyProportions, conf_threshold: f64) -> FeetEstimate {
    let opts = SkeletonOptions {
        proportions: props.clone(),
        conf_threshold,
        ..SkeletonOptions::default()
    };
    feet_from_skeleton_with(s, &opts)
}

pub fn feet_from_skeleton_with(s: &Skeleton, opts: &SkeletonOptions) -> FeetEstimate {
    let threshold = opts.conf_threshold;
    if let (Some(l), Some(r)) = (
        s.confident(JointName::LeftAnkle, threshold),
        s.confident(JointName::RightAnkle, threshold),
    ) {
        return FeetEstimate::Found {
            point: l.midpoint(&r),
            method: FeetMethod::Ankles,
        };
    }

    let mids = level_midpoints(s, &opts.pairs, threshold);
    let points: Vec<ImagePoint> = mids.iter().map(|m| m.point).collect();
    let Some(line) = fit_midline(&points) else {
        return skipped("insufficient joints");
    };

    let props = &opts.proportions;
    // Pixel body height from the two midpoints farthest apart in proportion.
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..mids.len() {
        for j in i + 1..mids.len() {
            let df = (props.fraction(mids[i].level) - props.fraction(mids[j].level)).abs();
            if df > 0.0 && best.is_none_or(|(b, _, _)| df > b) {
                best = Some((df, i, j));
            }
        }
    }
    let Some((df, i, j)) = best else {
        return skipped("insufficient joints");
    };
    let body_height_px = mids[i].point.distance(&mids[j].point) / df;

    // Extension starts at the lowest detected level.
    let lowest = mids
        .iter()
        .min_by(|a, b| props.fraction(a.level).total_cmp(&props.fraction(b.level)))
        .expect("at least two midpoints");
    let remaining = props.fraction(lowest.level) * body_height_px;
    let start_y = lowest.point.y;
    let start = ImagePoint::new(line.x_at(start_y), start_y);

    let point = match opts.extension {
        ExtensionMode::ArcLength => {
            let (dx, dy) = line.downward();
            ImagePoint::new(start.x + remaining * dx, start.y + remaining * dy)
        }
        ExtensionMode::VerticalDrop => {
            let y = start.y + remaining;
            ImagePoint::new(line.x_at(y), y)
        }
    };
    if !point.is_finite() {
        return skipped("non-finite extension");
    }
    FeetEstimate::Found {
        point,
        method: FeetMethod::Extended,
    }
}

fn skipped(reason: &str) -> FeetEstimate {
    FeetEstimate::Skipped {
        reason: reason.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bbox(x0: f64, y0: f64, x1: f64, y1: f64) -> BoundingBox {
        BoundingBox::new(x0, y0, x1, y1, 0.9).unwrap()
    }

    fn found(e: &FeetEstimate) -> (ImagePoint, FeetMethod) {
        match e {
            FeetEstimate::Found { point, method } => (*point, *method),
            other => panic!("expected a feet point, got {other:?}"),
        }
    }

    fn pair_skeleton(level_points: &[(BodyLevel, (f64, f64))]) -> Skeleton {
        let mut s = Skeleton::new();
        for (level, (x, y)) in level_points {
            let pair = DEFAULT_PAIRS.iter().find(|p| p.level == *level).unwrap();
            s.insert(pair.left, ImagePoint::new(x - 10.0, *y), 0.9).unwrap();
            s.insert(pair.right, ImagePoint::new(x + 10.0, *y), 0.9).unwrap();
        }
        s
    }

    #[test]
    fn bbox_feet_examples() {
        assert_eq!(found(&feet_from_bbox(&bbox(10.0, 10.0, 20.0, 40.0))).0, ImagePoint::new(15.0, 40.0));
        assert_eq!(found(&feet_from_bbox(&bbox(0.0, 0.0, 100.0, 200.0))).0, ImagePoint::new(50.0, 200.0));
        let (p, m) = found(&feet_from_bbox(&bbox(37.5, 12.0, 81.5, 190.25)));
        assert_eq!(p, ImagePoint::new(59.5, 190.25));
        assert_eq!(m, FeetMethod::Bbox);
    }

    #[test]
    fn invalid_boxes_rejected() {
        assert!(BoundingBox::new(10.0, 0.0, 10.0, 5.0, 0.5).is_err());
        assert!(BoundingBox::new(0.0, 5.0, 10.0, 1.0, 0.5).is_err());
        assert!(BoundingBox::new(0.0, 0.0, 10.0, 10.0, 1.5).is_err());
        assert!(BoundingBox::new(0.0, 0.0, f64::NAN, 10.0, 0.5).is_err());
    }

    #[test]
    fn extend_bbox_examples() {
        let b = bbox(0.0, 0.0, 20.0, 40.0);
        let e = extend_bbox(&b, 3.0);
        assert_eq!((e.width(), e.height()), (20.0, 60.0));
        assert_eq!(e.y_max - b.y_max, 20.0);

        let tall = bbox(0.0, 0.0, 20.0, 80.0);
        assert_eq!(extend_bbox(&tall, 3.0), tall);

        let square = bbox(0.0, 0.0, 50.0, 50.0);
        let e = extend_bbox(&square, 2.2);
        assert_eq!(e.width(), 50.0);
        assert!((e.height() - 110.0).abs() < 1e-12);
    }

    #[test]
    fn vertical_midline_through_two_points() {
        let s = pair_skeleton(&[(BodyLevel::Shoulder, (100.0, 100.0)), (BodyLevel::Hip, (100.0, 160.0))]);
        let line = body_midline(&s, 0.3).unwrap();
        assert_eq!(line.slope, 0.0);
        assert_eq!(line.intercept, 100.0);
    }

    #[test]
    fn leaning_midline_through_two_points() {
        let s = pair_skeleton(&[(BodyLevel::Shoulder, (100.0, 100.0)), (BodyLevel::Hip, (110.0, 160.0))]);
        let line = body_midline(&s, 0.3).unwrap();
        assert!((line.slope - 1.0 / 6.0).abs() < 1e-12);
        assert!((line.intercept - (100.0 - 100.0 / 6.0)).abs() < 1e-12);
        assert!((line.x_at(100.0) - 100.0).abs() < 1e-12);
        assert!((line.x_at(160.0) - 110.0).abs() < 1e-12);
    }

    #[test]
    fn nose_and_one_shoulder_is_insufficient() {
        let s = Skeleton::new()
            .with(JointName::Nose, ImagePoint::new(100.0, 50.0), 0.9)
            .unwrap()
            .with(JointName::LeftShoulder, ImagePoint::new(90.0, 100.0), 0.9)
            .unwrap();
        assert!(body_midline(&s, 0.3).is_none());
        assert!(matches!(
            feet_from_skeleton(&s, &BodyProportions::default(), 0.3),
            FeetEstimate::Skipped { .. }
        ));
    }

    #[test]
    fn ankles_rule() {
        let s = Skeleton::new()
            .with(JointName::LeftAnkle, ImagePoint::new(100.0, 380.0), 0.9)
            .unwrap()
            .with(JointName::RightAnkle, ImagePoint::new(120.0, 380.0), 0.9)
            .unwrap();
        let (p, m) = found(&feet_from_skeleton(&s, &BodyProportions::default(), 0.3));
        assert_eq!(p, ImagePoint::new(110.0, 380.0));
        assert_eq!(m, FeetMethod::Ankles);
    }

    #[test]
    fn single_ankle_falls_through_to_regression() {
        let mut s = pair_skeleton(&[(BodyLevel::Shoulder, (100.0, 100.0)), (BodyLevel::Hip, (100.0, 160.0))]);
        s.insert(JointName::LeftAnkle, ImagePoint::new(90.0, 250.0), 0.9).unwrap();
        let (_, m) = found(&feet_from_skeleton(&s, &BodyProportions::default(), 0.3));
        assert_eq!(m, FeetMethod::Extended);

        // a low-confidence partner does not complete the pair either
        s.insert(JointName::RightAnkle, ImagePoint::new(110.0, 250.0), 0.1).unwrap();
        let (_, m) = found(&feet_from_skeleton(&s, &BodyProportions::default(), 0.3));
        assert_eq!(m, FeetMethod::Extended);
    }

    #[test]
    fn upright_extension_example() {
        // H_px = 60 / 0.30 = 200; feet = hip + 0.52 * 200
        let s = pair_skeleton(&[(BodyLevel::Shoulder, (100.0, 100.0)), (BodyLevel::Hip, (100.0, 160.0))]);
        let (p, m) = found(&feet_from_skeleton(&s, &BodyProportions::default(), 0.3));
        assert_eq!(m, FeetMethod::Extended);
        assert!((p.x - 100.0).abs() < 1e-9);
        assert!((p.y - 264.0).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn leaning_extension_example() {
        let s = pair_skeleton(&[(BodyLevel::Shoulder, (100.0, 100.0)), (BodyLevel::Hip, (112.0, 160.0))]);
        let (p, _) = found(&feet_from_skeleton(&s, &BodyProportions::default(), 0.3));
        // independent parametric check: the segment shoulder→hip has length
        // sqrt(12² + 60²) and spans 0.30 of the body, feet lie 0.52 further on
        let seg = (12.0f64 * 12.0 + 60.0 * 60.0).sqrt();
        let body = seg / 0.30;
        let arc = 0.52 * body;
        let t = arc / seg;
        let expected = ImagePoint::new(112.0 + 12.0 * t, 160.0 + 60.0 * t);
        assert!(p.distance(&expected) < 1e-9, "{p:?} vs {expected:?}");
        // on the line x = 0.2 y + 80, at the stated arc length from the hip
        assert!((p.x - (0.2 * p.y + 80.0)).abs() < 1e-9);
        assert!((p.distance(&ImagePoint::new(112.0, 160.0)) - arc).abs() < 1e-9);
    }

    #[test]
    fn vertical_drop_mode() {
        let s = pair_skeleton(&[(BodyLevel::Shoulder, (100.0, 100.0)), (BodyLevel::Hip, (112.0, 160.0))]);
        let opts = SkeletonOptions {
            extension: ExtensionMode::VerticalDrop,
            ..SkeletonOptions::default()
        };
        let (p, _) = found(&feet_from_skeleton_with(&s, &opts));
        let body = (12.0f64 * 12.0 + 60.0 * 60.0).sqrt() / 0.30;
        assert!((p.y - (160.0 + 0.52 * body)).abs() < 1e-9);
        assert!((p.x - (0.2 * p.y + 80.0)).abs() < 1e-9);
    }

    #[test]
    fn extension_starts_at_lowest_level() {
        // shoulder, hip and knee on a straight vertical body of 500 px
        // (feet at y = 600); regression from any two must land on the feet
        let props = BodyProportions::default();
        let feet_y = 600.0;
        let y_of = |l: BodyLevel| feet_y - props.fraction(l) * 500.0;
        let s = pair_skeleton(&[
            (BodyLevel::Shoulder, (300.0, y_of(BodyLevel::Shoulder))),
            (BodyLevel::Hip, (300.0, y_of(BodyLevel::Hip))),
            (BodyLevel::Knee, (300.0, y_of(BodyLevel::Knee))),
        ]);
        let (p, _) = found(&feet_from_skeleton(&s, &props, 0.3));
        assert!((p.y - feet_y).abs() < 1e-9);
    }

    #[test]
    fn same_level_midpoints_only_are_skipped() {
        let mut s = Skeleton::new();
        s.insert(JointName::LeftEye, ImagePoint::new(95.0, 50.0), 0.9).unwrap();
        s.insert(JointName::RightEye, ImagePoint::new(105.0, 50.0), 0.9).unwrap();
        s.insert(JointName::LeftEar, ImagePoint::new(90.0, 55.0), 0.9).unwrap();
        s.insert(JointName::RightEar, ImagePoint::new(110.0, 55.0), 0.9).unwrap();
        // two midpoints, but both at the head level: no scale available
        assert!(body_midline(&s, 0.3).is_some());
        assert!(matches!(
            feet_from_skeleton(&s, &BodyProportions::default(), 0.3),
            FeetEstimate::Skipped { .. }
        ));
    }

    #[test]
    fn proportions_validation() {
        let mut p = BodyProportions::default();
        assert!(p.set_fraction(BodyLevel::Hip, 0.9).is_err());
        assert_eq!(p.fraction(BodyLevel::Hip), 0.52);
        assert!(p.set_fraction(BodyLevel::Ankle, 0.0).is_err());
        assert!(p.set_fraction(BodyLevel::Knee, 0.3).is_ok());
        assert!(BodyProportions::new(
            [
                (BodyLevel::Head, 0.9),
                (BodyLevel::Shoulder, 0.9),
                (BodyLevel::Hip, 0.5),
                (BodyLevel::Knee, 0.3),
                (BodyLevel::Ankle, 0.1)
            ],
            0.0
        )
        .is_err());
    }

    #[test]
    fn joint_names_round_trip() {
        for j in JointName::ALL {
            assert_eq!(j.as_str().parse::<JointName>().unwrap(), j);
        }
        assert!("left_toe".parse::<JointName>().is_err());
    }
}
