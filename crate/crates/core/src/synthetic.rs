//! Pinhole-camera scene generator with exact ground truth.
//!
//! A person is a straight segment standing on the floor with left/right
//! joints placed symmetrically about it. The lateral axis is the camera's
//! horizontal right vector, so each joint pair sits at equal depth. With a
//! level camera (zero pitch) the whole body is parallel to the image plane
//! and level fractions survive projection unchanged.

use std::collections::BTreeSet;

use nalgebra::{Matrix3, Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::dataset::{AnnotationRecord, Detection, DetectionRecord, LengthUnit, SceneConfig};
use crate::evaluation::ScenarioType;
use crate::feet::{BodyLevel, BodyProportions, BoundingBox, JointName, Skeleton};
use crate::geometry::{CameraConfig, FloorPoint, ImagePoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("invalid person: {0}")]
    InvalidPerson(String),
    #[error("point lies behind the camera")]
    BehindCamera,
    #[error("grid corner {corner} projects outside the image")]
    CornerOutsideImage { corner: usize },
    #[error("every joint is occluded")]
    FullyOccluded,
    #[error("visible joints do not span a box")]
    DegenerateBox,
    #[error("invalid corpus settings: {0}")]
    InvalidCorpus(String),
}

/// Distortion-free pinhole camera in grid coordinates (cm).
#[derive(Debug, Clone, PartialEq)]
pub struct PinholeCamera {
    /// `x`, `y` on the floor grid and `z` height above it.
    pub position: Point3<f64>,
    /// Heading about the vertical axis; zero looks along `+Y`, `π/2` along `+X`.
    pub yaw: f64,
    /// Downward tilt of the optical axis.
    pub pitch: f64,
    pub focal: f64,
    pub principal: ImagePoint,
    pub width: u32,
    pub height: u32,
}

impl PinholeCamera {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.position.z > 0.0) {
            return Err(SynthError::InvalidCamera("height must be positive".into()));
        }
        if !(self.focal > 0.0) {
            return Err(SynthError::InvalidCamera("focal length must be positive".into()));
        }
        if self.width == 0 || self.height == 0 {
            return Err(SynthError::InvalidCamera("image dimensions must be positive".into()));
        }
        Ok(())
    }

    pub fn forward(&self) -> Vector3<f64> {
        let (sy, cy) = self.yaw.sin_cos();
        let (sp, cp) = self.pitch.sin_cos();
        Vector3::new(sy * cp, cy * cp, -sp)
    }

    /// Horizontal image-right direction.
    pub fn right(&self) -> Vector3<f64> {
        let (sy, cy) = self.yaw.sin_cos();
        Vector3::new(cy, -sy, 0.0)
    }

    /// World-to-camera rotation; rows are right, down, forward.
    fn rotation(&self) -> Matrix3<f64> {
        let forward = self.forward();
        let right = self.right();
        let down = forward.cross(&right);
        Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()])
    }

    pub fn project_point(&self, world: &Point3<f64>) -> Result<ImagePoint, SynthError> {
        let c = self.rotation() * (world - self.position);
        if c.z <= 0.0 {
            return Err(SynthError::BehindCamera);
        }
        Ok(ImagePoint::new(
            self.principal.x + self.focal * c.x / c.z,
            self.principal.y + self.focal * c.y / c.z,
        ))
    }

    pub fn contains(&self, p: ImagePoint) -> bool {
        (0.0..=self.width as f64).contains(&p.x) && (0.0..=self.height as f64).contains(&p.y)
    }

    pub fn camera_config(&self) -> CameraConfig {
        CameraConfig {
            height: self.position.z,
            ground_position: FloorPoint::new(self.position.x, self.position.y),
            image_width: self.width,
            image_height: self.height,
        }
    }
}

/// A level camera 2.8 m up, 2.5 m in front of the near edge of a 540×300 cm
/// grid and centred on it.
pub fn s1_primary_camera() -> PinholeCamera {
    PinholeCamera {
        position: Point3::new(270.0, -250.0, 280.0),
        yaw: 0.0,
        pitch: 0.0,
        focal: 500.0,
        principal: ImagePoint::new(640.0, 100.0),
        width: 1280,
        height: 960,
    }
}

/// A level camera 1.8 m up looking along `+X` at the same grid from its left side.
pub fn s1_secondary_camera() -> PinholeCamera {
    PinholeCamera {
        position: Point3::new(-250.0, 150.0, 180.0),
        yaw: std::f64::consts::FRAC_PI_2,
        pitch: 0.0,
        focal: 500.0,
        principal: ImagePoint::new(640.0, 100.0),
        width: 1280,
        height: 960,
    }
}

pub const S1_GRID: (f64, f64) = (540.0, 300.0);

/// Lateral half-widths of the joint pairs, cm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfWidths {
    /// Ears; eyes sit at 40% of it.
    pub head: f64,
    pub shoulder: f64,
    pub hip: f64,
    pub knee: f64,
    pub ankle: f64,
}

impl Default for HalfWidths {
    fn default() -> Self {
        Self {
            head: 8.0,
            shoulder: 20.0,
            hip: 15.0,
            knee: 11.0,
            ankle: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StickPerson {
    pub position: FloorPoint,
    /// Standing height, cm.
    pub height: f64,
    pub proportions: BodyProportions,
    pub half_widths: HalfWidths,
    /// Tilt of the body axis toward image-right, radians.
    pub lean: f64,
}

impl StickPerson {
    pub fn standing(position: FloorPoint, height: f64, proportions: BodyProportions) -> Self {
        Self {
            position,
            height,
            proportions,
            half_widths: HalfWidths::default(),
            lean: 0.0,
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        if !(self.height > 0.0) {
            return Err(SynthError::InvalidPerson("height must be positive".into()));
        }
        self.proportions
            .validate()
            .map_err(|e| SynthError::InvalidPerson(e.to_string()))?;
        if !self.position.is_finite() || !self.lean.is_finite() {
            return Err(SynthError::InvalidPerson("position and lean must be finite".into()));
        }
        Ok(())
    }
}

/// The level a joint disappears with when that level is occluded.
pub fn occlusion_level(joint: JointName) -> BodyLevel {
    use JointName::*;
    match joint {
        Nose | LeftEye | RightEye | LeftEar | RightEar => BodyLevel::Head,
        Neck | LeftShoulder | RightShoulder | LeftElbow | RightElbow => BodyLevel::Shoulder,
        LeftHip | RightHip | LeftWrist | RightWrist => BodyLevel::Hip,
        LeftKnee | RightKnee => BodyLevel::Knee,
        LeftAnkle | RightAnkle => BodyLevel::Ankle,
    }
}

/// Height fraction along the body axis and signed lateral offset (cm) of a joint.
fn joint_layout(joint: JointName, person: &StickPerson) -> (f64, f64) {
    use JointName::*;
    let p = &person.proportions;
    let w = &person.half_widths;
    let f = |l| p.fraction(l);
    let arm = w.shoulder + 4.0;
    match joint {
        Nose => (f(BodyLevel::Head), 0.0),
        Neck => (f(BodyLevel::Shoulder), 0.0),
        LeftEye => (f(BodyLevel::Head), 0.4 * w.head),
        RightEye => (f(BodyLevel::Head), -0.4 * w.head),
        LeftEar => (f(BodyLevel::Head), w.head),
        RightEar => (f(BodyLevel::Head), -w.head),
        LeftShoulder => (f(BodyLevel::Shoulder), w.shoulder),
        RightShoulder => (f(BodyLevel::Shoulder), -w.shoulder),
        LeftElbow => ((f(BodyLevel::Shoulder) + f(BodyLevel::Hip)) / 2.0, arm),
        RightElbow => ((f(BodyLevel::Shoulder) + f(BodyLevel::Hip)) / 2.0, -arm),
        LeftWrist => (f(BodyLevel::Hip), arm + 2.0),
        RightWrist => (f(BodyLevel::Hip), -(arm + 2.0)),
        LeftHip => (f(BodyLevel::Hip), w.hip),
        RightHip => (f(BodyLevel::Hip), -w.hip),
        LeftKnee => (f(BodyLevel::Knee), w.knee),
        RightKnee => (f(BodyLevel::Knee), -w.knee),
        // ankle keypoints sit ankle_ground_fraction above the sole
        LeftAnkle => (p.ankle_ground_fraction, w.ankle),
        RightAnkle => (p.ankle_ground_fraction, -w.ankle),
    }
}

/// World positions of all 18 joints of `person` as seen by `cam`.
pub fn joint_positions(cam: &PinholeCamera, person: &StickPerson) -> Vec<(JointName, Point3<f64>)> {
    let lateral = cam.right();
    let (sl, cl) = person.lean.sin_cos();
    let axis = Vector3::new(sl * lateral.x, sl * lateral.y, cl);
    let across = Vector3::new(cl * lateral.x, cl * lateral.y, -sl);
    let feet = Point3::new(person.position.x, person.position.y, 0.0);
    JointName::ALL
        .into_iter()
        .map(|j| {
            let (frac, offset) = joint_layout(j, person);
            (j, feet + axis * (frac * person.height) + across * offset)
        })
        .collect()
}

/// Detections and annotation produced for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthFrame {
    pub skeleton: DetectionRecord,
    pub bbox: DetectionRecord,
    pub annotation: AnnotationRecord,
}

pub fn synth_frame(
    frame_id: u64,
    cam: &PinholeCamera,
    person: &StickPerson,
    occlusion: &BTreeSet<BodyLevel>,
) -> Result<SynthFrame, SynthError> {
    synth_frame_with(frame_id, cam, person, occlusion, |p| p)
}

/// Like [`synth_frame`], passing each projected joint through `perturb`
/// before the skeleton and box are built.
pub fn synth_frame_with(
    frame_id: u64,
    cam: &PinholeCamera,
    person: &StickPerson,
    occlusion: &BTreeSet<BodyLevel>,
    mut perturb: impl FnMut(ImagePoint) -> ImagePoint,
) -> Result<SynthFrame, SynthError> {
    cam.validate()?;
    person.validate()?;
    let mut skeleton = Skeleton::new();
    for (joint, world) in joint_positions(cam, person) {
        if occlusion.contains(&occlusion_level(joint)) {
            continue;
        }
        let p = perturb(cam.project_point(&world)?);
        skeleton
            .insert(joint, p, 1.0)
            .map_err(|e| SynthError::InvalidPerson(e.to_string()))?;
    }
    if skeleton.is_empty() {
        return Err(SynthError::FullyOccluded);
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (_, k) in skeleton.iter() {
        x0 = x0.min(k.point.x);
        y0 = y0.min(k.point.y);
        x1 = x1.max(k.point.x);
        y1 = y1.max(k.point.y);
    }
    let bbox = BoundingBox::new(x0, y0, x1, y1, 1.0).map_err(|_| SynthError::DegenerateBox)?;
    Ok(SynthFrame {
        skeleton: DetectionRecord {
            frame_id,
            payload: Detection::Skeleton(skeleton),
            detector_id: Some("synthetic-pose".into()),
        },
        bbox: DetectionRecord {
            frame_id,
            payload: Detection::Bbox(bbox),
            detector_id: Some("synthetic-bbox".into()),
        },
        annotation: AnnotationRecord::visible(frame_id, person.position.x, person.position.y),
    })
}

/// Projected grid corners in canonical order paired with their floor coordinates.
pub fn calibration_from_grid(
    cam: &PinholeCamera,
    grid_width: f64,
    grid_height: f64,
) -> Result<([ImagePoint; 4], [FloorPoint; 4]), SynthError> {
    cam.validate()?;
    let floor = crate::geometry::grid_corner_map_points(grid_width, grid_height);
    let mut image = [ImagePoint::new(0.0, 0.0); 4];
    for (corner, (slot, f)) in image.iter_mut().zip(&floor).enumerate() {
        let p = cam
            .project_point(&Point3::new(f.x, f.y, 0.0))
            .map_err(|_| SynthError::CornerOutsideImage { corner })?;
        if !cam.contains(p) {
            return Err(SynthError::CornerOutsideImage { corner });
        }
        *slot = p;
    }
    Ok((image, floor))
}

/// Scene configuration for `cam` looking at a grid of the given size.
pub fn scene_config(cam: &PinholeCamera, camera_id: &str, grid_width: f64, grid_height: f64) -> Result<SceneConfig, SynthError> {
    let (image, _) = calibration_from_grid(cam, grid_width, grid_height)?;
    Ok(SceneConfig {
        camera_id: Some(camera_id.to_string()),
        image_width: cam.width,
        image_height: cam.height,
        units: LengthUnit::Cm,
        camera_height: cam.position.z,
        camera_x: cam.position.x,
        camera_y: cam.position.y,
        grid_width,
        grid_height,
        homography_points: image,
    })
}

/// Which body levels a corpus hides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcclusionPattern {
    None,
    /// Knees and ankles hidden, as behind a table seen sideways.
    LowerBody,
    /// Only head and shoulders remain.
    UpperOnly,
    /// Cycles through the three patterns above frame by frame.
    Mixed,
}

impl OcclusionPattern {
    fn for_frame(&self, frame: u64) -> (BTreeSet<BodyLevel>, ScenarioType) {
        let pick = match self {
            OcclusionPattern::Mixed => [OcclusionPattern::None, OcclusionPattern::LowerBody, OcclusionPattern::UpperOnly]
                [(frame % 3) as usize],
            other => *other,
        };
        match pick {
            OcclusionPattern::LowerBody => (
                [BodyLevel::Knee, BodyLevel::Ankle].into_iter().collect(),
                ScenarioType::TableSideways,
            ),
            OcclusionPattern::UpperOnly => (
                [BodyLevel::Hip, BodyLevel::Knee, BodyLevel::Ankle].into_iter().collect(),
                ScenarioType::TableStanding,
            ),
            _ => (BTreeSet::new(), ScenarioType::Baseline),
        }
    }
}

impl std::str::FromStr for OcclusionPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(OcclusionPattern::None),
            "lower-body" => Ok(OcclusionPattern::LowerBody),
            "upper-only" => Ok(OcclusionPattern::UpperOnly),
            "mixed" => Ok(OcclusionPattern::Mixed),
            other => Err(format!("unknown occlusion pattern `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub cameras: Vec<(String, PinholeCamera)>,
    pub grid: (f64, f64),
    pub n_frames: usize,
    pub person_height: f64,
    pub proportions: BodyProportions,
    pub occlusion: OcclusionPattern,
    /// Standard deviation of per-joint Gaussian pixel noise.
    pub jitter_sigma: f64,
    /// Per-camera probability that a frame has no detection.
    pub dropout: Vec<f64>,
    pub seed: u64,
}

impl CorpusSpec {
    /// One or two S1-like cameras, 170 cm person, no occlusion or noise.
    pub fn s1(n_cameras: usize, n_frames: usize, seed: u64) -> Self {
        let mut cameras = vec![("cam1".to_string(), s1_primary_camera())];
        if n_cameras > 1 {
            cameras.push(("cam2".to_string(), s1_secondary_camera()));
        }
        Self {
            dropout: vec![0.0; cameras.len()],
            cameras,
            grid: S1_GRID,
            n_frames,
            person_height: 170.0,
            proportions: BodyProportions::default(),
            occlusion: OcclusionPattern::None,
            jitter_sigma: 0.0,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CameraCorpus {
    pub scene: SceneConfig,
    pub pose: Vec<DetectionRecord>,
    pub bbox: Vec<DetectionRecord>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub cameras: Vec<CameraCorpus>,
    pub annotations: Vec<AnnotationRecord>,
    pub labels: Vec<(u64, ScenarioType)>,
}

/// Generates a seeded corpus. Positions are uniform over the grid; every
/// random draw comes from one ChaCha stream in a fixed order.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Corpus, SynthError> {
    if spec.cameras.is_empty() {
        return Err(SynthError::InvalidCorpus("at least one camera is required".into()));
    }
    if spec.dropout.len() != spec.cameras.len() || spec.dropout.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(SynthError::InvalidCorpus("one dropout probability in [0, 1] per camera".into()));
    }
    if !(spec.jitter_sigma >= 0.0 && spec.jitter_sigma.is_finite()) {
        return Err(SynthError::InvalidCorpus("jitter sigma must be non-negative".into()));
    }
    let (gw, gh) = spec.grid;
    let mut cameras = spec
        .cameras
        .iter()
        .map(|(id, cam)| {
            Ok(CameraCorpus {
                scene: scene_config(cam, id, gw, gh)?,
                pose: Vec::new(),
                bbox: Vec::new(),
            })
        })
        .collect::<Result<Vec<_>, SynthError>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.jitter_sigma.max(f64::MIN_POSITIVE)).expect("valid sigma");
    let mut annotations = Vec::with_capacity(spec.n_frames);
    let mut labels = Vec::with_capacity(spec.n_frames);
    for frame in 0..spec.n_frames as u64 {
        let position = FloorPoint::new(rng.random_range(0.0..=gw), rng.random_range(0.0..=gh));
        let person = StickPerson::standing(position, spec.person_height, spec.proportions.clone());
        let (occlusion, label) = spec.occlusion.for_frame(frame);
        for (i, (_, cam)) in spec.cameras.iter().enumerate() {
            let dropped = rng.random::<f64>() < spec.dropout[i];
            let sigma = spec.jitter_sigma;
            let out = synth_frame_with(frame, cam, &person, &occlusion, |p| {
                if sigma > 0.0 {
                    ImagePoint::new(p.x + noise.sample(&mut rng), p.y + noise.sample(&mut rng))
                } else {
                    p
                }
            })?;
            if !dropped {
                cameras[i].pose.push(out.skeleton);
                cameras[i].bbox.push(out.bbox);
            }
        }
        annotations.push(AnnotationRecord::visible(frame, position.x, position.y));
        labels.push((frame, label));
    }
    Ok(Corpus {
        cameras,
        annotations,
        labels,
    })
}
