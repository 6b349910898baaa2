//! Locating people on a floor plane from surveillance camera detections.
//!
//! Image-space feet points come from a pose skeleton (with body extension
//! when the lower body is occluded) or a bounding box. A four-point
//! homography maps them to floor coordinates, and estimates from several
//! cameras are fused by inverse distance weighting.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dataset;
pub mod evaluation;
pub mod feet;
pub mod fusion;
pub mod geometry;
pub mod pipeline;
pub mod synthetic;

use std::path::PathBuf;

use thiserror::Error;

pub use dataset::{AnnotationRecord, DatasetError, Detection, DetectionRecord, SceneConfig};
pub use evaluation::{evaluate_run, EvalError, EvalReport};
pub use feet::{BodyLevel, BodyProportions, BoundingBox, FeetEstimate, FeetMethod, JointName, Skeleton};
pub use fusion::{fuse_many, fuse_pair, CameraEstimate, FusedEstimate};
pub use geometry::{solve_homography, FloorPoint, GeometryError, Homography, ImagePoint};
pub use pipeline::{run, Method, PipelineError, PositionTrack, RunConfig};
pub use synthetic::{PinholeCamera, StickPerson, SynthError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 usage, 3 parse/validation, 4 degenerate geometry (including
    /// collinear calibration points), 5 I/O.
    pub fn exit_code(&self) -> i32 {
        fn dataset(e: &DatasetError) -> i32 {
            match e {
                DatasetError::Io { .. } => EXIT_IO,
                DatasetError::CollinearPoints { .. } => EXIT_DEGENERATE,
                _ => EXIT_INVALID_INPUT,
            }
        }
        match self {
            Error::Usage(_) => EXIT_USAGE,
            Error::Dataset(e) => dataset(e),
            Error::Geometry(_) => EXIT_DEGENERATE,
            Error::Eval(_) => EXIT_INVALID_INPUT,
            Error::Pipeline(PipelineError::Dataset(e)) => dataset(e),
            Error::Pipeline(PipelineError::Geometry { .. }) => EXIT_DEGENERATE,
            Error::Pipeline(_) => EXIT_INVALID_INPUT,
            Error::Synth(SynthError::CornerOutsideImage { .. } | SynthError::BehindCamera) => EXIT_DEGENERATE,
            Error::Synth(_) => EXIT_INVALID_INPUT,
            Error::Io { .. } => EXIT_IO,
        }
    }
}
