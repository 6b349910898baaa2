//! Scene configurations, ground-truth annotations and detection files.
//!
//! All three formats are line oriented plain text. Blank lines and lines
//! starting with `#` are ignored everywhere.

mod annotations;
mod detections;
mod scene;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use annotations::{
    load_annotations, merge_ground_truth, mismatch_stats, parse_annotations, write_annotations, AnnotationRecord,
    AxisMismatch, MismatchStats,
};
pub use detections::{load_detections, parse_detections, write_detections, Detection, DetectionRecord};
pub use scene::{load_scene_config, parse_scene_config, Corner, LengthUnit, SceneConfig};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{}line {line}: {message}", source_prefix(.source_name))]
    Parse {
        source_name: Option<PathBuf>,
        line: usize,
        message: String,
    },
    #[error("{}invalid: {message}", source_prefix(.source_name))]
    Validation {
        source_name: Option<PathBuf>,
        message: String,
    },
    #[error("{}duplicate frame {frame} (line {line})", source_prefix(.source_name))]
    DuplicateFrame {
        source_name: Option<PathBuf>,
        frame: u64,
        line: usize,
    },
    #[error("{}homography points {} are collinear", source_prefix(.source_name), .points.map(|i| i.to_string()).join(", "))]
    CollinearPoints {
        source_name: Option<PathBuf>,
        points: [usize; 3],
    },
    #[error("no frame is visible in both annotation sets")]
    NoOverlap,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn source_prefix(name: &Option<PathBuf>) -> String {
    match name {
        Some(p) => format!("{}: ", p.display()),
        None => String::new(),
    }
}

impl DatasetError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        DatasetError::Parse {
            source_name: None,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn validation(message: impl Into<String>) -> Self {
        DatasetError::Validation {
            source_name: None,
            message: message.into(),
        }
    }

    /// Attaches the file the error came from.
    pub fn in_file(mut self, path: &Path) -> Self {
        match &mut self {
            DatasetError::Parse { source_name, .. }
            | DatasetError::Validation { source_name, .. }
            | DatasetError::DuplicateFrame { source_name, .. }
            | DatasetError::CollinearPoints { source_name, .. } => *source_name = Some(path.to_path_buf()),
            DatasetError::NoOverlap | DatasetError::Io { .. } => {}
        }
        self
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, DatasetError> {
    std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-empty, non-comment lines with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_f64(field: &str, what: &str, line: usize) -> Result<f64, DatasetError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| DatasetError::parse(line, format!("{what}: `{}` is not a number", field.trim())))?;
    if !v.is_finite() {
        return Err(DatasetError::parse(line, format!("{what}: `{}` is not finite", field.trim())));
    }
    Ok(v)
}

pub(crate) fn parse_frame_id(field: &str, line: usize) -> Result<u64, DatasetError> {
    field
        .trim()
        .parse()
        .map_err(|_| DatasetError::parse(line, format!("frame id `{}` is not a non-negative integer", field.trim())))
}
