//! Distance-weighted merging of per-camera floor estimates.
//!
//! Two present estimates combine as `(d2·p1 + d1·p2) / (d1 + d2)`; a camera
//! that missed the frame is replaced by the other one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::FloorPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("camera `{0}`: distance must be finite and non-negative")]
    InvalidDistance(String),
    #[error("camera `{0}`: position must be finite")]
    InvalidPosition(String),
    #[error("no estimates to fuse")]
    Empty,
}

/// One camera's estimate for one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraEstimate {
    pub camera_id: String,
    position: Option<FloorPoint>,
    distance: Option<f64>,
}

impl CameraEstimate {
    /// `distance` is measured from the camera's floor projection to `position`.
    pub fn present(camera_id: impl Into<String>, position: FloorPoint, distance: f64) -> Result<Self, FusionError> {
        let camera_id = camera_id.into();
        if !position.is_finite() {
            return Err(FusionError::InvalidPosition(camera_id));
        }
        if !(distance.is_finite() && distance >= 0.0) {
            return Err(FusionError::InvalidDistance(camera_id));
        }
        Ok(Self {
            camera_id,
            position: Some(position),
            distance: Some(distance),
        })
    }

    pub fn missing(camera_id: impl Into<String>) -> Self {
        Self {
            camera_id: camera_id.into(),
            position: None,
            distance: None,
        }
    }

    pub fn position(&self) -> Option<FloorPoint> {
        self.position
    }

    pub fn distance(&self) -> Option<f64> {
        self.distance
    }

    fn parts(&self) -> Option<(FloorPoint, f64)> {
        Some((self.position?, self.distance?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedEstimate {
    pub position: Option<FloorPoint>,
    pub contributors: Vec<String>,
    /// Set when every contributing distance was zero and an unweighted mean
    /// was used instead.
    pub equal_weights: bool,
}

impl FusedEstimate {
    fn absent() -> Self {
        Self {
            position: None,
            contributors: Vec::new(),
            equal_weights: false,
        }
    }

    fn single(e: &CameraEstimate, p: FloorPoint) -> Self {
        Self {
            position: Some(p),
            contributors: vec![e.camera_id.clone()],
            equal_weights: false,
        }
    }
}

pub fn fuse_pair(e1: &CameraEstimate, e2: &CameraEstimate) -> FusedEstimate {
    match (e1.parts(), e2.parts()) {
        (None, None) => FusedEstimate::absent(),
        (Some((p1, _)), None) => FusedEstimate::single(e1, p1),
        (None, Some((p2, _))) => FusedEstimate::single(e2, p2),
        (Some((p1, d1)), Some((p2, d2))) => {
            let contributors = vec![e1.camera_id.clone(), e2.camera_id.clone()];
            if d1 == 0.0 && d2 == 0.0 {
                return FusedEstimate {
                    position: Some(p1.midpoint(&p2)),
                    contributors,
                    equal_weights: true,
                };
            }
            let sum = d1 + d2;
            FusedEstimate {
                position: Some(FloorPoint::new(
                    (d2 * p1.x + d1 * p2.x) / sum,
                    (d2 * p1.y + d1 * p2.y) / sum,
                )),
                contributors,
                equal_weights: false,
            }
        }
    }
}

/// Inverse-distance weighting over any number of cameras.
///
/// Weights are `1/d_i`. Two present estimates go through [`fuse_pair`]. A
/// camera at zero distance takes all the weight; several at zero distance
/// are averaged.
pub fn fuse_many(estimates: &[CameraEstimate]) -> Result<FusedEstimate, FusionError> {
    if estimates.is_empty() {
        return Err(FusionError::Empty);
    }
    let present: Vec<(&CameraEstimate, FloorPoint, f64)> = estimates
        .iter()
        .filter_map(|e| e.parts().map(|(p, d)| (e, p, d)))
        .collect();
    match present.as_slice() {
        [] => return Ok(FusedEstimate::absent()),
        [(e, p, _)] => return Ok(FusedEstimate::single(e, *p)),
        [(a, _, _), (b, _, _)] => return Ok(fuse_pair(a, b)),
        _ => {}
    }

    let contributors: Vec<String> = present.iter().map(|(e, _, _)| e.camera_id.clone()).collect();
    let zero: Vec<FloorPoint> = present.iter().filter(|(_, _, d)| *d == 0.0).map(|(_, p, _)| *p).collect();
    if zero.len() >= 2 {
        let n = zero.len() as f64;
        return Ok(FusedEstimate {
            position: Some(FloorPoint::new(
                zero.iter().map(|p| p.x).sum::<f64>() / n,
                zero.iter().map(|p| p.y).sum::<f64>() / n,
            )),
            contributors,
            equal_weights: zero.len() == present.len(),
        });
    }
    if let Some(p) = zero.first() {
        return Ok(FusedEstimate {
            position: Some(*p),
            contributors,
            equal_weights: false,
        });
    }

    // Normalising by the largest inverse distance keeps weights in (0, 1].
    let min_d = present.iter().map(|(_, _, d)| *d).fold(f64::INFINITY, f64::min);
    let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
    for (_, p, d) in &present {
        let w = min_d / d;
        sx += w * p.x;
        sy += w * p.y;
        sw += w;
    }
    Ok(FusedEstimate {
        position: Some(FloorPoint::new(sx / sw, sy / sw)),
        contributors,
        equal_weights: false,
    })
}
