//! Image-to-floor homography calibration and projection.
//!
//! A [`Homography`] carries the eight projective parameters `a..h` of
//!
//! ```text
//! X = (a·x + b·y + c) / (g·x + h·y + 1)
//! Y = (d·x + e·y + f) / (g·x + h·y + 1)
//! ```
//!
//! mapping an image pixel `(x, y)` to floor coordinates `(X, Y)` in cm.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest tolerated ratio between the biggest and smallest elimination pivot.
pub const MAX_PIVOT_RATIO: f64 = 1e12;

/// Relative magnitude below which the projective denominator counts as zero.
pub const HORIZON_EPSILON: f64 = 1e-9;

/// Relative round-trip tolerance every calibration correspondence must meet.
pub const CALIBRATION_TOLERANCE: f64 = 1e-9;

// Triangle area relative to the squared point spread below which three points
// are treated as collinear.
const COLLINEAR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate calibration: {0}")]
    DegenerateCalibration(String),
    #[error("point ({x}, {y}) lies on or beyond the projective horizon")]
    ProjectiveHorizon { x: f64, y: f64 },
    #[error("distances must be positive (got {d1}, {d2})")]
    NonPositiveDistance { d1: f64, d2: f64 },
}

/// A pixel position; origin top-left, `y` grows downward.
///
/// Points may lie outside the image rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImagePoint {
    pub x: f64,
    pub y: f64,
}

impl ImagePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn midpoint(&self, other: &ImagePoint) -> ImagePoint {
        ImagePoint::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    pub fn distance(&self, other: &ImagePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A position on the floor grid, in cm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorPoint {
    pub x: f64,
    pub y: f64,
}

impl FloorPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &FloorPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(&self, other: &FloorPoint) -> FloorPoint {
        FloorPoint::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }
}

/// Mounting geometry of a fixed camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraConfig {
    /// Height of the optical centre above the floor, cm.
    pub height: f64,
    /// The camera's vertical projection onto the floor.
    pub ground_position: FloorPoint,
    pub image_width: u32,
    pub image_height: u32,
}

/// The projective parameters `a..h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Homography {
    params: [f64; 8],
}

impl Homography {
    pub const IDENTITY: Homography = Homography {
        params: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
    };

    /// Wraps raw parameters in `a, b, c, d, e, f, g, h` order.
    pub fn from_params(params: [f64; 8]) -> Self {
        Self { params }
    }

    pub fn params(&self) -> [f64; 8] {
        self.params
    }

    fn denominator(&self, p: ImagePoint) -> (f64, f64) {
        let [_, _, _, _, _, _, g, h] = self.params;
        let gx = g * p.x;
        let hy = h * p.y;
        (gx + hy + 1.0, gx.abs() + hy.abs() + 1.0)
    }

    /// Maps an image point onto the floor plane.
    pub fn project(&self, p: ImagePoint) -> Result<FloorPoint, GeometryError> {
        let [a, b, c, d, e, f, _, _] = self.params;
        let (w, scale) = self.denominator(p);
        if !(w.abs() > HORIZON_EPSILON * scale) {
            return Err(GeometryError::ProjectiveHorizon { x: p.x, y: p.y });
        }
        let out = FloorPoint::new((a * p.x + b * p.y + c) / w, (d * p.x + e * p.y + f) / w);
        if !out.is_finite() {
            return Err(GeometryError::ProjectiveHorizon { x: p.x, y: p.y });
        }
        Ok(out)
    }

    /// Relative round-trip error of each correspondence, `|H(p) - P| / max(|P|, 1)`.
    ///
    /// A correspondence that cannot be projected reports `f64::INFINITY`.
    pub fn residuals(&self, camera_points: &[ImagePoint], map_points: &[FloorPoint]) -> Vec<f64> {
        camera_points
            .iter()
            .zip(map_points)
            .map(|(p, m)| match self.project(*p) {
                Ok(q) => q.distance(m) / m.x.hypot(m.y).max(1.0),
                Err(_) => f64::INFINITY,
            })
            .collect()
    }

    fn as_matrix(&self) -> [[f64; 3]; 3] {
        let [a, b, c, d, e, f, g, h] = self.params;
        [[a, b, c], [d, e, f], [g, h, 1.0]]
    }
}

/// Projects an image point with `h`; see [`Homography::project`].
pub fn project_to_floor(h: &Homography, p: ImagePoint) -> Result<FloorPoint, GeometryError> {
    h.project(p)
}

/// Planar distance between the camera's floor projection and `p`.
pub fn camera_floor_distance(cam: &CameraConfig, p: FloorPoint) -> f64 {
    cam.ground_position.distance(&p)
}

/// Line-of-sight distance from the optical centre to the floor point `p`.
pub fn camera_slant_distance(cam: &CameraConfig, p: FloorPoint) -> f64 {
    camera_floor_distance(cam, p).hypot(cam.height)
}

/// Predicted ratio of floor errors at distances `d2` and `d1` for a fixed
/// feet error in the image.
pub fn expected_error_ratio(d1: f64, d2: f64) -> Result<f64, GeometryError> {
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(GeometryError::NonPositiveDistance { d1, d2 });
    }
    Ok(d2 / d1)
}

/// Floor coordinates of the grid corners in the canonical order
/// `(near-left, near-right, far-right, far-left)`.
///
/// The origin is the near-left corner, `X` runs along the near edge and `Y`
/// runs away from it.
pub fn grid_corner_map_points(grid_width: f64, grid_height: f64) -> [FloorPoint; 4] {
    [
        FloorPoint::new(0.0, 0.0),
        FloorPoint::new(grid_width, 0.0),
        FloorPoint::new(grid_width, grid_height),
        FloorPoint::new(0.0, grid_height),
    ]
}

/// Solves the eight-parameter homography from four correspondences.
///
/// Both point sets are translated and scaled to unit spread before the
/// 8×8 system is assembled; the result is mapped back to pixel and cm units.
pub fn solve_homography(
    camera_points: &[ImagePoint; 4],
    map_points: &[FloorPoint; 4],
) -> Result<Homography, GeometryError> {
    let cam: Vec<(f64, f64)> = camera_points.iter().map(|p| (p.x, p.y)).collect();
    let map: Vec<(f64, f64)> = map_points.iter().map(|p| (p.x, p.y)).collect();
    check_configuration(&cam, "camera")?;
    check_configuration(&map, "map")?;

    let cam_norm = Normalization::fit(&cam);
    let map_norm = Normalization::fit(&map);
    let cam_n: Vec<(f64, f64)> = cam.iter().map(|&p| cam_norm.apply(p)).collect();
    let map_n: Vec<(f64, f64)> = map.iter().map(|&p| map_norm.apply(p)).collect();

    let (system, rhs) = dlt_system(&cam_n, &map_n);
    let solution = solve_dense(system, rhs)?;
    let normalized = Homography::from_params(solution).as_matrix();

    // H = T_map^-1 · Hn · T_cam
    let full = mat_mul(&mat_mul(&map_norm.inverse_matrix(), &normalized), &cam_norm.matrix());
    let scale = full[2][2];
    let magnitude = full.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(scale.abs() > HORIZON_EPSILON * magnitude) {
        return Err(GeometryError::DegenerateCalibration(
            "image origin maps to the horizon; parameters are unbounded".into(),
        ));
    }
    let params = [
        full[0][0] / scale,
        full[0][1] / scale,
        full[0][2] / scale,
        full[1][0] / scale,
        full[1][1] / scale,
        full[1][2] / scale,
        full[2][0] / scale,
        full[2][1] / scale,
    ];
    if params.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::DegenerateCalibration("non-finite parameters".into()));
    }
    let homography = Homography::from_params(params);

    let worst = homography
        .residuals(camera_points, map_points)
        .into_iter()
        .fold(0.0_f64, f64::max);
    if !(worst <= CALIBRATION_TOLERANCE) {
        return Err(GeometryError::DegenerateCalibration(format!(
            "round-trip residual {worst:e} exceeds {CALIBRATION_TOLERANCE:e}"
        )));
    }
    Ok(homography)
}

/// Assembles the linear system for `a..h` in the row order
/// `X1..X4, Y1..Y4`.
pub(crate) fn dlt_system(cam: &[(f64, f64)], map: &[(f64, f64)]) -> ([[f64; 8]; 8], [f64; 8]) {
    let mut a = [[0.0; 8]; 8];
    let mut b = [0.0; 8];
    for i in 0..4 {
        let (x, y) = cam[i];
        let (mx, my) = map[i];
        a[i] = [x, y, 1.0, 0.0, 0.0, 0.0, -x * mx, -y * mx];
        a[i + 4] = [0.0, 0.0, 0.0, x, y, 1.0, -x * my, -y * my];
        b[i] = mx;
        b[i + 4] = my;
    }
    (a, b)
}

fn check_configuration(points: &[(f64, f64)], which: &str) -> Result<(), GeometryError> {
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(GeometryError::DegenerateCalibration(format!(
            "{which} points must be finite"
        )));
    }
    let mut spread = 0.0_f64;
    for i in 0..4 {
        for j in i + 1..4 {
            spread = spread.max((points[i].0 - points[j].0).hypot(points[i].1 - points[j].1));
        }
    }
    if spread == 0.0 {
        return Err(GeometryError::DegenerateCalibration(format!(
            "{which} points coincide"
        )));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let d = (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1);
            if d <= COLLINEAR_TOLERANCE * spread {
                return Err(GeometryError::DegenerateCalibration(format!(
                    "{which} points {i} and {j} coincide"
                )));
            }
            for k in j + 1..4 {
                let (ax, ay) = points[i];
                let (bx, by) = points[j];
                let (cx, cy) = points[k];
                let cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
                if cross.abs() <= COLLINEAR_TOLERANCE * spread * spread {
                    return Err(GeometryError::DegenerateCalibration(format!(
                        "{which} points {i}, {j} and {k} are collinear"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Similarity transform moving the centroid to the origin with mean
/// distance √2.
#[derive(Debug, Clone, Copy)]
struct Normalization {
    cx: f64,
    cy: f64,
    scale: f64,
}

impl Normalization {
    fn fit(points: &[(f64, f64)]) -> Self {
        let n = points.len() as f64;
        let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let cy = points.iter().map(|p| p.1).sum::<f64>() / n;
        let mean = points.iter().map(|p| (p.0 - cx).hypot(p.1 - cy)).sum::<f64>() / n;
        Self {
            cx,
            cy,
            scale: std::f64::consts::SQRT_2 / mean,
        }
    }

    fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x - self.cx) * self.scale, (y - self.cy) * self.scale)
    }

    fn matrix(&self) -> [[f64; 3]; 3] {
        let s = self.scale;
        [[s, 0.0, -s * self.cx], [0.0, s, -s * self.cy], [0.0, 0.0, 1.0]]
    }

    fn inverse_matrix(&self) -> [[f64; 3]; 3] {
        let s = 1.0 / self.scale;
        [[s, 0.0, self.cx], [0.0, s, self.cy], [0.0, 0.0, 1.0]]
    }
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: [[f64; 8]; 8], mut b: [f64; 8]) -> Result<[f64; 8], GeometryError> {
    const N: usize = 8;
    let mut max_pivot = 0.0_f64;
    let mut min_pivot = f64::INFINITY;
    for col in 0..N {
        let pivot_row = (col..N)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        let pivot = a[pivot_row][col];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(GeometryError::DegenerateCalibration("singular system".into()));
        }
        max_pivot = max_pivot.max(pivot.abs());
        min_pivot = min_pivot.min(pivot.abs());
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..N {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    if max_pivot / min_pivot > MAX_PIVOT_RATIO {
        return Err(GeometryError::DegenerateCalibration(format!(
            "pivot ratio {:e} exceeds {MAX_PIVOT_RATIO:e}",
            max_pivot / min_pivot
        )));
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let tail: f64 = (row + 1..N).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: [(f64, f64); 4]) -> [ImagePoint; 4] {
        v.map(|(x, y)| ImagePoint::new(x, y))
    }

    fn fpts(v: [(f64, f64); 4]) -> [FloorPoint; 4] {
        v.map(|(x, y)| FloorPoint::new(x, y))
    }

    fn assert_params(h: &Homography, expected: [f64; 8]) {
        for (got, want) in h.params().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{:?} vs {:?}", h.params(), expected);
        }
    }

    #[test]
    fn unit_square_identity() {
        let sq = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];
        let h = solve_homography(&pts(sq), &fpts(sq)).unwrap();
        assert_params(&h, [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn uniform_scale() {
        let cam = pts([(0.0, 0.0), (0.0, 2.0), (2.0, 0.0), (2.0, 2.0)]);
        let map = fpts([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);
        let h = solve_homography(&cam, &map).unwrap();
        assert_params(&h, [0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0]);
        let p = h.project(ImagePoint::new(2.0, 2.0)).unwrap();
        assert!((p.x - 1.0).abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_projection() {
        let p = project_to_floor(&Homography::IDENTITY, ImagePoint::new(3.0, 7.0)).unwrap();
        assert_eq!(p, FloorPoint::new(3.0, 7.0));
    }

    #[test]
    fn collinear_points_rejected() {
        let cam = pts([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (0.0, 5.0)]);
        let map = fpts([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);
        assert!(matches!(
            solve_homography(&cam, &map),
            Err(GeometryError::DegenerateCalibration(_))
        ));
        assert!(matches!(
            solve_homography(&pts([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]), &fpts([(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0)])),
            Err(GeometryError::DegenerateCalibration(_))
        ));
    }

    #[test]
    fn horizon_detected() {
        // g = 1: the line x = -1 maps to infinity
        let h = Homography::from_params([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(
            h.project(ImagePoint::new(-1.0, 4.0)),
            Err(GeometryError::ProjectiveHorizon { .. })
        ));
        assert!(h.project(ImagePoint::new(-0.5, 4.0)).is_ok());
    }

    #[test]
    fn floor_distance_examples() {
        let cam = |x, y| CameraConfig {
            height: 280.0,
            ground_position: FloorPoint::new(x, y),
            image_width: 640,
            image_height: 480,
        };
        assert_eq!(camera_floor_distance(&cam(0.0, 0.0), FloorPoint::new(3.0, 4.0)), 5.0);
        assert_eq!(camera_floor_distance(&cam(100.0, 100.0), FloorPoint::new(100.0, 100.0)), 0.0);
        let d = camera_floor_distance(&cam(60.0, 0.0), FloorPoint::new(300.0, 240.0));
        assert!((d - 339.411_254_969_542_8).abs() < 1e-9);
        assert!((camera_slant_distance(&cam(0.0, 0.0), FloorPoint::new(0.0, 210.0)) - 350.0).abs() < 1e-12);
    }

    #[test]
    fn error_ratio_examples() {
        assert_eq!(expected_error_ratio(200.0, 200.0).unwrap(), 1.0);
        assert_eq!(expected_error_ratio(200.0, 400.0).unwrap(), 2.0);
        assert!((expected_error_ratio(150.0, 345.0).unwrap() - 2.3).abs() < 1e-12);
        assert!(matches!(
            expected_error_ratio(0.0, 10.0),
            Err(GeometryError::NonPositiveDistance { .. })
        ));
        assert!(expected_error_ratio(10.0, -1.0).is_err());
    }

    #[test]
    fn grid_corners_in_canonical_order() {
        let c = grid_corner_map_points(540.0, 300.0);
        assert_eq!(c[0], FloorPoint::new(0.0, 0.0));
        assert_eq!(c[1], FloorPoint::new(540.0, 0.0));
        assert_eq!(c[2], FloorPoint::new(540.0, 300.0));
        assert_eq!(c[3], FloorPoint::new(0.0, 300.0));
    }
}
