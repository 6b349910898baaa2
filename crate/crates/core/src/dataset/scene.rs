use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{content_lines, parse_f64, read_text, DatasetError};
use crate::geometry::{grid_corner_map_points, solve_homography, CameraConfig, FloorPoint, GeometryError, Homography, ImagePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    Mm,
    #[default]
    Cm,
    M,
}

impl LengthUnit {
    pub fn to_cm(&self, v: f64) -> f64 {
        match self {
            LengthUnit::Mm => v / 10.0,
            LengthUnit::Cm => v,
            LengthUnit::M => v * 100.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LengthUnit::Mm => "mm",
            LengthUnit::Cm => "cm",
            LengthUnit::M => "m",
        }
    }
}

impl FromStr for LengthUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mm" => Ok(LengthUnit::Mm),
            "cm" => Ok(LengthUnit::Cm),
            "m" => Ok(LengthUnit::M),
            other => Err(format!("unknown unit `{other}` (expected mm, cm or m)")),
        }
    }
}

/// Grid corners. The names refer to the grid's own frame: `NearLeft` is the
/// origin, `NearRight` is `(grid_width, 0)`, `FarRight` is
/// `(grid_width, grid_height)` and `FarLeft` is `(0, grid_height)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Corner {
    NearLeft,
    NearRight,
    FarRight,
    FarLeft,
}

impl Corner {
    pub const CANONICAL: [Corner; 4] = [Corner::NearLeft, Corner::NearRight, Corner::FarRight, Corner::FarLeft];

    pub fn as_str(&self) -> &'static str {
        match self {
            Corner::NearLeft => "near-left",
            Corner::NearRight => "near-right",
            Corner::FarRight => "far-right",
            Corner::FarLeft => "far-left",
        }
    }

    fn index(&self) -> usize {
        Corner::CANONICAL.iter().position(|c| c == self).unwrap()
    }
}

impl FromStr for Corner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Corner::CANONICAL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown corner `{s}`"))
    }
}

/// Per-camera scene description.
///
/// Lengths are stored in `units`; the `*_cm` accessors convert. The
/// homography points are held in canonical corner order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub camera_id: Option<String>,
    pub image_width: u32,
    pub image_height: u32,
    pub units: LengthUnit,
    pub camera_height: f64,
    pub camera_x: f64,
    pub camera_y: f64,
    pub grid_width: f64,
    pub grid_height: f64,
    pub homography_points: [ImagePoint; 4],
}

impl SceneConfig {
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.image_width == 0 || self.image_height == 0 {
            return Err(DatasetError::validation("image dimensions must be positive"));
        }
        for (name, v) in [
            ("camera_height", self.camera_height),
            ("grid_width", self.grid_width),
            ("grid_height", self.grid_height),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DatasetError::validation(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.camera_x.is_finite() && self.camera_y.is_finite()) {
            return Err(DatasetError::validation("camera position must be finite"));
        }
        let p = &self.homography_points;
        for i in 0..4 {
            for j in i + 1..4 {
                for k in j + 1..4 {
                    let cross = (p[j].x - p[i].x) * (p[k].y - p[i].y) - (p[j].y - p[i].y) * (p[k].x - p[i].x);
                    if cross == 0.0 {
                        return Err(DatasetError::CollinearPoints {
                            source_name: None,
                            points: [i, j, k],
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn camera_id_or(&self, fallback: &str) -> String {
        self.camera_id.clone().unwrap_or_else(|| fallback.to_string())
    }

    pub fn camera_height_cm(&self) -> f64 {
        self.units.to_cm(self.camera_height)
    }

    pub fn grid_width_cm(&self) -> f64 {
        self.units.to_cm(self.grid_width)
    }

    pub fn grid_height_cm(&self) -> f64 {
        self.units.to_cm(self.grid_height)
    }

    pub fn camera_config(&self) -> CameraConfig {
        CameraConfig {
            height: self.camera_height_cm(),
            ground_position: FloorPoint::new(self.units.to_cm(self.camera_x), self.units.to_cm(self.camera_y)),
            image_width: self.image_width,
            image_height: self.image_height,
        }
    }

    /// Grid corners in cm, paired index-wise with `homography_points`.
    pub fn map_points(&self) -> [FloorPoint; 4] {
        grid_corner_map_points(self.grid_width_cm(), self.grid_height_cm())
    }

    pub fn homography(&self) -> Result<Homography, GeometryError> {
        solve_homography(&self.homography_points, &self.map_points())
    }

    /// Canonical text form, accepted by [`parse_scene_config`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(id) = &self.camera_id {
            out.push_str(&format!("camera_id = {id}\n"));
        }
        out.push_str(&format!("image_width = {}\n", self.image_width));
        out.push_str(&format!("image_height = {}\n", self.image_height));
        out.push_str(&format!("units = {}\n", self.units.as_str()));
        out.push_str(&format!("camera_height = {}\n", self.camera_height));
        out.push_str(&format!("camera_x = {}\n", self.camera_x));
        out.push_str(&format!("camera_y = {}\n", self.camera_y));
        out.push_str(&format!("grid_width = {}\n", self.grid_width));
        out.push_str(&format!("grid_height = {}\n", self.grid_height));
        let pts: Vec<String> = self
            .homography_points
            .iter()
            .flat_map(|p| [p.x.to_string(), p.y.to_string()])
            .collect();
        out.push_str(&format!("homography_points = {}\n", pts.join(",")));
        out
    }
}

impl fmt::Display for SceneConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

const KEYS: [&str; 11] = [
    "camera_id",
    "image_width",
    "image_height",
    "units",
    "camera_height",
    "camera_x",
    "camera_y",
    "grid_width",
    "grid_height",
    "homography_points",
    "corner_order",
];

pub fn load_scene_config(path: &Path) -> Result<SceneConfig, DatasetError> {
    let text = read_text(path)?;
    parse_scene_config(&text).map_err(|e| e.in_file(path))
}

/// Parses `key = value` lines.
///
/// `homography_points` holds eight comma-separated numbers (four `x,y`
/// pairs). `corner_order` optionally names the grid corner of each point;
/// it defaults to `near-left,near-right,far-right,far-left`.
pub fn parse_scene_config(text: &str) -> Result<SceneConfig, DatasetError> {
    let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (line, content) in content_lines(text) {
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| DatasetError::parse(line, "expected `key = value`"))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(DatasetError::parse(line, format!("unknown key `{key}`")));
        }
        if fields.insert(key, (line, value.trim())).is_some() {
            return Err(DatasetError::parse(line, format!("duplicate key `{key}`")));
        }
    }

    let last_line = text.lines().count().max(1);
    let required = |key: &str| {
        fields
            .get(key)
            .copied()
            .ok_or_else(|| DatasetError::parse(last_line, format!("missing key `{key}`")))
    };
    let number = |key: &str| -> Result<f64, DatasetError> {
        let (line, v) = required(key)?;
        parse_f64(v, key, line)
    };
    let pixels = |key: &str| -> Result<u32, DatasetError> {
        let (line, v) = required(key)?;
        v.parse()
            .map_err(|_| DatasetError::parse(line, format!("{key}: `{v}` is not a non-negative integer")))
    };

    let camera_id = match fields.get("camera_id") {
        Some((line, v)) if v.is_empty() || v.contains(char::is_whitespace) || v.contains([',', ';', '|']) => {
            return Err(DatasetError::parse(*line, format!("camera_id `{v}` must be a single token")))
        }
        Some((_, v)) => Some(v.to_string()),
        None => None,
    };
    let units = match fields.get("units") {
        Some((line, v)) => v.parse().map_err(|e: String| DatasetError::parse(*line, e))?,
        None => LengthUnit::Cm,
    };

    let (hp_line, hp) = required("homography_points")?;
    let numbers = hp
        .split(',')
        .map(|f| parse_f64(f, "homography_points", hp_line))
        .collect::<Result<Vec<f64>, _>>()?;
    if numbers.len() % 2 != 0 {
        return Err(DatasetError::parse(
            hp_line,
            format!("homography_points: {} numbers do not form x,y pairs", numbers.len()),
        ));
    }
    if numbers.len() != 8 {
        return Err(DatasetError::validation(format!(
            "exactly 4 homography points are required, got {}",
            numbers.len() / 2
        )));
    }
    let given: Vec<ImagePoint> = numbers.chunks(2).map(|c| ImagePoint::new(c[0], c[1])).collect();

    let order = match fields.get("corner_order") {
        Some((line, v)) => {
            let corners = v
                .split(',')
                .map(|c| c.trim().parse::<Corner>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| DatasetError::parse(*line, e))?;
            let mut seen = corners.clone();
            seen.sort();
            seen.dedup();
            if corners.len() != 4 || seen.len() != 4 {
                return Err(DatasetError::parse(*line, "corner_order must name each of the 4 corners once"));
            }
            corners
        }
        None => Corner::CANONICAL.to_vec(),
    };
    let mut homography_points = [ImagePoint::new(0.0, 0.0); 4];
    for (corner, p) in order.iter().zip(given) {
        homography_points[corner.index()] = p;
    }

    let cfg = SceneConfig {
        camera_id,
        image_width: pixels("image_width")?,
        image_height: pixels("image_height")?,
        units,
        camera_height: number("camera_height")?,
        camera_x: number("camera_x")?,
        camera_y: number("camera_y")?,
        grid_width: number("grid_width")?,
        grid_height: number("grid_height")?,
        homography_points,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1_text() -> &'static str {
        "# S1_Wide, camera 1\n\
         camera_id = cam1\n\
         image_width = 1280\n\
         image_height = 960\n\
         units = cm\n\
         camera_height = 280\n\
         camera_x = 270\n\
         camera_y = -250\n\
         grid_width = 540\n\
         grid_height = 300\n\
         homography_points = 100,660,1180,660,885.4545454545455,354.54545454545456,394.54545454545456,354.54545454545456\n"
    }

    #[test]
    fn s1_wide_accepted() {
        let cfg = parse_scene_config(s1_text()).unwrap();
        assert_eq!(cfg.grid_width_cm(), 540.0);
        assert_eq!(cfg.grid_height_cm(), 300.0);
        assert_eq!(cfg.camera_height_cm(), 280.0);
        assert_eq!(cfg.camera_id.as_deref(), Some("cam1"));
        assert!(cfg.homography().is_ok());
    }

    #[test]
    fn s2_narrow_accepted_in_metres() {
        let text = "image_width = 640\nimage_height = 480\nunits = m\ncamera_height = 2.5\n\
                    camera_x = 1.125\ncamera_y = -1\ngrid_width = 2.25\ngrid_height = 10\n\
                    homography_points = 100,400,540,400,350,120,290,120\n";
        let cfg = parse_scene_config(text).unwrap();
        assert_eq!(cfg.grid_width_cm(), 225.0);
        assert_eq!(cfg.grid_height_cm(), 1000.0);
        assert_eq!(cfg.camera_height_cm(), 250.0);
        assert_eq!(cfg.camera_config().ground_position, FloorPoint::new(112.5, -100.0));
    }

    #[test]
    fn three_points_is_a_validation_error() {
        let text = s1_text().replace(
            "homography_points = 100,660,1180,660,885.4545454545455,354.54545454545456,394.54545454545456,354.54545454545456",
            "homography_points = 100,660,1180,660,885,354",
        );
        assert!(matches!(parse_scene_config(&text), Err(DatasetError::Validation { .. })));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = s1_text().replace("camera_height = 280", "camera_height = tall");
        match parse_scene_config(&text) {
            Err(DatasetError::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_scene_config(&format!("{}colour = red\n", s1_text())),
            Err(DatasetError::Parse { .. })
        ));
        assert!(matches!(
            parse_scene_config(&format!("{}grid_width = 1\n", s1_text())),
            Err(DatasetError::Parse { .. })
        ));
    }

    #[test]
    fn collinear_points_rejected() {
        let text = s1_text().replace(
            "homography_points = 100,660,1180,660,885.4545454545455,354.54545454545456,394.54545454545456,354.54545454545456",
            "homography_points = 0,0,10,10,20,20,0,30",
        );
        assert!(matches!(
            parse_scene_config(&text),
            Err(DatasetError::CollinearPoints { points: [0, 1, 2], .. })
        ));
    }

    #[test]
    fn corner_order_is_normalized() {
        let text = s1_text().replace(
            "homography_points = 100,660,1180,660,885.4545454545455,354.54545454545456,394.54545454545456,354.54545454545456",
            "homography_points = 394.54545454545456,354.54545454545456,100,660,1180,660,885.4545454545455,354.54545454545456\ncorner_order = far-left,near-left,near-right,far-right",
        );
        let shuffled = parse_scene_config(&text).unwrap();
        let canonical = parse_scene_config(s1_text()).unwrap();
        assert_eq!(shuffled.homography_points, canonical.homography_points);
    }

    #[test]
    fn canonical_text_round_trips() {
        let cfg = parse_scene_config(s1_text()).unwrap();
        let text = cfg.to_text();
        let again = parse_scene_config(&text).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(text, again.to_text());
        let body: Vec<&str> = s1_text().lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(text.lines().collect::<Vec<_>>(), body);
    }
}
