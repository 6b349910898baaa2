use std::collections::BTreeMap;
use std::path::Path;

use super::{content_lines, parse_f64, parse_frame_id, read_text, DatasetError};
use crate::feet::{BoundingBox, JointName, Skeleton};
use crate::geometry::ImagePoint;

#[derive(Debug, Clone, PartialEq)]
pub enum Detection {
    Bbox(BoundingBox),
    Skeleton(Skeleton),
}

impl Detection {
    pub fn kind(&self) -> &'static str {
        match self {
            Detection::Bbox(_) => "bbox",
            Detection::Skeleton(_) => "skeleton",
        }
    }
}

/// One detector output for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRecord {
    pub frame_id: u64,
    pub payload: Detection,
    pub detector_id: Option<String>,
}

pub fn load_detections(path: &Path) -> Result<Vec<DetectionRecord>, DatasetError> {
    let text = read_text(path)?;
    parse_detections(&text).map_err(|e| e.in_file(path))
}

/// Parses `frame_id|kind|payload[|detector_id]` lines.
///
/// `bbox` payloads are `x_min,y_min,x_max,y_max,conf`; `skeleton` payloads
/// are `;`-separated `joint:x,y,conf` entries (possibly none). One record
/// per frame; output is sorted by frame.
pub fn parse_detections(text: &str) -> Result<Vec<DetectionRecord>, DatasetError> {
    let mut records: BTreeMap<u64, DetectionRecord> = BTreeMap::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split('|').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(DatasetError::parse(line, "expected `frame_id|kind|payload[|detector_id]`"));
        }
        let frame_id = parse_frame_id(fields[0], line)?;
        let payload = match fields[1].trim() {
            "bbox" => Detection::Bbox(parse_bbox(fields[2], line)?),
            "skeleton" => Detection::Skeleton(parse_skeleton(fields[2], line)?),
            other => return Err(DatasetError::parse(line, format!("unknown payload kind `{other}`"))),
        };
        let detector_id = match fields.get(3).map(|d| d.trim()) {
            None => None,
            Some("") => return Err(DatasetError::parse(line, "empty detector id")),
            Some(d) => Some(d.to_string()),
        };
        let record = DetectionRecord {
            frame_id,
            payload,
            detector_id,
        };
        if records.insert(frame_id, record).is_some() {
            return Err(DatasetError::DuplicateFrame {
                source_name: None,
                frame: frame_id,
                line,
            });
        }
    }
    Ok(records.into_values().collect())
}

fn parse_bbox(payload: &str, line: usize) -> Result<BoundingBox, DatasetError> {
    let v = payload
        .split(',')
        .map(|f| parse_f64(f, "bbox", line))
        .collect::<Result<Vec<_>, _>>()?;
    let [x0, y0, x1, y1, conf] = v[..] else {
        return Err(DatasetError::parse(line, format!("bbox needs 5 numbers, got {}", v.len())));
    };
    BoundingBox::new(x0, y0, x1, y1, conf).map_err(|e| DatasetError::parse(line, e.to_string()))
}

fn parse_skeleton(payload: &str, line: usize) -> Result<Skeleton, DatasetError> {
    let mut skeleton = Skeleton::new();
    for entry in payload.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let (name, values) = entry
            .split_once(':')
            .ok_or_else(|| DatasetError::parse(line, format!("joint entry `{entry}` lacks `name:`")))?;
        let joint: JointName = name.trim().parse().map_err(|e: crate::feet::FeetError| DatasetError::parse(line, e.to_string()))?;
        let v = values
            .split(',')
            .map(|f| parse_f64(f, joint.as_str(), line))
            .collect::<Result<Vec<_>, _>>()?;
        let [x, y, conf] = v[..] else {
            return Err(DatasetError::parse(line, format!("{joint} needs x,y,conf")));
        };
        if skeleton.get(joint).is_some() {
            return Err(DatasetError::parse(line, format!("joint {joint} listed twice")));
        }
        skeleton
            .insert(joint, ImagePoint::new(x, y), conf)
            .map_err(|e| DatasetError::parse(line, e.to_string()))?;
    }
    Ok(skeleton)
}

pub fn write_detections(records: &[DetectionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let payload = match &r.payload {
            Detection::Bbox(b) => format!("{},{},{},{},{}", b.x_min, b.y_min, b.x_max, b.y_max, b.confidence),
            Detection::Skeleton(s) => s
                .iter()
                .map(|(j, k)| format!("{}:{},{},{}", j, k.point.x, k.point.y, k.confidence))
                .collect::<Vec<_>>()
                .join(";"),
        };
        out.push_str(&format!("{}|{}|{}", r.frame_id, r.payload.kind(), payload));
        if let Some(d) = &r.detector_id {
            out.push('|');
            out.push_str(d);
        }
        out.push('\n');
    }
    out
}
