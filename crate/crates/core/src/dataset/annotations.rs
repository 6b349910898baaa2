use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{content_lines, parse_f64, parse_frame_id, read_text, DatasetError};
use crate::geometry::FloorPoint;

/// Ground-truth position of the person in one frame, in cm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub frame_id: u64,
    pub position: FloorPoint,
    pub visible: bool,
}

impl AnnotationRecord {
    pub fn visible(frame_id: u64, x: f64, y: f64) -> Self {
        Self {
            frame_id,
            position: FloorPoint::new(x, y),
            visible: true,
        }
    }

    pub fn hidden(frame_id: u64, x: f64, y: f64) -> Self {
        Self {
            frame_id,
            position: FloorPoint::new(x, y),
            visible: false,
        }
    }
}

pub fn load_annotations(path: &Path) -> Result<Vec<AnnotationRecord>, DatasetError> {
    let text = read_text(path)?;
    parse_annotations(&text).map_err(|e| e.in_file(path))
}

/// Parses headerless `frame_id,X,Y[,visible]` rows; `visible` is `1`/`0`
/// (or `true`/`false`) and defaults to visible. Output is sorted by frame.
pub fn parse_annotations(text: &str) -> Result<Vec<AnnotationRecord>, DatasetError> {
    let mut records: BTreeMap<u64, AnnotationRecord> = BTreeMap::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split(',').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(DatasetError::parse(
                line,
                format!("expected `frame_id,X,Y[,visible]`, got {} fields", fields.len()),
            ));
        }
        let frame_id = parse_frame_id(fields[0], line)?;
        let x = parse_f64(fields[1], "X", line)?;
        let y = parse_f64(fields[2], "Y", line)?;
        let visible = match fields.get(3).map(|v| v.trim()) {
            None | Some("1") | Some("true") => true,
            Some("0") | Some("false") => false,
            Some(other) => return Err(DatasetError::parse(line, format!("visible: `{other}` is not 0/1"))),
        };
        let record = AnnotationRecord {
            frame_id,
            position: FloorPoint::new(x, y),
            visible,
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

/// Canonical text: visible rows omit the flag, hidden rows end in `,0`.
pub fn write_annotations(records: &[AnnotationRecord]) -> String {
    let mut out = String::new();
    for r in records {
        if r.visible {
            out.push_str(&format!("{},{},{}\n", r.frame_id, r.position.x, r.position.y));
        } else {
            out.push_str(&format!("{},{},{},0\n", r.frame_id, r.position.x, r.position.y));
        }
    }
    out
}

fn by_frame(records: &[AnnotationRecord]) -> BTreeMap<u64, &AnnotationRecord> {
    records.iter().map(|r| (r.frame_id, r)).collect()
}

/// Combines the annotations of two perspectives frame by frame.
///
/// Both visible gives their midpoint; one visible gives that one; otherwise
/// the frame is kept but marked not visible. Frames present in only one list
/// treat the other perspective as not visible.
pub fn merge_ground_truth(a: &[AnnotationRecord], b: &[AnnotationRecord]) -> Vec<AnnotationRecord> {
    let a = by_frame(a);
    let b = by_frame(b);
    let frames: BTreeSet<u64> = a.keys().chain(b.keys()).copied().collect();
    frames
        .into_iter()
        .map(|frame_id| {
            let ra = a.get(&frame_id).copied();
            let rb = b.get(&frame_id).copied();
            let va = ra.filter(|r| r.visible);
            let vb = rb.filter(|r| r.visible);
            let (position, visible) = match (va, vb) {
                (Some(x), Some(y)) => (x.position.midpoint(&y.position), true),
                (Some(x), None) | (None, Some(x)) => (x.position, true),
                (None, None) => match (ra, rb) {
                    (Some(x), Some(y)) => (x.position.midpoint(&y.position), false),
                    (Some(x), None) | (None, Some(x)) => (x.position, false),
                    (None, None) => unreachable!("frame comes from one of the inputs"),
                },
            };
            AnnotationRecord {
                frame_id,
                position,
                visible,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisMismatch {
    /// Absolute differences, one per compared frame.
    pub values: Vec<f64>,
    pub mean: f64,
    /// 95th percentile, linear interpolation between order statistics.
    pub p95: f64,
}

impl AxisMismatch {
    fn from_values(values: Vec<f64>) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let p95 = percentile(&values, 0.95);
        Self { values, mean, p95 }
    }
}

/// Per-axis disagreement between two annotation sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MismatchStats {
    pub frames: Vec<u64>,
    pub x: AxisMismatch,
    pub y: AxisMismatch,
}

/// `|ΔX|` and `|ΔY|` over frames visible in both sets.
pub fn mismatch_stats(a: &[AnnotationRecord], b: &[AnnotationRecord]) -> Result<MismatchStats, DatasetError> {
    let b = by_frame(b);
    let mut frames = Vec::new();
    let mut dx = Vec::new();
    let mut dy = Vec::new();
    let mut a_sorted: Vec<&AnnotationRecord> = a.iter().collect();
    a_sorted.sort_by_key(|r| r.frame_id);
    for ra in a_sorted.into_iter().filter(|r| r.visible) {
        if let Some(rb) = b.get(&ra.frame_id).filter(|r| r.visible) {
            frames.push(ra.frame_id);
            dx.push((ra.position.x - rb.position.x).abs());
            dy.push((ra.position.y - rb.position.y).abs());
        }
    }
    if frames.is_empty() {
        return Err(DatasetError::NoOverlap);
    }
    Ok(MismatchStats {
        frames,
        x: AxisMismatch::from_values(dx),
        y: AxisMismatch::from_values(dy),
    })
}

fn percentile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row() {
        let r = parse_annotations("0,120.0,300.0\n").unwrap();
        assert_eq!(r, vec![AnnotationRecord::visible(0, 120.0, 300.0)]);
    }

    #[test]
    fn empty_file() {
        assert!(parse_annotations("").unwrap().is_empty());
        assert!(parse_annotations("\n# nothing\n").unwrap().is_empty());
    }

    #[test]
    fn sorted_and_flags() {
        let r = parse_annotations("5,1,2,0\n2,3,4,1\n3,5,6,true\n").unwrap();
        assert_eq!(r.iter().map(|r| r.frame_id).collect::<Vec<_>>(), vec![2, 3, 5]);
        assert!(!r[2].visible);
        assert!(r[0].visible && r[1].visible);
    }

    #[test]
    fn duplicates_and_garbage_rejected() {
        assert!(matches!(
            parse_annotations("1,0,0\n1,2,2\n"),
            Err(DatasetError::DuplicateFrame { frame: 1, line: 2, .. })
        ));
        assert!(matches!(parse_annotations("1,0\n"), Err(DatasetError::Parse { .. })));
        assert!(matches!(parse_annotations("-1,0,0\n"), Err(DatasetError::Parse { .. })));
        assert!(matches!(parse_annotations("1,0,0,maybe\n"), Err(DatasetError::Parse { .. })));
        assert!(matches!(parse_annotations("1,NaN,0\n"), Err(DatasetError::Parse { .. })));
    }

    #[test]
    fn merge_rules() {
        let a = vec![
            AnnotationRecord::visible(0, 100.0, 200.0),
            AnnotationRecord::hidden(1, 0.0, 0.0),
            AnnotationRecord::hidden(2, 0.0, 0.0),
        ];
        let b = vec![
            AnnotationRecord::visible(0, 110.0, 220.0),
            AnnotationRecord::visible(1, 110.0, 220.0),
            AnnotationRecord::hidden(2, 4.0, 4.0),
        ];
        let m = merge_ground_truth(&a, &b);
        assert_eq!(m[0], AnnotationRecord::visible(0, 105.0, 210.0));
        assert_eq!(m[1], AnnotationRecord::visible(1, 110.0, 220.0));
        assert!(!m[2].visible);
        assert_eq!(merge_ground_truth(&b, &a), m);
    }

    #[test]
    fn mismatch_identical_is_zero() {
        let a: Vec<_> = (0..10).map(|i| AnnotationRecord::visible(i, i as f64, 2.0 * i as f64)).collect();
        let s = mismatch_stats(&a, &a).unwrap();
        assert_eq!((s.x.mean, s.y.mean, s.x.p95, s.y.p95), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn mismatch_constant_offset() {
        let a: Vec<_> = (0..10).map(|i| AnnotationRecord::visible(i, 30.0 * i as f64, 20.0)).collect();
        let b: Vec<_> = a
            .iter()
            .map(|r| AnnotationRecord::visible(r.frame_id, r.position.x + 10.0, r.position.y - 5.0))
            .collect();
        let s = mismatch_stats(&a, &b).unwrap();
        assert_eq!(s.x.mean, 10.0);
        assert_eq!(s.y.mean, 5.0);
        assert_eq!(s.x.p95, 10.0);
    }

    #[test]
    fn mismatch_without_overlap() {
        let a = vec![AnnotationRecord::visible(0, 1.0, 1.0)];
        let b = vec![AnnotationRecord::hidden(0, 1.0, 1.0), AnnotationRecord::visible(1, 1.0, 1.0)];
        assert!(matches!(mismatch_stats(&a, &b), Err(DatasetError::NoOverlap)));
    }

    #[test]
    fn percentile_interpolates() {
        let v: Vec<f64> = (0..=20).map(f64::from).collect();
        assert_eq!(percentile(&v, 0.95), 19.0);
        assert_eq!(percentile(&[3.0], 0.95), 3.0);
        assert!((percentile(&[0.0, 10.0], 0.95) - 9.5).abs() < 1e-12);
    }
}
