//! KITTI object label and calibration file handling.
//!
//! Labels are one object per line, 15 whitespace-separated fields plus an
//! optional score: type, truncated, occluded, alpha, 2D box (x1 y1 x2 y2),
//! dimensions (h w l), location (x y z), rotation_y[, score]. Values are
//! preserved verbatim, including the −1/−10 sentinels on DontCare lines.
//! The file stores dimensions in (h, w, l) order; the conversion to the
//! internal (w, h, l) convention happens exactly once, at [`ObjectLabel::cuboid`]
//! / [`ObjectLabel::set_cuboid`].

use crate::geometry::{BBox2D, CameraIntrinsics, Cuboid3D, GeometryError};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KittiError {
    #[error("malformed label line at field {field}: {reason}")]
    MalformedLine { field: usize, reason: String },
    #[error("calibration file has no P2 line")]
    MissingP2,
    #[error("calibration P2 line malformed: {0}")]
    MalformedCalibration(String),
    #[error("detection {index} carries no score")]
    MissingScore { index: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One KITTI annotation record.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectLabel {
    pub class_name: String,
    /// Truncation fraction in [0, 1] (−1 on DontCare).
    pub truncated: f64,
    /// Occlusion state 0–3 (−1 on DontCare).
    pub occluded: i32,
    /// Observation angle (local orientation), radians; −10 on DontCare.
    pub alpha: f64,
    pub bbox: BBox2D,
    /// Dimensions in file order: (h, w, l) meters.
    pub dims_hwl: [f64; 3],
    /// Bottom-center location in camera coordinates, meters.
    pub location: [f64; 3],
    /// Global orientation, radians.
    pub rotation_y: f64,
    pub score: Option<f64>,
}

impl ObjectLabel {
    pub fn is_dont_care(&self) -> bool {
        self.class_name == "DontCare"
    }

    /// Internal box view of the label: (h, w, l) becomes (w, h, l), the
    /// location and rotation_y are taken verbatim.
    pub fn cuboid(&self) -> Result<Cuboid3D, GeometryError> {
        Cuboid3D::new(
            self.dims_hwl[1],
            self.dims_hwl[0],
            self.dims_hwl[2],
            self.location,
            self.rotation_y,
        )
    }

    /// Write a cuboid back into the label's dimension/location/rotation
    /// fields, converting to the (h, w, l) file order.
    pub fn set_cuboid(&mut self, c: &Cuboid3D) {
        self.dims_hwl = [c.h, c.w, c.l];
        self.location = c.location;
        self.rotation_y = c.yaw;
    }
}

/// Numeric formatting for [`serialize_label`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Two-decimal fixed format, byte-compatible with devkit output.
    FileCompat,
    /// Shortest round-trip float formatting; parse ∘ serialize is identity.
    #[default]
    Full,
}

fn parse_field<T: std::str::FromStr>(fields: &[&str], index: usize) -> Result<T, KittiError>
where
    T::Err: std::fmt::Display,
{
    fields[index]
        .parse::<T>()
        .map_err(|e| KittiError::MalformedLine {
            field: index,
            reason: format!("{e} in {:?}", fields[index]),
        })
}

/// Parse one label line (15 or 16 whitespace-separated fields).
pub fn parse_label_line(line: &str) -> Result<ObjectLabel, KittiError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 15 && fields.len() != 16 {
        return Err(KittiError::MalformedLine {
            field: fields.len(),
            reason: format!("expected 15 or 16 fields, got {}", fields.len()),
        });
    }
    // occluded is an integer field but some writers emit "0.00"
    let occluded = fields[2].parse::<i32>().or_else(|_| {
        parse_field::<f64>(&fields, 2).and_then(|v| {
            if v.fract() == 0.0 {
                Ok(v as i32)
            } else {
                Err(KittiError::MalformedLine {
                    field: 2,
                    reason: format!("occlusion must be integral, got {v}"),
                })
            }
        })
    })?;
    Ok(ObjectLabel {
        class_name: fields[0].to_string(),
        truncated: parse_field(&fields, 1)?,
        occluded,
        alpha: parse_field(&fields, 3)?,
        bbox: BBox2D::new(
            parse_field(&fields, 4)?,
            parse_field(&fields, 5)?,
            parse_field(&fields, 6)?,
            parse_field(&fields, 7)?,
        ),
        dims_hwl: [
            parse_field(&fields, 8)?,
            parse_field(&fields, 9)?,
            parse_field(&fields, 10)?,
        ],
        location: [
            parse_field(&fields, 11)?,
            parse_field(&fields, 12)?,
            parse_field(&fields, 13)?,
        ],
        rotation_y: parse_field(&fields, 14)?,
        score: if fields.len() == 16 {
            Some(parse_field(&fields, 15)?)
        } else {
            None
        },
    })
}

/// Serialize a label back to its line form (15 fields, 16 with a score).
pub fn serialize_label(obj: &ObjectLabel, precision: Precision) -> String {
    let f = |v: f64| match precision {
        Precision::FileCompat => format!("{v:.2}"),
        Precision::Full => format!("{v}"),
    };
    let mut out = format!(
        "{} {} {} {} {} {} {} {} {} {} {} {} {} {} {}",
        obj.class_name,
        f(obj.truncated),
        obj.occluded,
        f(obj.alpha),
        f(obj.bbox.x1),
        f(obj.bbox.y1),
        f(obj.bbox.x2),
        f(obj.bbox.y2),
        f(obj.dims_hwl[0]),
        f(obj.dims_hwl[1]),
        f(obj.dims_hwl[2]),
        f(obj.location[0]),
        f(obj.location[1]),
        f(obj.location[2]),
        f(obj.rotation_y),
    );
    if let Some(score) = obj.score {
        out.push(' ');
        out.push_str(&f(score));
    }
    out
}

/// Extract the 3×4 "P2" projection matrix from a KITTI calibration file.
/// Other lines are ignored.
pub fn parse_calibration(text: &str) -> Result<CameraIntrinsics, KittiError> {
    for line in text.lines() {
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("P2:") | Some("P2") => {}
            _ => continue,
        }
        let values: Result<Vec<f64>, _> = tokens.map(|t| t.parse::<f64>()).collect();
        let values = values.map_err(|e| KittiError::MalformedCalibration(e.to_string()))?;
        if values.len() != 12 {
            return Err(KittiError::MalformedCalibration(format!(
                "expected 12 values, got {}",
                values.len()
            )));
        }
        let mut k = [[0.0; 4]; 3];
        for (i, v) in values.into_iter().enumerate() {
            k[i / 4][i % 4] = v;
        }
        return Ok(CameraIntrinsics::from_matrix(k)?);
    }
    Err(KittiError::MissingP2)
}

/// Evaluation strata by 2D box height, occlusion and truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Difficulty {
    Easy,
    Moderate,
    Hard,
    /// Below every threshold set; excluded from evaluation.
    Ignored,
}

impl Difficulty {
    /// Whether an object of this difficulty participates when evaluating at
    /// `level` (an Easy object also qualifies for Moderate and Hard).
    pub fn qualifies(self, level: Difficulty) -> bool {
        self != Difficulty::Ignored && self <= level
    }
}

impl std::fmt::Display for Difficulty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Difficulty::Easy => "Easy",
            Difficulty::Moderate => "Moderate",
            Difficulty::Hard => "Hard",
            Difficulty::Ignored => "Ignored",
        };
        f.write_str(s)
    }
}

/// Per-level (Easy, Moderate, Hard) gates, devkit defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifficultyThresholds {
    pub min_height: [f64; 3],
    pub max_occlusion: [i32; 3],
    pub max_truncation: [f64; 3],
}

impl Default for DifficultyThresholds {
    fn default() -> Self {
        Self {
            min_height: [40.0, 25.0, 25.0],
            max_occlusion: [0, 1, 2],
            max_truncation: [0.15, 0.30, 0.50],
        }
    }
}

/// Strictest level whose gates the object clears.
pub fn classify_difficulty_with(obj: &ObjectLabel, t: &DifficultyThresholds) -> Difficulty {
    let height = obj.bbox.height();
    for (i, level) in [Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard]
        .into_iter()
        .enumerate()
    {
        if height >= t.min_height[i]
            && obj.occluded <= t.max_occlusion[i]
            && obj.truncated <= t.max_truncation[i]
        {
            return level;
        }
    }
    Difficulty::Ignored
}

pub fn classify_difficulty(obj: &ObjectLabel) -> Difficulty {
    classify_difficulty_with(obj, &DifficultyThresholds::default())
}

/// Keep detections with score ≥ threshold, preserving order.
pub fn score_filter(dets: &[ObjectLabel], threshold: f64) -> Result<Vec<ObjectLabel>, KittiError> {
    for (index, d) in dets.iter().enumerate() {
        if d.score.is_none() {
            return Err(KittiError::MissingScore { index });
        }
    }
    Ok(dets
        .iter()
        .filter(|d| d.score.unwrap() >= threshold)
        .cloned()
        .collect())
}

/// Parse every non-empty line of a label file.
pub fn read_label_file(path: &Path) -> Result<Vec<ObjectLabel>, KittiError> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_label_line)
        .collect()
}

pub fn write_label_file(
    path: &Path,
    labels: &[ObjectLabel],
    precision: Precision,
) -> Result<(), KittiError> {
    let mut out = String::new();
    for l in labels {
        out.push_str(&serialize_label(l, precision));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_calibration_file(path: &Path) -> Result<CameraIntrinsics, KittiError> {
    let text = std::fs::read_to_string(path)?;
    parse_calibration(&text)
}
