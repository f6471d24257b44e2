//! Fitting-degree scoring of sampled candidates.
//!
//! The neural scorer is abstracted behind [`FittingScorer`]; any trained
//! model can be wired in behind the same contract. Two reference
//! implementations are provided: [`OracleScorer`] returns the true 3D IoU
//! against a known ground-truth box (the upper bound a perfectly trained
//! scorer could reach) and [`AlignmentScorer`] is a weak geometric baseline
//! using 2D overlap between the projected hull and the detection box.
//!
//! [`render_wireframe`] draws the twelve projected cuboid edges onto an
//! image patch, which is how training patches for a learned scorer are
//! synthesized.

use crate::geometry::{projected_hull_bbox, BBox2D, Cuboid3D, GeometryError, ProjectedBox};
use crate::localization::Candidate;
use crate::overlap::iou_3d;
use crate::raster::{draw_segment, RasterPatch, Rgb};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScoringError {
    #[error("cannot pick from an empty candidate set")]
    EmptyCandidateSet,
    #[error("value {0} outside the expected range")]
    OutOfRange(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Scores how well a candidate fits the object; higher is better. Scores
/// are comparable within one scorer instance only.
pub trait FittingScorer {
    fn score(&self, candidate: &Candidate) -> Result<f64, ScoringError>;
}

/// The twelve cuboid edges: ground ring, roof ring, verticals.
pub const CUBOID_EDGES: [(usize, usize); 12] = [
    (0, 1),
    (1, 2),
    (2, 3),
    (3, 0),
    (4, 5),
    (5, 6),
    (6, 7),
    (7, 4),
    (0, 4),
    (1, 5),
    (2, 6),
    (3, 7),
];

/// True 3D IoU between the candidate and a ground-truth box.
pub fn oracle_score(candidate: &Candidate, gt: &Cuboid3D) -> f64 {
    iou_3d(&candidate.cuboid, gt)
}

/// 2D rectangle IoU between the candidate's projected hull and the
/// detection box.
pub fn alignment_score(candidate: &Candidate, det: &BBox2D) -> Result<f64, ScoringError> {
    let hull = projected_hull_bbox(&candidate.projection)?;
    Ok(hull.iou(det))
}

/// Stand-in for a perfectly trained fitting-degree scorer.
#[derive(Debug, Clone, Copy)]
pub struct OracleScorer {
    pub gt: Cuboid3D,
}

impl FittingScorer for OracleScorer {
    fn score(&self, candidate: &Candidate) -> Result<f64, ScoringError> {
        Ok(oracle_score(candidate, &self.gt))
    }
}

/// Weak-supervision baseline: projected-hull overlap with the 2D detection.
#[derive(Debug, Clone, Copy)]
pub struct AlignmentScorer {
    pub det: BBox2D,
}

impl FittingScorer for AlignmentScorer {
    fn score(&self, candidate: &Candidate) -> Result<f64, ScoringError> {
        alignment_score(candidate, &self.det)
    }
}

/// Linear label mapping [0, 1] → [−1, 1] used for regression balance.
pub fn map_iou_label(iou: f64) -> Result<f64, ScoringError> {
    if !(0.0..=1.0).contains(&iou) {
        return Err(ScoringError::OutOfRange(iou));
    }
    Ok(2.0 * iou - 1.0)
}

/// Exact inverse of [`map_iou_label`].
pub fn unmap_iou_label(label: f64) -> Result<f64, ScoringError> {
    if !(-1.0..=1.0).contains(&label) {
        return Err(ScoringError::OutOfRange(label));
    }
    Ok((label + 1.0) / 2.0)
}

/// Copy the patch and draw the twelve projected cuboid edges onto it.
///
/// Edges with an endpoint behind the camera are skipped; their pixel
/// coordinates are mirrored artifacts, not drawable geometry. Fully
/// offscreen edges draw nothing.
pub fn render_wireframe(
    base: &RasterPatch,
    projection: &ProjectedBox,
    color: Rgb,
    linewidth: u32,
) -> RasterPatch {
    let mut out = base.clone();
    for (i, j) in CUBOID_EDGES {
        if projection.depths[i] <= 0.0 || projection.depths[j] <= 0.0 {
            continue;
        }
        draw_segment(
            &mut out,
            projection.vertices[i],
            projection.vertices[j],
            color,
            linewidth,
        );
    }
    out
}

/// Score every candidate and return the argmax, ties broken by earliest
/// index. All candidates' score fields are populated on return.
pub fn pick_best<S: FittingScorer>(
    candidates: &mut [Candidate],
    scorer: &S,
) -> Result<Candidate, ScoringError> {
    if candidates.is_empty() {
        return Err(ScoringError::EmptyCandidateSet);
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, candidate) in candidates.iter_mut().enumerate() {
        let s = scorer.score(candidate)?;
        candidate.score = Some(s);
        if best.is_none_or(|(_, bs)| s > bs) {
            best = Some((i, s));
        }
    }
    let (idx, _) = best.expect("non-empty checked above");
    Ok(candidates[idx].clone())
}
