//! Per-detection inference: ray direction → global orientation →
//! tight-constraint seed → dense sampling → scoring → best candidate.
//!
//! The caller supplies per-object dimension and local-orientation estimates
//! (from any regressor) together with the 2D detection box and camera; the
//! pipeline is scorer-agnostic.

use crate::geometry::{project_cuboid, BBox2D, CameraIntrinsics, Cuboid3D, GeometryError};
use crate::localization::{
    sample_candidates, solve_tight_constraint_with_fallback, Candidate, LocalizationError,
    SamplingParams, TightConstraintConfig, TightConstraintSolution,
};
use crate::orientation::{global_from_local, ray_from_bbox, ray_from_u_exact, RayCoefficient};
use crate::scoring::{pick_best, FittingScorer, ScoringError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Localization(#[from] LocalizationError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How the viewing-ray direction is recovered from the 2D box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RayModel {
    /// θ_ray = k·(width/2 − box center), the fitted linear model.
    Proportional { k: RayCoefficient, image_width: f64 },
    /// θ_ray = atan2(cx − box center, fx), exact pinhole relation.
    Exact,
}

impl RayModel {
    pub fn theta_ray(&self, bbox: &BBox2D, cam: &CameraIntrinsics) -> f64 {
        match self {
            RayModel::Proportional { k, image_width } => ray_from_bbox(bbox, *image_width, *k),
            RayModel::Exact => ray_from_u_exact(bbox.center_u(), cam),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineSettings {
    pub tight: TightConstraintConfig,
    pub sampling: SamplingParams,
    pub ray: RayModel,
    /// (width, height) in pixels; bounds the sampler's visibility filter.
    pub image_size: (f64, f64),
}

/// Result of localizing one detection.
#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub theta_ray: f64,
    pub theta_global: f64,
    pub seed: TightConstraintSolution,
    pub seed_cuboid: Cuboid3D,
    /// Survivor count of the dense sampling stage (seed included).
    pub n_candidates: usize,
    pub best: Candidate,
}

/// Run the full localization pipeline for one detection.
///
/// `dims` is the estimated (w, h, l), `alpha` the estimated local
/// orientation. With `n_samples` = 0 the tight-constraint seed itself is
/// the only candidate (the baseline the dense stage is measured against);
/// otherwise the seed joins the sampled candidate set, so with an ideal
/// scorer the output is never worse than the seed.
pub fn infer_detection<S: FittingScorer>(
    dims: [f64; 3],
    alpha: f64,
    det: &BBox2D,
    cam: &CameraIntrinsics,
    settings: &PipelineSettings,
    scorer: &S,
) -> Result<Inference, PipelineError> {
    let theta_ray = settings.ray.theta_ray(det, cam);
    let theta_global = global_from_local(alpha, theta_ray);
    let seed =
        solve_tight_constraint_with_fallback(dims, theta_global, det, cam, &settings.tight)?;
    let seed_cuboid = Cuboid3D::new(dims[0], dims[1], dims[2], seed.location, theta_global)?;

    let mut candidates = Vec::new();
    if let Ok(projection) = project_cuboid(&seed_cuboid, cam) {
        candidates.push(Candidate {
            cuboid: seed_cuboid,
            projection,
            score: None,
        });
    }
    if settings.sampling.n_samples > 0 {
        match sample_candidates(&seed_cuboid, &settings.sampling, cam, settings.image_size) {
            Ok(sampled) => candidates.extend(sampled),
            // a fully discarded sample set still leaves the seed candidate
            Err(LocalizationError::AllSamplesDiscarded) if !candidates.is_empty() => {}
            Err(e) => return Err(e.into()),
        }
    }
    let n_candidates = candidates.len();
    let best = pick_best(&mut candidates, scorer)?;
    Ok(Inference {
        theta_ray,
        theta_global,
        seed,
        seed_cuboid,
        n_candidates,
        best,
    })
}
