//! `mono3d fit`: estimate the Gaussian sampling parameters and the ray
//! coefficient from training ground truth.
//!
//! The sampling parameters are the per-axis statistics of the
//! tight-constraint localization error over the training objects; the ray
//! coefficient is the least-squares slope of θ_ray against the horizontal
//! offset of the 2D box center from the image center.

use crate::config::{resolve_or, resolve_required, write_gaussian_params, write_ray_coefficient, ConfigMap};
use crate::dataset::{calib_for, image_ids, label_path};
use crate::infer::EnumKind;
use anyhow::{bail, Context, Result};
use clap::Args;
use mono3d::anchors::{
    kmeans_angles, kmeans_dimensions, DEFAULT_ANGLE_ANCHORS, DEFAULT_DIMENSION_ANCHORS,
};
use mono3d::geometry::wrap_to_pi;
use mono3d::kitti::read_label_file;
use mono3d::localization::{
    estimate_sampling_params, solve_tight_constraint_with_fallback, TightConstraintConfig,
};
use mono3d::orientation::fit_ray_coefficient;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Training label directory (ground truth).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Calibration file or per-image directory.
    #[arg(long)]
    calib: Option<PathBuf>,
    /// Output directory for sampling_params.txt and ray_coefficient.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Object class to fit on.
    #[arg(long)]
    class: Option<String>,
    /// 2D image width in pixels (for the box-center offset).
    #[arg(long)]
    image_width: Option<f64>,
    #[arg(long = "enum", value_enum)]
    enumeration: Option<EnumKind>,
    #[arg(long)]
    exceed_tol: Option<f64>,
    /// Dimension anchor count for the clustered anchor file.
    #[arg(long)]
    dims_k: Option<usize>,
    /// Angle anchor count for the clustered anchor file.
    #[arg(long)]
    angles_k: Option<usize>,
    /// RNG seed for the anchor clustering.
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run(args: FitArgs, cfg: &ConfigMap) -> Result<()> {
    let labels_dir = resolve_required::<PathBuf>(args.labels, cfg, "labels")?;
    let calib = resolve_required::<PathBuf>(args.calib, cfg, "calib")?;
    let out_dir = resolve_required::<PathBuf>(args.out, cfg, "out")?;
    let class = resolve_or(args.class, cfg, "class", "Car".to_string())?;
    let image_width = resolve_or(args.image_width, cfg, "image_width", 1242.0)?;
    let enumeration = resolve_or(args.enumeration, cfg, "enum", EnumKind::Full)?;
    let exceed_tol = resolve_or(args.exceed_tol, cfg, "exceed_tol", 1.0)?;
    let dims_k = resolve_or(args.dims_k, cfg, "dims_k", DEFAULT_DIMENSION_ANCHORS)?;
    let angles_k = resolve_or(args.angles_k, cfg, "angles_k", DEFAULT_ANGLE_ANCHORS)?;
    let seed = resolve_or(args.seed, cfg, "seed", 0)?;

    let tight = TightConstraintConfig {
        enumeration: enumeration.into(),
        exceed_tolerance_px: exceed_tol,
    };

    let mut errors: Vec<[f64; 3]> = Vec::new();
    let mut ray_pairs: Vec<(f64, f64)> = Vec::new();
    let mut dim_samples: Vec<[f64; 3]> = Vec::new();
    let mut alpha_samples: Vec<f64> = Vec::new();
    let mut n_skipped = 0usize;

    for id in image_ids(&labels_dir, "txt")? {
        let labels = read_label_file(&label_path(&labels_dir, &id))
            .with_context(|| format!("labels for image {id}"))?;
        let cam = calib_for(&calib, &id)?;
        for obj in labels.iter().filter(|o| o.class_name == class) {
            let Ok(gt) = obj.cuboid() else {
                n_skipped += 1;
                continue;
            };
            if obj.bbox.x1 >= obj.bbox.x2 || obj.bbox.y1 >= obj.bbox.y2 || gt.location[2] <= 0.0 {
                n_skipped += 1;
                continue;
            }
            dim_samples.push(gt.dims());
            alpha_samples.push(obj.alpha);
            ray_pairs.push((
                image_width / 2.0 - obj.bbox.center_u(),
                wrap_to_pi(obj.alpha - obj.rotation_y),
            ));
            match solve_tight_constraint_with_fallback(gt.dims(), gt.yaw, &obj.bbox, &cam, &tight)
            {
                Ok(sol) => errors.push([
                    sol.location[0] - gt.location[0],
                    sol.location[1] - gt.location[1],
                    sol.location[2] - gt.location[2],
                ]),
                Err(_) => n_skipped += 1,
            }
        }
    }

    if errors.len() < 2 {
        bail!(
            "insufficient training data: {} usable objects ({n_skipped} skipped)",
            errors.len()
        );
    }
    let params = estimate_sampling_params(&errors, 1024, 0)?;
    let fit = fit_ray_coefficient(&ray_pairs)?;

    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    write_gaussian_params(&out_dir.join("sampling_params.txt"), params.mu, params.sigma)?;
    write_ray_coefficient(&out_dir.join("ray_coefficient.txt"), fit.k.value(), fit.residual)?;

    // clustered anchor files for regressor-free inference
    match kmeans_dimensions(&dim_samples, dims_k, seed, 200) {
        Ok(anchors) => std::fs::write(out_dir.join("anchors_dims.txt"), anchors.to_text())?,
        Err(e) => eprintln!("skipping dimension anchors: {e}"),
    }
    match kmeans_angles(&alpha_samples, angles_k, seed, 200) {
        Ok(anchors) => std::fs::write(out_dir.join("anchors_angles.txt"), anchors.to_text())?,
        Err(e) => eprintln!("skipping angle anchors: {e}"),
    }

    println!(
        "fit over {} objects ({} skipped): mu=[{:.4}, {:.4}, {:.4}] sigma=[{:.4}, {:.4}, {:.4}] k={:.7}",
        errors.len(),
        n_skipped,
        params.mu[0],
        params.mu[1],
        params.mu[2],
        params.sigma[0],
        params.sigma[1],
        params.sigma[2],
        fit.k.value(),
    );
    Ok(())
}
