//! `mono3d render`: draw result cuboids as wireframe overlays onto PPM
//! images. Images without a result file are copied unmodified; results
//! without an image are logged and skipped.

use crate::config::{resolve_or, resolve_required, ConfigMap};
use crate::dataset::{calib_for, image_ids, label_path, SkipLog};
use anyhow::{Context, Result};
use clap::Args;
use mono3d::geometry::project_cuboid;
use mono3d::kitti::read_label_file;
use mono3d::raster::{RasterPatch, GREEN};
use mono3d::scoring::render_wireframe;
use std::collections::BTreeSet;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Directory of result files to draw.
    #[arg(long)]
    dets: Option<PathBuf>,
    /// Directory of input images (binary PPM).
    #[arg(long)]
    images: Option<PathBuf>,
    /// Calibration file or per-image directory.
    #[arg(long)]
    calib: Option<PathBuf>,
    /// Output directory for overlay images.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Wireframe linewidth in pixels.
    #[arg(long)]
    linewidth: Option<u32>,
}

pub fn run(args: RenderArgs, cfg: &ConfigMap) -> Result<()> {
    let dets_dir = resolve_required::<PathBuf>(args.dets, cfg, "dets")?;
    let images_dir = resolve_required::<PathBuf>(args.images, cfg, "images")?;
    let calib = resolve_required::<PathBuf>(args.calib, cfg, "calib")?;
    let out_dir = resolve_required::<PathBuf>(args.out, cfg, "out")?;
    let linewidth = resolve_or(args.linewidth, cfg, "linewidth", 1)?;

    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut skips = SkipLog::default();

    let image_set: BTreeSet<String> = image_ids(&images_dir, "ppm")?.into_iter().collect();
    let det_set: BTreeSet<String> = image_ids(&dets_dir, "txt")?.into_iter().collect();

    for id in det_set.difference(&image_set) {
        skips.push(id, "no image for result file");
    }

    for id in &image_set {
        let image_path = images_dir.join(format!("{id}.ppm"));
        let mut patch = RasterPatch::from_ppm_file(&image_path)
            .with_context(|| format!("reading {}", image_path.display()))?;
        if det_set.contains(id) {
            let results = read_label_file(&label_path(&dets_dir, id))
                .with_context(|| format!("results for image {id}"))?;
            let cam = calib_for(&calib, id)?;
            for (i, obj) in results.iter().enumerate() {
                let Ok(cuboid) = obj.cuboid() else {
                    skips.push(id, &format!("record={i} no valid cuboid"));
                    continue;
                };
                match project_cuboid(&cuboid, &cam) {
                    Ok(projection) => {
                        patch = render_wireframe(&patch, &projection, GREEN, linewidth);
                    }
                    Err(e) => skips.push(id, &format!("record={i} {e}")),
                }
            }
        }
        patch
            .write_ppm_file(&out_dir.join(format!("{id}.ppm")))
            .with_context(|| format!("writing overlay for image {id}"))?;
    }
    skips.write(&out_dir)?;
    Ok(())
}
