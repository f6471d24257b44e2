//! Directory conventions: one file per image, named by image id. The
//! calibration argument may be a single shared file or a directory with
//! per-image files.

use anyhow::{Context, Result};
use mono3d::geometry::CameraIntrinsics;
use mono3d::kitti::read_calibration_file;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

/// Sorted file stems with the given extension.
pub fn image_ids(dir: &Path, ext: &str) -> Result<Vec<String>> {
    let mut ids = BTreeSet::new();
    for entry in
        std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))?
    {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) == Some(ext) {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                ids.insert(stem.to_string());
            }
        }
    }
    Ok(ids.into_iter().collect())
}

pub fn calib_for(calib: &Path, id: &str) -> Result<CameraIntrinsics> {
    let path = if calib.is_dir() {
        calib.join(format!("{id}.txt"))
    } else {
        calib.to_path_buf()
    };
    read_calibration_file(&path).with_context(|| format!("calibration {}", path.display()))
}

pub fn label_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.txt"))
}

/// Collects per-object skip notes and writes them as `skipped.log`.
#[derive(Debug, Default)]
pub struct SkipLog {
    lines: Vec<String>,
}

impl SkipLog {
    pub fn push(&mut self, image_id: &str, detail: &str) {
        let line = format!("{image_id} {detail}");
        eprintln!("skipped: {line}");
        self.lines.push(line);
    }

    pub fn write(&self, out_dir: &Path) -> Result<()> {
        if self.lines.is_empty() {
            return Ok(());
        }
        let path = out_dir.join("skipped.log");
        std::fs::write(&path, self.lines.join("\n") + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }
}
