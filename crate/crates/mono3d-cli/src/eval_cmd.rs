//! `mono3d eval`: score result files against ground truth and emit the CSV
//! metric report: AP and AOS per difficulty × overlap setting, plus the
//! average dimension error.

use crate::config::{resolve, resolve_or, resolve_required, ConfigMap};
use crate::dataset::{image_ids, label_path};
use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use mono3d::eval::{
    dimension_error, evaluate, render_report_csv, Interpolation, MatchConfig, OverlapKind,
    ReportRow,
};
use mono3d::kitti::{read_label_file, Difficulty, ObjectLabel};
use std::collections::BTreeSet;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpKind {
    #[value(name = "11")]
    Eleven,
    #[value(name = "40")]
    Forty,
}

impl From<InterpKind> for Interpolation {
    fn from(value: InterpKind) -> Self {
        match value {
            InterpKind::Eleven => Interpolation::ElevenPoint,
            InterpKind::Forty => Interpolation::FortyPoint,
        }
    }
}

impl std::str::FromStr for InterpKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory of result files (KITTI label format with scores).
    #[arg(long)]
    dets: Option<PathBuf>,
    /// Ground-truth label directory.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    class: Option<String>,
    /// Evaluate only this IoU threshold instead of the standard 0.5/0.7 set.
    #[arg(long)]
    iou_thresh: Option<f64>,
    #[arg(long, value_enum)]
    interp: Option<InterpKind>,
    /// Drop detections below this score before evaluating.
    #[arg(long)]
    score_thresh: Option<f64>,
}

pub fn run(args: EvalArgs, cfg: &ConfigMap) -> Result<()> {
    let dets_dir = resolve_required::<PathBuf>(args.dets, cfg, "dets")?;
    let labels_dir = resolve_required::<PathBuf>(args.labels, cfg, "labels")?;
    let out = resolve::<PathBuf>(args.out, cfg, "out")?;
    let class = resolve_or(args.class, cfg, "class", "Car".to_string())?;
    let iou_override = resolve(args.iou_thresh, cfg, "iou_thresh")?;
    let interp: Interpolation = resolve_or(args.interp, cfg, "interp", InterpKind::Eleven)?.into();
    let score_thresh = resolve_or(args.score_thresh, cfg, "score_thresh", 0.0)?;

    let ids: BTreeSet<String> = image_ids(&dets_dir, "txt")?
        .into_iter()
        .chain(image_ids(&labels_dir, "txt")?)
        .collect();

    let mut dets_per_image: Vec<Vec<ObjectLabel>> = Vec::new();
    let mut gts_per_image: Vec<Vec<ObjectLabel>> = Vec::new();
    for id in &ids {
        let dets = match read_label_file(&label_path(&dets_dir, id)) {
            Ok(d) => d
                .into_iter()
                .filter(|o| o.class_name == class && o.score.is_some_and(|s| s >= score_thresh))
                .collect(),
            Err(_) => Vec::new(),
        };
        let gts = match read_label_file(&label_path(&labels_dir, id)) {
            Ok(g) => g
                .into_iter()
                .filter(|o| o.class_name == class || o.is_dont_care())
                .collect(),
            Err(_) => Vec::new(),
        };
        dets_per_image.push(dets);
        gts_per_image.push(gts);
    }

    let settings: Vec<(OverlapKind, f64)> = match iou_override {
        Some(t) => vec![
            (OverlapKind::TwoD, t),
            (OverlapKind::Bev, t),
            (OverlapKind::ThreeD, t),
        ],
        None => vec![
            (OverlapKind::TwoD, 0.7),
            (OverlapKind::Bev, 0.5),
            (OverlapKind::Bev, 0.7),
            (OverlapKind::ThreeD, 0.5),
            (OverlapKind::ThreeD, 0.7),
        ],
    };

    let mut rows = Vec::new();
    for difficulty in [Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard] {
        for &(kind, threshold) in &settings {
            let cfg = MatchConfig {
                overlap_kind: kind,
                iou_threshold: threshold,
                difficulty,
            };
            let outcome = evaluate(&dets_per_image, &gts_per_image, &cfg, interp);
            rows.push(ReportRow {
                difficulty,
                overlap_kind: kind,
                iou_threshold: threshold,
                ap: outcome.ap,
                aos: outcome.aos,
            });
        }
    }

    // dimension error pools per-image means weighted by detection count
    let mut err_sum = 0.0;
    let mut err_n = 0usize;
    for (dets, gts) in dets_per_image.iter().zip(&gts_per_image) {
        let gts_real: Vec<ObjectLabel> =
            gts.iter().filter(|g| !g.is_dont_care()).cloned().collect();
        if dets.is_empty() || gts_real.is_empty() {
            continue;
        }
        if let Ok(e) = dimension_error(dets, &gts_real) {
            err_sum += e * dets.len() as f64;
            err_n += dets.len();
        }
    }
    let e_a = (err_n > 0).then(|| err_sum / err_n as f64);

    let csv = render_report_csv(&rows, e_a);
    match out {
        Some(path) => std::fs::write(&path, csv)
            .with_context(|| format!("writing report {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(())
}
