//! `mono3d infer`: 2D detections → 3D result files.
//!
//! For each detection the pipeline needs a dimension triple and a local
//! orientation. These come from an estimates directory (one file per image,
//! one `w h l alpha` line per detection line) or, failing that, from anchor
//! files (highest-confidence decode with zero offsets, i.e. the first
//! anchor). The scorer is `oracle` (requires ground-truth labels) or
//! `alignment` (2D-only baseline).

use crate::config::{read_gaussian_params, read_ray_coefficient, resolve, resolve_or, resolve_required, ConfigMap};
use crate::dataset::{calib_for, image_ids, label_path, SkipLog};
use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use mono3d::kitti::{
    read_label_file, score_filter, write_label_file, ObjectLabel, Precision,
};
use mono3d::localization::{EnumerationMode, SamplingParams, TightConstraintConfig};
use mono3d::orientation::{local_from_global, ray_from_location, RayCoefficient};
use mono3d::pipeline::{infer_detection, PipelineSettings, RayModel};
use mono3d::scoring::{AlignmentScorer, FittingScorer, OracleScorer};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScorerKind {
    Oracle,
    Alignment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnumKind {
    Full,
    Pruned,
}

impl From<EnumKind> for EnumerationMode {
    fn from(value: EnumKind) -> Self {
        match value {
            EnumKind::Full => EnumerationMode::Full,
            EnumKind::Pruned => EnumerationMode::Pruned,
        }
    }
}

impl std::str::FromStr for ScorerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

impl std::str::FromStr for EnumKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// Directory of 2D detection files (KITTI label format with scores).
    #[arg(long)]
    dets: Option<PathBuf>,
    /// Calibration file or per-image directory.
    #[arg(long)]
    calib: Option<PathBuf>,
    /// Ground-truth label directory (required by the oracle scorer).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Per-image dimension/orientation estimate files (`w h l alpha` lines).
    #[arg(long)]
    estimates: Option<PathBuf>,
    /// Dimension anchor file (fallback when no estimates are given).
    #[arg(long)]
    anchors_dims: Option<PathBuf>,
    /// Angle anchor file (fallback when no estimates are given).
    #[arg(long)]
    anchors_angles: Option<PathBuf>,
    /// Output directory for result files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    scorer: Option<ScorerKind>,
    /// Candidates drawn around the seed (0 = tight constraint only).
    #[arg(long)]
    samples: Option<usize>,
    /// RNG seed; mandatory so runs are reproducible.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "enum", value_enum)]
    enumeration: Option<EnumKind>,
    /// Detections below this score are dropped before inference.
    #[arg(long)]
    score_thresh: Option<f64>,
    /// Gaussian parameter file from `mono3d fit`.
    #[arg(long)]
    sampling_params: Option<PathBuf>,
    /// Per-axis sampling mean, `x,y,z` meters (overrides the file).
    #[arg(long)]
    mu: Option<String>,
    /// Per-axis sampling standard deviation, `x,y,z` meters.
    #[arg(long)]
    sigma: Option<String>,
    /// Ray coefficient: a number or a file from `mono3d fit`. When absent
    /// the exact pinhole ray is used.
    #[arg(long)]
    ray_k: Option<String>,
    #[arg(long)]
    image_width: Option<f64>,
    #[arg(long)]
    image_height: Option<f64>,
    /// Tight-constraint exceed tolerance, pixels.
    #[arg(long)]
    exceed_tol: Option<f64>,
}

fn parse_triple(raw: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 3 {
        bail!("expected x,y,z, got {raw:?}");
    }
    let mut out = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p.trim().parse::<f64>().with_context(|| format!("component {i} of {raw:?}"))?;
    }
    Ok(out)
}

fn read_estimates(path: &PathBuf) -> Result<Vec<[f64; 4]>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading estimates {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(|f| f.parse::<f64>())
                .collect::<Result<_, _>>()
                .with_context(|| format!("estimates line {}", i + 1))?;
            if fields.len() != 4 {
                bail!("estimates line {} needs `w h l alpha`", i + 1);
            }
            Ok([fields[0], fields[1], fields[2], fields[3]])
        })
        .collect()
}

enum AnyScorer {
    Oracle(OracleScorer),
    Alignment(AlignmentScorer),
}

impl FittingScorer for AnyScorer {
    fn score(
        &self,
        candidate: &mono3d::localization::Candidate,
    ) -> Result<f64, mono3d::scoring::ScoringError> {
        match self {
            AnyScorer::Oracle(s) => s.score(candidate),
            AnyScorer::Alignment(s) => s.score(candidate),
        }
    }
}

pub fn run(args: InferArgs, cfg: &ConfigMap) -> Result<()> {
    let dets_dir = resolve_required(args.dets, cfg, "dets")?;
    let calib = resolve_required::<PathBuf>(args.calib, cfg, "calib")?;
    let out_dir = resolve_required::<PathBuf>(args.out, cfg, "out")?;
    let labels_dir = resolve::<PathBuf>(args.labels, cfg, "labels")?;
    let estimates_dir = resolve::<PathBuf>(args.estimates, cfg, "estimates")?;
    let anchors_dims = resolve::<PathBuf>(args.anchors_dims, cfg, "anchors_dims")?;
    let anchors_angles = resolve::<PathBuf>(args.anchors_angles, cfg, "anchors_angles")?;
    let scorer_kind = resolve_or(args.scorer, cfg, "scorer", ScorerKind::Alignment)?;
    let samples = resolve_or(args.samples, cfg, "samples", 1024)?;
    let seed = resolve_required::<u64>(args.seed, cfg, "seed")?;
    let enumeration = resolve_or(args.enumeration, cfg, "enum", EnumKind::Full)?;
    let score_thresh = resolve_or(args.score_thresh, cfg, "score_thresh", 0.1)?;
    let image_width = resolve_or(args.image_width, cfg, "image_width", 1242.0)?;
    let image_height = resolve_or(args.image_height, cfg, "image_height", 375.0)?;
    let exceed_tol = resolve_or(args.exceed_tol, cfg, "exceed_tol", 1.0)?;
    let sampling_params_path = resolve::<PathBuf>(args.sampling_params, cfg, "sampling_params")?;
    let mu_flag = resolve::<String>(args.mu, cfg, "mu")?;
    let sigma_flag = resolve::<String>(args.sigma, cfg, "sigma")?;
    let ray_k = resolve::<String>(args.ray_k, cfg, "ray_k")?;

    if scorer_kind == ScorerKind::Oracle && labels_dir.is_none() {
        bail!("the oracle scorer needs --labels");
    }

    // default anchors: one fixed estimate per object when nothing better is given
    let default_estimate: Option<[f64; 4]> = match (&anchors_dims, &anchors_angles) {
        (Some(dims_path), Some(angles_path)) => {
            let dims = mono3d::anchors::DimensionAnchorSet::from_text(
                &std::fs::read_to_string(dims_path)
                    .with_context(|| format!("reading {}", dims_path.display()))?,
            )?;
            let angles = mono3d::anchors::AngleAnchorSet::from_text(
                &std::fs::read_to_string(angles_path)
                    .with_context(|| format!("reading {}", angles_path.display()))?,
            )?;
            Some([
                dims.anchors[0][0],
                dims.anchors[0][1],
                dims.anchors[0][2],
                angles.anchors[0],
            ])
        }
        _ => None,
    };
    if estimates_dir.is_none() && default_estimate.is_none() {
        bail!("need --estimates, or both --anchors-dims and --anchors-angles");
    }

    let (mu, sigma) = match (&mu_flag, &sigma_flag, &sampling_params_path) {
        (Some(m), Some(s), _) => (parse_triple(m)?, parse_triple(s)?),
        (_, _, Some(path)) => read_gaussian_params(path)?,
        _ if samples == 0 => ([0.0; 3], [1.0; 3]),
        _ => bail!("need --sampling-params, or --mu and --sigma (or --samples 0)"),
    };
    if sigma.iter().any(|&s| s <= 0.0) {
        bail!("sigma components must be positive");
    }

    let ray = match ray_k {
        Some(raw) => {
            let k = raw
                .parse::<f64>()
                .or_else(|_| read_ray_coefficient(&PathBuf::from(&raw)))?;
            RayModel::Proportional {
                k: RayCoefficient::new(k)?,
                image_width,
            }
        }
        None => RayModel::Exact,
    };

    let tight = TightConstraintConfig {
        enumeration: enumeration.into(),
        exceed_tolerance_px: exceed_tol,
    };

    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let mut skips = SkipLog::default();

    for id in image_ids(&dets_dir, "txt")? {
        let dets = read_label_file(&label_path(&dets_dir, &id))
            .with_context(|| format!("detections for image {id}"))?;
        // validates that every detection carries a score
        score_filter(&dets, score_thresh)
            .with_context(|| format!("detections for image {id}"))?;
        let cam = calib_for(&calib, &id)?;
        let gts: Vec<ObjectLabel> = match &labels_dir {
            Some(dir) => read_label_file(&label_path(dir, &id))
                .with_context(|| format!("labels for image {id}"))?,
            None => Vec::new(),
        };
        // estimate lines align with the raw detection file lines, so the
        // estimates are indexed before score filtering
        let estimates: Option<Vec<[f64; 4]>> = match &estimates_dir {
            Some(dir) => Some(read_estimates(&label_path(dir, &id))?),
            None => None,
        };
        if let Some(est) = &estimates {
            if est.len() < dets.len() {
                bail!(
                    "image {id}: {} estimate lines for {} detections",
                    est.len(),
                    dets.len()
                );
            }
        }

        let mut results = Vec::new();
        for (i, det) in dets.iter().enumerate() {
            if det.score.unwrap_or(f64::NEG_INFINITY) < score_thresh {
                continue;
            }
            let [w, h, l, alpha] = match &estimates {
                Some(est) => est[i],
                None => default_estimate.unwrap(),
            };
            if !(w > 0.0 && h > 0.0 && l > 0.0) {
                skips.push(&id, &format!("det={i} non-positive estimated dimensions"));
                continue;
            }
            if det.bbox.x1 >= det.bbox.x2 || det.bbox.y1 >= det.bbox.y2 {
                skips.push(&id, &format!("det={i} degenerate 2D box"));
                continue;
            }
            let scorer = match scorer_kind {
                ScorerKind::Alignment => AnyScorer::Alignment(AlignmentScorer { det: det.bbox }),
                ScorerKind::Oracle => {
                    let matched = gts
                        .iter()
                        .filter(|g| !g.is_dont_care() && g.class_name == det.class_name)
                        .filter_map(|g| {
                            g.cuboid().ok().map(|c| (c, g.bbox.iou(&det.bbox)))
                        })
                        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
                    match matched {
                        Some((gt, overlap)) if overlap > 0.2 => {
                            AnyScorer::Oracle(OracleScorer { gt })
                        }
                        _ => {
                            skips.push(&id, &format!("det={i} no ground truth overlaps"));
                            continue;
                        }
                    }
                }
            };
            let settings = PipelineSettings {
                tight,
                sampling: SamplingParams {
                    mu,
                    sigma,
                    n_samples: samples,
                    // decorrelate per object but stay deterministic
                    seed: seed
                        .wrapping_mul(1_000_003)
                        .wrapping_add(i as u64)
                        .wrapping_add(id_hash(&id)),
                },
                ray,
                image_size: (image_width, image_height),
            };
            let out = match infer_detection(
                [w, h, l],
                alpha,
                &det.bbox,
                &cam,
                &settings,
                &scorer,
            ) {
                Ok(out) => out,
                Err(e) => {
                    skips.push(&id, &format!("det={i} {e}"));
                    continue;
                }
            };
            let mut record = det.clone();
            record.alpha =
                local_from_global(out.best.cuboid.yaw, ray_from_location(&out.best.cuboid.location));
            record.set_cuboid(&out.best.cuboid);
            record.score = out.best.score;
            results.push(record);
        }
        write_label_file(&label_path(&out_dir, &id), &results, Precision::Full)
            .with_context(|| format!("writing results for image {id}"))?;
    }
    skips.write(&out_dir)?;
    Ok(())
}

fn id_hash(id: &str) -> u64 {
    id.bytes()
        .fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}
