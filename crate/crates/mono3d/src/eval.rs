//! KITTI-style metric suite: average dimension error, interpolated average
//! precision over 2D/BEV/3D overlap, and Average Orientation Similarity.
//!
//! Detections are greedily matched to ground truth in descending score
//! order. Ground-truth objects below the evaluated difficulty (and DontCare
//! regions) are ignored: detections landing on them count neither as true
//! nor as false positives.

use crate::geometry::wrap_to_pi;
use crate::kitti::{classify_difficulty, Difficulty, ObjectLabel};
use crate::overlap::{bev_iou, iou_3d};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("metric needs non-empty detection and ground-truth sets")]
    EmptyInput,
}

/// Which overlap the matcher uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapKind {
    TwoD,
    Bev,
    ThreeD,
}

impl std::fmt::Display for OverlapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OverlapKind::TwoD => "2D",
            OverlapKind::Bev => "BEV",
            OverlapKind::ThreeD => "3D",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchConfig {
    pub overlap_kind: OverlapKind,
    pub iou_threshold: f64,
    pub difficulty: Difficulty,
}

/// Precision/recall sample, with the orientation-similarity companion used
/// by AOS (false positives contribute zero similarity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PRPoint {
    pub recall: f64,
    pub precision: f64,
    pub orientation_similarity: f64,
}

/// Recall sampling grid for interpolated AP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Eleven points 0.0, 0.1, …, 1.0.
    #[default]
    ElevenPoint,
    /// Forty points 1/40, …, 1.0 (the recall-0 sample dropped).
    FortyPoint,
}

/// What the matcher decided for one detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetOutcome {
    TruePositive {
        gt_index: usize,
        overlap: f64,
        /// wrap(det.alpha − gt.alpha)
        alpha_error: f64,
    },
    FalsePositive,
    /// Overlapped only an ignored ground truth; excluded from the curve.
    Ignored,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetMatch {
    pub score: f64,
    pub outcome: DetOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    /// One entry per detection, in descending score order.
    pub matches: Vec<DetMatch>,
    /// Ground truths that qualify for the evaluated difficulty.
    pub n_evaluable_gt: usize,
}

fn overlap(kind: OverlapKind, det: &ObjectLabel, gt: &ObjectLabel) -> f64 {
    match kind {
        OverlapKind::TwoD => det.bbox.iou(&gt.bbox),
        OverlapKind::Bev => match (det.cuboid(), gt.cuboid()) {
            (Ok(a), Ok(b)) => bev_iou(&a, &b),
            _ => 0.0,
        },
        OverlapKind::ThreeD => match (det.cuboid(), gt.cuboid()) {
            (Ok(a), Ok(b)) => iou_3d(&a, &b),
            _ => 0.0,
        },
    }
}

/// Greedy score-ordered assignment of detections to ground truth.
///
/// Each detection takes the highest-overlap unmatched evaluable ground
/// truth if the overlap clears the threshold. Detections whose best
/// remaining overlap is with an ignored ground truth (DontCare region via
/// 2D overlap, or a qualifying-class object below the difficulty) are
/// marked [`DetOutcome::Ignored`].
pub fn match_detections(
    dets: &[ObjectLabel],
    gts: &[ObjectLabel],
    cfg: &MatchConfig,
) -> MatchResult {
    let evaluable: Vec<usize> = gts
        .iter()
        .enumerate()
        .filter(|(_, g)| {
            !g.is_dont_care() && classify_difficulty(g).qualifies(cfg.difficulty)
        })
        .map(|(i, _)| i)
        .collect();
    let ignored: Vec<usize> = (0..gts.len()).filter(|i| !evaluable.contains(i)).collect();

    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| {
        let sa = dets[a].score.expect("detections must carry scores");
        let sb = dets[b].score.expect("detections must carry scores");
        sb.partial_cmp(&sa).unwrap().then(a.cmp(&b))
    });

    let mut gt_taken = vec![false; gts.len()];
    let mut matches = Vec::with_capacity(dets.len());
    for di in order {
        let det = &dets[di];
        let mut best: Option<(usize, f64)> = None;
        for &gi in &evaluable {
            if gt_taken[gi] {
                continue;
            }
            let ov = overlap(cfg.overlap_kind, det, &gts[gi]);
            if best.is_none_or(|(_, b)| ov > b) {
                best = Some((gi, ov));
            }
        }
        let outcome = match best {
            Some((gi, ov)) if ov >= cfg.iou_threshold => {
                gt_taken[gi] = true;
                DetOutcome::TruePositive {
                    gt_index: gi,
                    overlap: ov,
                    alpha_error: wrap_to_pi(det.alpha - gts[gi].alpha),
                }
            }
            _ => {
                let on_ignored = ignored.iter().any(|&gi| {
                    let g = &gts[gi];
                    // DontCare regions are image areas, matched in 2D
                    let ov = if g.is_dont_care() {
                        det.bbox.iou(&g.bbox)
                    } else {
                        overlap(cfg.overlap_kind, det, g)
                    };
                    ov >= cfg.iou_threshold
                });
                if on_ignored {
                    DetOutcome::Ignored
                } else {
                    DetOutcome::FalsePositive
                }
            }
        };
        matches.push(DetMatch {
            score: dets[di].score.unwrap(),
            outcome,
        });
    }
    MatchResult {
        matches,
        n_evaluable_gt: evaluable.len(),
    }
}

/// Pool per-image match results into one precision/recall curve.
pub fn pr_curve(results: &[MatchResult]) -> Vec<PRPoint> {
    let n_gt: usize = results.iter().map(|r| r.n_evaluable_gt).sum();
    if n_gt == 0 {
        return Vec::new();
    }
    let mut pooled: Vec<&DetMatch> = results
        .iter()
        .flat_map(|r| r.matches.iter())
        .filter(|m| m.outcome != DetOutcome::Ignored)
        .collect();
    pooled.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());

    let mut curve = Vec::with_capacity(pooled.len());
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut similarity_sum = 0.0f64;
    for m in pooled {
        match m.outcome {
            DetOutcome::TruePositive { alpha_error, .. } => {
                tp += 1;
                similarity_sum += (1.0 + alpha_error.cos()) / 2.0;
            }
            DetOutcome::FalsePositive => fp += 1,
            DetOutcome::Ignored => unreachable!("filtered above"),
        }
        curve.push(PRPoint {
            recall: tp as f64 / n_gt as f64,
            precision: tp as f64 / (tp + fp) as f64,
            orientation_similarity: similarity_sum / (tp + fp) as f64,
        });
    }
    curve
}

fn interpolated_mean(pr: &[PRPoint], interp: Interpolation, value: impl Fn(&PRPoint) -> f64) -> f64 {
    let grid: Vec<f64> = match interp {
        Interpolation::ElevenPoint => (0..=10).map(|i| i as f64 / 10.0).collect(),
        Interpolation::FortyPoint => (1..=40).map(|i| i as f64 / 40.0).collect(),
    };
    let n = grid.len() as f64;
    grid.into_iter()
        .map(|r| {
            pr.iter()
                .filter(|p| p.recall >= r - 1e-12)
                .map(&value)
                .fold(0.0f64, f64::max)
        })
        .sum::<f64>()
        / n
}

/// Interpolated average precision over the recall grid.
pub fn average_precision(pr: &[PRPoint], interp: Interpolation) -> f64 {
    interpolated_mean(pr, interp, |p| p.precision)
}

/// AP with precision replaced by normalized orientation similarity
/// (1 + cos Δα)/2 over true positives; never exceeds the matching AP.
pub fn average_orientation_similarity(
    dets_per_image: &[Vec<ObjectLabel>],
    gts_per_image: &[Vec<ObjectLabel>],
    cfg: &MatchConfig,
    interp: Interpolation,
) -> f64 {
    let results = match_all(dets_per_image, gts_per_image, cfg);
    interpolated_mean(&pr_curve(&results), interp, |p| p.orientation_similarity)
}

fn match_all(
    dets_per_image: &[Vec<ObjectLabel>],
    gts_per_image: &[Vec<ObjectLabel>],
    cfg: &MatchConfig,
) -> Vec<MatchResult> {
    assert_eq!(
        dets_per_image.len(),
        gts_per_image.len(),
        "detection and ground-truth image lists must pair up"
    );
    dets_per_image
        .iter()
        .zip(gts_per_image)
        .map(|(d, g)| match_detections(d, g, cfg))
        .collect()
}

/// AP and AOS at one (overlap kind, threshold, difficulty) setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOutcome {
    pub ap: f64,
    pub aos: f64,
    pub n_evaluable_gt: usize,
}

pub fn evaluate(
    dets_per_image: &[Vec<ObjectLabel>],
    gts_per_image: &[Vec<ObjectLabel>],
    cfg: &MatchConfig,
    interp: Interpolation,
) -> EvalOutcome {
    let results = match_all(dets_per_image, gts_per_image, cfg);
    let curve = pr_curve(&results);
    EvalOutcome {
        ap: average_precision(&curve, interp),
        aos: interpolated_mean(&curve, interp, |p| p.orientation_similarity),
        n_evaluable_gt: results.iter().map(|r| r.n_evaluable_gt).sum(),
    }
}

/// AP over bird's-eye-view footprint overlap.
pub fn evaluate_bev(
    dets_per_image: &[Vec<ObjectLabel>],
    gts_per_image: &[Vec<ObjectLabel>],
    cfg: &MatchConfig,
    interp: Interpolation,
) -> f64 {
    let cfg = MatchConfig {
        overlap_kind: OverlapKind::Bev,
        ..*cfg
    };
    evaluate(dets_per_image, gts_per_image, &cfg, interp).ap
}

/// AP over full 3D volume overlap.
pub fn evaluate_3d(
    dets_per_image: &[Vec<ObjectLabel>],
    gts_per_image: &[Vec<ObjectLabel>],
    cfg: &MatchConfig,
    interp: Interpolation,
) -> f64 {
    let cfg = MatchConfig {
        overlap_kind: OverlapKind::ThreeD,
        ..*cfg
    };
    evaluate(dets_per_image, gts_per_image, &cfg, interp).ap
}

/// Mean dimension-vector error over detections, each matched to its nearest
/// ground truth by 3D center distance.
pub fn dimension_error(dets: &[ObjectLabel], gts: &[ObjectLabel]) -> Result<f64, EvalError> {
    if dets.is_empty() || gts.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut total = 0.0;
    for det in dets {
        let nearest = gts
            .iter()
            .min_by(|a, b| {
                let da: f64 = (0..3).map(|k| (a.location[k] - det.location[k]).powi(2)).sum();
                let db: f64 = (0..3).map(|k| (b.location[k] - det.location[k]).powi(2)).sum();
                da.partial_cmp(&db).unwrap()
            })
            .expect("gts non-empty");
        total += (0..3)
            .map(|k| (det.dims_hwl[k] - nearest.dims_hwl[k]).powi(2))
            .sum::<f64>()
            .sqrt();
    }
    Ok(total / dets.len() as f64)
}

/// One row of the metric report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub difficulty: Difficulty,
    pub overlap_kind: OverlapKind,
    pub iou_threshold: f64,
    pub ap: f64,
    pub aos: f64,
}

/// Render rows plus the global dimension error as CSV.
pub fn render_report_csv(rows: &[ReportRow], dimension_error: Option<f64>) -> String {
    let mut out = String::from("difficulty,overlap,iou_threshold,ap,aos,dimension_error\n");
    let e_a = dimension_error
        .map(|e| format!("{e:.6}"))
        .unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.2},{:.6},{:.6},{}\n",
            r.difficulty, r.overlap_kind, r.iou_threshold, r.ap, r.aos, e_a
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BBox2D;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn gt_car(x: f64, z: f64, rot: f64) -> ObjectLabel {
        ObjectLabel {
            class_name: "Car".into(),
            truncated: 0.0,
            occluded: 0,
            alpha: wrap_to_pi(rot - x.atan2(z)),
            bbox: BBox2D::new(300.0, 120.0, 420.0, 240.0),
            dims_hwl: [1.5, 1.6, 3.8],
            location: [x, 1.5, z],
            rotation_y: rot,
            score: None,
        }
    }

    fn scored(mut l: ObjectLabel, s: f64) -> ObjectLabel {
        l.score = Some(s);
        l
    }

    fn cfg(kind: OverlapKind, thresh: f64) -> MatchConfig {
        MatchConfig {
            overlap_kind: kind,
            iou_threshold: thresh,
            difficulty: Difficulty::Hard,
        }
    }

    #[test]
    fn exact_detection_is_tp() {
        let gt = vec![gt_car(2.0, 20.0, 0.3)];
        let dets = vec![scored(gt[0].clone(), 0.9)];
        let r = match_detections(&dets, &gt, &cfg(OverlapKind::ThreeD, 0.7));
        assert_eq!(r.n_evaluable_gt, 1);
        assert!(matches!(
            r.matches[0].outcome,
            DetOutcome::TruePositive { gt_index: 0, .. }
        ));
    }

    #[test]
    fn second_detection_on_same_gt_is_fp() {
        let gt = vec![gt_car(2.0, 20.0, 0.3)];
        let dets = vec![scored(gt[0].clone(), 0.9), scored(gt[0].clone(), 0.5)];
        let r = match_detections(&dets, &gt, &cfg(OverlapKind::ThreeD, 0.7));
        assert!(matches!(r.matches[0].outcome, DetOutcome::TruePositive { .. }));
        assert_eq!(r.matches[1].outcome, DetOutcome::FalsePositive);
    }

    #[test]
    fn detection_on_ignored_gt_is_neither() {
        // gt too small for any difficulty
        let mut tiny = gt_car(2.0, 20.0, 0.3);
        tiny.bbox = BBox2D::new(300.0, 120.0, 320.0, 135.0);
        let mut det = tiny.clone();
        det.score = Some(0.8);
        let r = match_detections(&[det], &[tiny], &cfg(OverlapKind::ThreeD, 0.5));
        assert_eq!(r.n_evaluable_gt, 0);
        assert_eq!(r.matches[0].outcome, DetOutcome::Ignored);
        // and an ignored det leaves the curve empty
        assert!(pr_curve(&[r]).is_empty());
    }

    #[test]
    fn dont_care_region_absorbs_by_2d_overlap() {
        let mut dc = gt_car(0.0, 0.0, 0.0);
        dc.class_name = "DontCare".into();
        dc.dims_hwl = [-1.0, -1.0, -1.0];
        dc.location = [-1000.0, -1000.0, -1000.0];
        let mut det = gt_car(2.0, 20.0, 0.3);
        det.score = Some(0.9);
        // same bbox as the DontCare region
        let r = match_detections(&[det], &[dc], &cfg(OverlapKind::ThreeD, 0.5));
        assert_eq!(r.matches[0].outcome, DetOutcome::Ignored);
    }

    #[test]
    fn ap_perfect_and_empty() {
        let gts = vec![vec![gt_car(2.0, 20.0, 0.3)], vec![gt_car(-3.0, 15.0, -1.0)]];
        let dets: Vec<Vec<ObjectLabel>> = gts
            .iter()
            .map(|g| g.iter().map(|l| scored(l.clone(), 0.9)).collect())
            .collect();
        let out = evaluate(&dets, &gts, &cfg(OverlapKind::ThreeD, 0.7), Interpolation::ElevenPoint);
        assert_eq!(out.ap, 1.0);
        assert_eq!(out.aos, 1.0);

        let none: Vec<Vec<ObjectLabel>> = vec![Vec::new(), Vec::new()];
        let out = evaluate(&none, &gts, &cfg(OverlapKind::ThreeD, 0.7), Interpolation::ElevenPoint);
        assert_eq!(out.ap, 0.0);
    }

    #[test]
    fn ap_half_recall_example() {
        // precision 1 up to recall 0.5, nothing beyond: 11-point AP = 6/11
        let gts = vec![(0..4).map(|i| gt_car(i as f64 * 3.0, 20.0, 0.0)).collect::<Vec<_>>()];
        let dets = vec![vec![
            scored(gts[0][0].clone(), 0.9),
            scored(gts[0][1].clone(), 0.8),
        ]];
        let out = evaluate(&dets, &gts, &cfg(OverlapKind::ThreeD, 0.7), Interpolation::ElevenPoint);
        assert!((out.ap - 6.0 / 11.0).abs() < 1e-12, "ap {}", out.ap);
    }

    #[test]
    fn aos_alpha_flipped_is_zero() {
        let gts = vec![vec![gt_car(2.0, 20.0, 0.3)]];
        let mut det = gts[0][0].clone();
        det.alpha = wrap_to_pi(det.alpha + PI);
        let dets = vec![vec![scored(det, 0.9)]];
        let aos = average_orientation_similarity(
            &dets,
            &gts,
            &cfg(OverlapKind::ThreeD, 0.7),
            Interpolation::ElevenPoint,
        );
        assert!(aos.abs() < 1e-12);
        let out = evaluate(&dets, &gts, &cfg(OverlapKind::ThreeD, 0.7), Interpolation::ElevenPoint);
        assert_eq!(out.ap, 1.0);
    }

    #[test]
    fn aos_half_quarter_turn() {
        // 4 TPs, half with Δα = π/2: mean similarity 0.75·precision
        let gts: Vec<Vec<ObjectLabel>> =
            vec![(0..4).map(|i| gt_car(i as f64 * 4.0, 20.0, 0.0)).collect()];
        let dets: Vec<Vec<ObjectLabel>> = vec![gts[0]
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut d = scored(g.clone(), 0.9 - 0.1 * i as f64);
                if i % 2 == 1 {
                    d.alpha = wrap_to_pi(d.alpha + FRAC_PI_2);
                }
                d
            })
            .collect()];
        let cfg = cfg(OverlapKind::ThreeD, 0.7);
        let results = match_all(&dets, &gts, &cfg);
        let curve = pr_curve(&results);
        let last = curve.last().unwrap();
        assert!((last.precision - 1.0).abs() < 1e-12);
        assert!((last.orientation_similarity - 0.75).abs() < 1e-12);
    }

    #[test]
    fn bev_ignores_vertical_axis() {
        let gts = vec![vec![gt_car(2.0, 20.0, 0.3)]];
        let mut det = gts[0][0].clone();
        det.location[1] += det.dims_hwl[0] / 2.0; // half a height down
        let dets = vec![vec![scored(det, 0.9)]];
        let c = cfg(OverlapKind::Bev, 0.5);
        assert_eq!(evaluate_bev(&dets, &gts, &c, Interpolation::ElevenPoint), 1.0);
        // 3D overlap drops to 0.5/1.5 = 1/3 < 0.5
        assert_eq!(evaluate_3d(&dets, &gts, &c, Interpolation::ElevenPoint), 0.0);
    }

    #[test]
    fn far_shifted_results_score_zero() {
        let gts = vec![vec![gt_car(2.0, 20.0, 0.3)]];
        let mut det = gts[0][0].clone();
        det.location[2] += 10.0;
        let dets = vec![vec![scored(det, 0.9)]];
        assert_eq!(
            evaluate_3d(&dets, &gts, &cfg(OverlapKind::ThreeD, 0.5), Interpolation::ElevenPoint),
            0.0
        );
    }

    #[test]
    fn dimension_error_cases() {
        let gts = vec![gt_car(2.0, 20.0, 0.3)];
        assert_eq!(dimension_error(&gts, &gts).unwrap(), 0.0);

        let mut det = gts[0].clone();
        det.dims_hwl = [1.5 + 0.3, 1.6, 3.8 + 0.4];
        let e = dimension_error(&[det], &gts).unwrap();
        assert!((e - 0.5).abs() < 1e-12);

        assert_eq!(dimension_error(&[], &gts), Err(EvalError::EmptyInput));
    }

    #[test]
    fn dimension_error_matches_nearest_center() {
        let near = gt_car(0.0, 10.0, 0.0);
        let mut far = gt_car(0.0, 40.0, 0.0);
        far.dims_hwl = [2.5, 2.6, 4.8]; // distinct dims on the far gt
        let gts = vec![near, far];
        let mut det = gts[0].clone();
        det.location = [0.0, 1.5, 12.0]; // nearer to the first gt
        assert_eq!(dimension_error(&[det], &gts).unwrap(), 0.0);
    }

    #[test]
    fn ap_score_rescaling_invariance() {
        let gts: Vec<Vec<ObjectLabel>> =
            vec![(0..5).map(|i| gt_car(i as f64 * 4.0, 20.0, 0.0)).collect()];
        let dets: Vec<Vec<ObjectLabel>> = vec![gts[0]
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut d = scored(g.clone(), 0.9 - 0.15 * i as f64);
                if i == 3 {
                    d.location[2] += 15.0; // one far-off detection
                }
                d
            })
            .collect()];
        let c = cfg(OverlapKind::ThreeD, 0.5);
        let base = evaluate(&dets, &gts, &c, Interpolation::ElevenPoint);
        let rescaled: Vec<Vec<ObjectLabel>> = dets
            .iter()
            .map(|img| {
                img.iter()
                    .map(|d| {
                        let mut d = d.clone();
                        d.score = Some(d.score.unwrap() * 3.0 + 7.0);
                        d
                    })
                    .collect()
            })
            .collect();
        let re = evaluate(&rescaled, &gts, &c, Interpolation::ElevenPoint);
        assert_eq!(base, re);
    }

    #[test]
    fn zero_overlap_low_score_det_never_helps() {
        let gts: Vec<Vec<ObjectLabel>> =
            vec![(0..3).map(|i| gt_car(i as f64 * 5.0, 20.0, 0.0)).collect()];
        let dets: Vec<Vec<ObjectLabel>> =
            vec![gts[0].iter().map(|g| scored(g.clone(), 0.9)).collect()];
        let c = cfg(OverlapKind::ThreeD, 0.5);
        let base = evaluate(&dets, &gts, &c, Interpolation::ElevenPoint).ap;
        let mut extra = dets.clone();
        let mut junk = scored(gt_car(500.0, 200.0, 0.0), 0.01);
        junk.bbox = BBox2D::new(0.0, 0.0, 10.0, 10.0);
        extra[0].push(junk);
        let with_junk = evaluate(&extra, &gts, &c, Interpolation::ElevenPoint).ap;
        assert!(with_junk <= base + 1e-12);
    }

    #[test]
    fn ap_monotone_in_threshold() {
        let gts: Vec<Vec<ObjectLabel>> =
            vec![(0..4).map(|i| gt_car(i as f64 * 5.0, 20.0, 0.0)).collect()];
        let dets: Vec<Vec<ObjectLabel>> = vec![gts[0]
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut d = scored(g.clone(), 0.9 - 0.1 * i as f64);
                d.location[0] += 0.1 + 0.2 * i as f64;
                d
            })
            .collect()];
        let mut prev = 1.0f64;
        for thresh in [0.3, 0.5, 0.7] {
            let ap = evaluate_3d(&dets, &gts, &cfg(OverlapKind::ThreeD, thresh), Interpolation::ElevenPoint);
            assert!(ap <= prev + 1e-12, "AP must not grow with threshold");
            prev = ap;
        }
    }

    #[test]
    fn report_csv_shape() {
        let rows = vec![ReportRow {
            difficulty: Difficulty::Easy,
            overlap_kind: OverlapKind::Bev,
            iou_threshold: 0.5,
            ap: 0.75,
            aos: 0.7,
        }];
        let csv = render_report_csv(&rows, Some(0.15));
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "difficulty,overlap,iou_threshold,ap,aos,dimension_error"
        );
        assert_eq!(lines.next().unwrap(), "Easy,BEV,0.50,0.750000,0.700000,0.150000");
    }
}
