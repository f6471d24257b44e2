//! Anchor construction by clustering, the dimension/orientation regression
//! losses as pure functions, and anchor decoding.
//!
//! Dimension anchors are k-means cluster centers of training-set (w, h, l)
//! triples; angle anchors are circular cluster centers. A prediction is one
//! confidence plus one offset per anchor, decoded as the highest-confidence
//! anchor plus its offset. The losses operate on single objects; batch
//! averaging is the caller's concern.

use crate::geometry::wrap_to_pi;
use crate::overlap::iou_center_aligned;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnchorError {
    #[error("k-means needs at least {needed} distinct samples, got {available}")]
    InsufficientData { needed: usize, available: usize },
    #[error("decoded dimension {axis} is non-positive: {value}")]
    NonPositiveDimension { axis: usize, value: f64 },
    #[error("anchor file malformed at line {line}: {reason}")]
    MalformedAnchorFile { line: usize, reason: String },
}

/// K dimension triples (w, h, l), all positive, pairwise distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionAnchorSet {
    pub anchors: Vec<[f64; 3]>,
}

/// K′ angles in [−π, π), pairwise circular distance > 1e-6.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleAnchorSet {
    pub anchors: Vec<f64>,
}

/// Regressor output for dimensions: pre-softmax confidences plus per-anchor
/// (Δw, Δh, Δl) offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionPrediction {
    pub confidences: Vec<f64>,
    pub offsets: Vec<[f64; 3]>,
}

/// Regressor output for orientation: confidences plus per-anchor Δθ.
#[derive(Debug, Clone, PartialEq)]
pub struct AnglePrediction {
    pub confidences: Vec<f64>,
    pub offsets: Vec<f64>,
}

/// Default anchor counts: four dimension anchors, two angle anchors.
pub const DEFAULT_DIMENSION_ANCHORS: usize = 4;
pub const DEFAULT_ANGLE_ANCHORS: usize = 2;

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

/// Circular distance |wrap(a − b)|.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_to_pi(a - b).abs()
}

fn count_distinct<T: PartialEq + Copy>(samples: &[T]) -> usize {
    let mut seen: Vec<T> = Vec::new();
    for s in samples {
        if !seen.contains(s) {
            seen.push(*s);
        }
    }
    seen.len()
}

/// Generic seeded Lloyd iteration with farthest-point initialization.
///
/// Empty clusters are re-seeded from the sample farthest from its assigned
/// center. Deterministic given the seed; ties break toward the lowest index.
fn lloyd<T, DF, MF>(
    samples: &[T],
    k: usize,
    seed: u64,
    max_iters: usize,
    dist: DF,
    mean: MF,
) -> Vec<T>
where
    T: Copy + PartialEq,
    DF: Fn(&T, &T) -> f64,
    MF: Fn(&[T]) -> T,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = samples.len();
    let mut centers: Vec<T> = Vec::with_capacity(k);
    centers.push(samples[rng.random_range(0..n)]);
    while centers.len() < k {
        let mut best = (0usize, -1.0f64);
        for (i, s) in samples.iter().enumerate() {
            let d = centers
                .iter()
                .map(|c| dist(s, c))
                .fold(f64::INFINITY, f64::min);
            if d > best.1 {
                best = (i, d);
            }
        }
        centers.push(samples[best.0]);
    }

    let mut assignment = vec![usize::MAX; n];
    for _ in 0..max_iters {
        let mut changed = false;
        for (i, s) in samples.iter().enumerate() {
            let mut best = (0usize, f64::INFINITY);
            for (j, c) in centers.iter().enumerate() {
                let d = dist(s, c);
                if d < best.1 {
                    best = (j, d);
                }
            }
            if assignment[i] != best.0 {
                assignment[i] = best.0;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for j in 0..k {
            let members: Vec<T> = samples
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == j)
                .map(|(s, _)| *s)
                .collect();
            if members.is_empty() {
                let far = samples
                    .iter()
                    .enumerate()
                    .max_by(|(_, a), (_, b)| {
                        dist(a, &centers[assignment[0]])
                            .partial_cmp(&dist(b, &centers[assignment[0]]))
                            .unwrap()
                    })
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                centers[j] = samples[far];
            } else {
                centers[j] = mean(&members);
            }
        }
    }
    centers
}

/// Cluster training dimensions into k anchor cuboids (squared Euclidean).
pub fn kmeans_dimensions(
    samples: &[[f64; 3]],
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<DimensionAnchorSet, AnchorError> {
    let distinct = count_distinct(samples);
    if k == 0 || k > distinct {
        return Err(AnchorError::InsufficientData {
            needed: k.max(1),
            available: distinct,
        });
    }
    let mut centers = lloyd(samples, k, seed, max_iters, dist2, |members| {
        let mut m = [0.0; 3];
        for s in members {
            for a in 0..3 {
                m[a] += s[a];
            }
        }
        [
            m[0] / members.len() as f64,
            m[1] / members.len() as f64,
            m[2] / members.len() as f64,
        ]
    });
    centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(DimensionAnchorSet { anchors: centers })
}

/// Cluster training angles into k anchors under circular distance; each
/// center is the circular mean (atan2 of summed sin/cos) of its members.
pub fn kmeans_angles(
    samples: &[f64],
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<AngleAnchorSet, AnchorError> {
    let distinct = count_distinct(samples);
    if k == 0 || k > distinct {
        return Err(AnchorError::InsufficientData {
            needed: k.max(1),
            available: distinct,
        });
    }
    let mut centers = lloyd(
        samples,
        k,
        seed,
        max_iters,
        |a, b| circular_distance(*a, *b),
        |members| {
            let (mut sin, mut cos) = (0.0, 0.0);
            for &m in members {
                sin += m.sin();
                cos += m.cos();
            }
            if sin == 0.0 && cos == 0.0 {
                // antipodal balance: the circular mean is undefined, keep a member
                members[0]
            } else {
                wrap_to_pi(sin.atan2(cos))
            }
        },
    );
    centers = centers.into_iter().map(wrap_to_pi).collect();
    centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(AngleAnchorSet { anchors: centers })
}

/// Index of the anchor with maximum center-aligned 3D IoU against `gt`.
/// Ties break toward the lowest index.
pub fn best_anchor_dimension(anchors: &DimensionAnchorSet, gt: [f64; 3]) -> usize {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, a) in anchors.anchors.iter().enumerate() {
        let iou = iou_center_aligned(*a, gt);
        if iou > best.1 {
            best = (i, iou);
        }
    }
    best.0
}

fn nearest_anchor_angle(anchors: &AngleAnchorSet, gt_theta: f64) -> usize {
    let mut best = (0usize, f64::INFINITY);
    for (i, &a) in anchors.anchors.iter().enumerate() {
        let d = circular_distance(a, gt_theta);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Numerically stable softmax; components positive and summing to one.
pub fn softmax(confidences: &[f64]) -> Vec<f64> {
    let max = confidences.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = confidences.iter().map(|c| (c - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn argmax(values: &[f64]) -> usize {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Dimension regression loss: confidence cross-entropy at the best-IoU
/// anchor plus the volume-driven term 1 − IoU(decoded-at-i*, gt).
///
/// A decoded dimension that goes non-positive contributes the maximum
/// penalty (overlap treated as zero).
pub fn dimension_loss(
    pred: &DimensionPrediction,
    anchors: &DimensionAnchorSet,
    gt: [f64; 3],
) -> f64 {
    let k = anchors.anchors.len();
    assert_eq!(pred.confidences.len(), k, "confidence count must equal K");
    assert_eq!(pred.offsets.len(), k, "offset count must equal K");
    let best = best_anchor_dimension(anchors, gt);
    let prob = softmax(&pred.confidences)[best];
    let a = anchors.anchors[best];
    let off = pred.offsets[best];
    let decoded = [a[0] + off[0], a[1] + off[1], a[2] + off[2]];
    let iou = if decoded.iter().all(|&d| d > 0.0) {
        iou_center_aligned(decoded, gt)
    } else {
        0.0
    };
    -prob.ln() + (1.0 - iou)
}

/// Orientation regression loss: confidence cross-entropy at the circularly
/// nearest anchor plus 1 − cos(decoded-at-i* − θ_gt).
pub fn orientation_loss(pred: &AnglePrediction, anchors: &AngleAnchorSet, gt_theta: f64) -> f64 {
    let k = anchors.anchors.len();
    assert_eq!(pred.confidences.len(), k, "confidence count must equal K'");
    assert_eq!(pred.offsets.len(), k, "offset count must equal K'");
    let best = nearest_anchor_angle(anchors, gt_theta);
    let prob = softmax(&pred.confidences)[best];
    let err = anchors.anchors[best] + pred.offsets[best] - gt_theta;
    -prob.ln() + (1.0 - err.cos())
}

/// Highest-confidence anchor plus its offset.
pub fn decode_dimension(
    pred: &DimensionPrediction,
    anchors: &DimensionAnchorSet,
) -> Result<[f64; 3], AnchorError> {
    let k = anchors.anchors.len();
    assert_eq!(pred.confidences.len(), k, "confidence count must equal K");
    assert_eq!(pred.offsets.len(), k, "offset count must equal K");
    let j = argmax(&pred.confidences);
    let a = anchors.anchors[j];
    let off = pred.offsets[j];
    let decoded = [a[0] + off[0], a[1] + off[1], a[2] + off[2]];
    for (axis, &value) in decoded.iter().enumerate() {
        if value <= 0.0 {
            return Err(AnchorError::NonPositiveDimension { axis, value });
        }
    }
    Ok(decoded)
}

/// Highest-confidence angle anchor plus its offset, wrapped to [−π, π).
pub fn decode_orientation(pred: &AnglePrediction, anchors: &AngleAnchorSet) -> f64 {
    let k = anchors.anchors.len();
    assert_eq!(pred.confidences.len(), k, "confidence count must equal K'");
    assert_eq!(pred.offsets.len(), k, "offset count must equal K'");
    let j = argmax(&pred.confidences);
    wrap_to_pi(anchors.anchors[j] + pred.offsets[j])
}

impl DimensionAnchorSet {
    /// Plain-text form: `# dims k=<K>` header, one `w h l` line per anchor.
    pub fn to_text(&self) -> String {
        let mut out = format!("# dims k={}\n", self.anchors.len());
        for a in &self.anchors {
            out.push_str(&format!("{} {} {}\n", a[0], a[1], a[2]));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AnchorError> {
        let anchors = parse_anchor_lines(text, "# dims", 3)?
            .into_iter()
            .map(|v| [v[0], v[1], v[2]])
            .collect();
        Ok(Self { anchors })
    }
}

impl AngleAnchorSet {
    /// Plain-text form: `# angles k=<K'>` header, one angle per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# angles k={}\n", self.anchors.len());
        for a in &self.anchors {
            out.push_str(&format!("{a}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AnchorError> {
        let anchors = parse_anchor_lines(text, "# angles", 1)?
            .into_iter()
            .map(|v| v[0])
            .collect();
        Ok(Self { anchors })
    }
}

fn parse_anchor_lines(
    text: &str,
    header: &str,
    values_per_line: usize,
) -> Result<Vec<Vec<f64>>, AnchorError> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or(AnchorError::MalformedAnchorFile {
        line: 1,
        reason: "empty file".into(),
    })?;
    if !first.trim_start().starts_with(header) {
        return Err(AnchorError::MalformedAnchorFile {
            line: 1,
            reason: format!("expected header starting with '{header}'"),
        });
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Result<Vec<f64>, _> =
            line.split_whitespace().map(|f| f.parse::<f64>()).collect();
        let fields = fields.map_err(|e| AnchorError::MalformedAnchorFile {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        if fields.len() != values_per_line {
            return Err(AnchorError::MalformedAnchorFile {
                line: idx + 1,
                reason: format!("expected {values_per_line} values, got {}", fields.len()),
            });
        }
        out.push(fields);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, LN_2, PI};

    #[test]
    fn kmeans_separates_two_clusters() {
        // values chosen exactly representable so the cluster means are exact
        let mut samples = Vec::new();
        for _ in 0..100 {
            samples.push([1.5, 1.25, 3.75]);
            samples.push([2.0, 1.75, 5.0]);
        }
        let set = kmeans_dimensions(&samples, 2, 42, 100).unwrap();
        assert_eq!(set.anchors.len(), 2);
        assert!(set.anchors.contains(&[1.5, 1.25, 3.75]));
        assert!(set.anchors.contains(&[2.0, 1.75, 5.0]));
    }

    #[test]
    fn kmeans_single_cluster_is_mean() {
        let samples = vec![[1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [3.0, 3.0, 3.0]];
        let set = kmeans_dimensions(&samples, 1, 0, 100).unwrap();
        for a in 0..3 {
            assert!((set.anchors[0][a] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kmeans_k_equals_samples() {
        let samples = vec![[1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [3.0, 1.0, 4.0]];
        let set = kmeans_dimensions(&samples, 3, 7, 100).unwrap();
        for s in &samples {
            assert!(set.anchors.contains(s));
        }
    }

    #[test]
    fn kmeans_insufficient_data() {
        let samples = vec![[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]];
        assert_eq!(
            kmeans_dimensions(&samples, 2, 0, 100),
            Err(AnchorError::InsufficientData {
                needed: 2,
                available: 1
            })
        );
    }

    #[test]
    fn kmeans_seed_reproducible() {
        let mut samples = Vec::new();
        for i in 0..50 {
            let t = i as f64 / 50.0;
            samples.push([1.5 + t, 1.4 + 0.5 * t, 3.5 + 2.0 * t]);
        }
        let a = kmeans_dimensions(&samples, 4, 123, 100).unwrap();
        let b = kmeans_dimensions(&samples, 4, 123, 100).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn circular_mean_avoids_naive_trap() {
        // all samples near ±π: the center must be ≈ π, not the naive mean 0.37
        let samples = vec![-3.1, 3.1, PI];
        let set = kmeans_angles(&samples, 1, 0, 100).unwrap();
        assert!(circular_distance(set.anchors[0], PI) < 1e-9);
    }

    #[test]
    fn kmeans_angles_two_modes() {
        let samples = vec![0.0, PI, 0.0, PI, 0.0];
        let set = kmeans_angles(&samples, 2, 1, 100).unwrap();
        assert!(set
            .anchors
            .iter()
            .any(|&a| circular_distance(a, 0.0) < 1e-9));
        assert!(set.anchors.iter().any(|&a| circular_distance(a, PI) < 1e-9));
    }

    #[test]
    fn kmeans_angles_identical_samples() {
        let set = kmeans_angles(&[0.5, 0.5, 0.5], 1, 0, 100).unwrap();
        assert!((set.anchors[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn best_anchor_examples() {
        let set = DimensionAnchorSet {
            anchors: vec![[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]],
        };
        assert_eq!(best_anchor_dimension(&set, [2.0, 2.0, 2.0]), 1);
        assert_eq!(best_anchor_dimension(&set, [1.0, 1.0, 1.0]), 0);

        // nested cubes: IoU₀ = 1/8 < IoU₁ = 8/27
        let set = DimensionAnchorSet {
            anchors: vec![[1.0, 1.0, 1.0], [3.0, 3.0, 3.0]],
        };
        assert_eq!(best_anchor_dimension(&set, [2.0, 2.0, 2.0]), 1);
    }

    #[test]
    fn softmax_examples() {
        let p = softmax(&[0.0, 0.0]);
        assert_eq!(p, vec![0.5, 0.5]);
        let p = softmax(&[3.0, 3.0, 3.0, 3.0]);
        for v in p {
            assert!((v - 0.25).abs() < 1e-15);
        }
        let p = softmax(&[2.0, 0.0]);
        let e2 = 2.0f64.exp();
        assert!((p[0] - e2 / (e2 + 1.0)).abs() < 1e-12);
        assert!((p[1] - 1.0 / (e2 + 1.0)).abs() < 1e-12);
        assert!((p[0] - 0.8808).abs() < 1e-4);
    }

    fn two_anchor_set() -> DimensionAnchorSet {
        DimensionAnchorSet {
            anchors: vec![[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]],
        }
    }

    #[test]
    fn dimension_loss_confident_exact() {
        let anchors = two_anchor_set();
        let gt = [2.1, 2.2, 1.9];
        let off = [0.1, 0.2, -0.1];
        let pred = DimensionPrediction {
            confidences: vec![0.0, 10.0],
            offsets: vec![[0.0; 3], off],
        };
        let loss = dimension_loss(&pred, &anchors, gt);
        assert!((loss - 4.5398e-5).abs() < 1e-7, "loss {loss}");
    }

    #[test]
    fn dimension_loss_uniform_confidence() {
        let anchors = two_anchor_set();
        let gt = [2.0, 2.0, 2.0];
        let pred = DimensionPrediction {
            confidences: vec![0.0, 0.0],
            offsets: vec![[0.0; 3], [0.0; 3]],
        };
        let loss = dimension_loss(&pred, &anchors, gt);
        assert!((loss - LN_2).abs() < 1e-12, "loss {loss}");
    }

    #[test]
    fn dimension_loss_half_dims_penalty() {
        let anchors = two_anchor_set();
        let gt = [2.0, 2.0, 2.0];
        // offsets decode to half of gt in every axis → IoU term 1 − 1/8
        let pred = DimensionPrediction {
            confidences: vec![0.0, 0.0],
            offsets: vec![[0.0; 3], [-1.0, -1.0, -1.0]],
        };
        let loss = dimension_loss(&pred, &anchors, gt);
        let expect = LN_2 + 0.875;
        assert!((loss - expect).abs() < 1e-12, "loss {loss}");
    }

    #[test]
    fn orientation_loss_examples() {
        let anchors = AngleAnchorSet {
            anchors: vec![0.0, PI / 2.0],
        };
        // exact decoding with confident logits
        let pred = AnglePrediction {
            confidences: vec![10.0, 0.0],
            offsets: vec![0.1, 0.0],
        };
        let loss = orientation_loss(&pred, &anchors, 0.1);
        assert!((loss - 4.5398e-5).abs() < 1e-7, "loss {loss}");

        // offset error π/2 with uniform confidences
        let pred = AnglePrediction {
            confidences: vec![0.0, 0.0],
            offsets: vec![PI / 2.0, 0.0],
        };
        let loss = orientation_loss(&pred, &anchors, 0.0);
        assert!((loss - (LN_2 + 1.0)).abs() < 1e-12, "loss {loss}");

        // offset error π maximizes the cosine term at 2
        let pred = AnglePrediction {
            confidences: vec![10.0, 0.0],
            offsets: vec![PI, 0.0],
        };
        let loss = orientation_loss(&pred, &anchors, 0.0);
        assert!((loss - (2.0 + 4.5398e-5)).abs() < 1e-7, "loss {loss}");
    }

    #[test]
    fn decode_dimension_examples() {
        let anchors = DimensionAnchorSet {
            anchors: vec![[1.6, 1.5, 4.0], [2.5, 2.0, 6.0]],
        };
        let pred = DimensionPrediction {
            confidences: vec![5.0, 1.0],
            offsets: vec![[0.1, -0.05, 0.2], [0.0; 3]],
        };
        let d = decode_dimension(&pred, &anchors).unwrap();
        assert!((d[0] - 1.7).abs() < 1e-12);
        assert!((d[1] - 1.45).abs() < 1e-12);
        assert!((d[2] - 4.2).abs() < 1e-12);

        let pred = DimensionPrediction {
            confidences: vec![5.0, 1.0],
            offsets: vec![[0.0; 3], [0.0; 3]],
        };
        assert_eq!(decode_dimension(&pred, &anchors).unwrap(), [1.6, 1.5, 4.0]);

        let pred = DimensionPrediction {
            confidences: vec![5.0, 1.0],
            offsets: vec![[-2.0, 0.0, 0.0], [0.0; 3]],
        };
        assert!(matches!(
            decode_dimension(&pred, &anchors),
            Err(AnchorError::NonPositiveDimension { axis: 0, .. })
        ));
    }

    #[test]
    fn decode_orientation_wraps() {
        let anchors = AngleAnchorSet {
            anchors: vec![0.0, PI - 0.1],
        };
        let pred = AnglePrediction {
            confidences: vec![1.0, 0.0],
            offsets: vec![0.3, 0.0],
        };
        assert!((decode_orientation(&pred, &anchors) - 0.3).abs() < 1e-12);

        let pred = AnglePrediction {
            confidences: vec![0.0, 1.0],
            offsets: vec![0.0, 0.3],
        };
        let decoded = decode_orientation(&pred, &anchors);
        assert!((decoded - (-PI + 0.2)).abs() < 1e-12, "decoded {decoded}");
    }

    #[test]
    fn anchor_serialization_roundtrip() {
        let dims = DimensionAnchorSet {
            anchors: vec![[1.6, 1.5, 3.8], [2.0123456789, 1.8, 5.0]],
        };
        let text = dims.to_text();
        assert!(text.starts_with("# dims k=2\n"));
        assert_eq!(DimensionAnchorSet::from_text(&text).unwrap(), dims);

        let angles = AngleAnchorSet {
            anchors: vec![-FRAC_PI_2, FRAC_PI_2],
        };
        let text = angles.to_text();
        assert!(text.starts_with("# angles k=2\n"));
        assert_eq!(AngleAnchorSet::from_text(&text).unwrap(), angles);

        assert!(DimensionAnchorSet::from_text("# angles k=1\n0.5\n").is_err());
        assert!(DimensionAnchorSet::from_text("# dims k=1\n1.0 2.0\n").is_err());
    }

    #[test]
    fn loss_minimized_at_exact_offsets() {
        let anchors = two_anchor_set();
        let gt = [2.3, 1.9, 2.2];
        let best = best_anchor_dimension(&anchors, gt);
        let exact = [
            gt[0] - anchors.anchors[best][0],
            gt[1] - anchors.anchors[best][1],
            gt[2] - anchors.anchors[best][2],
        ];
        let loss_at = |off: [f64; 3]| {
            let mut offsets = vec![[0.0; 3]; 2];
            offsets[best] = off;
            dimension_loss(
                &DimensionPrediction {
                    confidences: vec![0.0, 0.0],
                    offsets,
                },
                &anchors,
                gt,
            )
        };
        let base = loss_at(exact);
        for axis in 0..3 {
            for delta in [-0.01, 0.01] {
                let mut off = exact;
                off[axis] += delta;
                assert!(loss_at(off) >= base - 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn losses_nonnegative(
            c0 in -5.0f64..5.0, c1 in -5.0f64..5.0,
            ow in -0.5f64..0.5, oh in -0.5f64..0.5, ol in -0.5f64..0.5,
            gt_w in 0.5f64..3.0, gt_h in 0.5f64..3.0, gt_l in 0.5f64..3.0,
            ang in -PI..PI, aoff in -PI..PI,
        ) {
            let anchors = two_anchor_set();
            let pred = DimensionPrediction {
                confidences: vec![c0, c1],
                offsets: vec![[ow, oh, ol], [ow, oh, ol]],
            };
            prop_assert!(dimension_loss(&pred, &anchors, [gt_w, gt_h, gt_l]) >= 0.0);

            let aset = AngleAnchorSet { anchors: vec![0.0, PI / 2.0] };
            let apred = AnglePrediction {
                confidences: vec![c0, c1],
                offsets: vec![aoff, aoff],
            };
            prop_assert!(orientation_loss(&apred, &aset, ang) >= 0.0);
        }

        #[test]
        fn shift_invariance(c0 in -5.0f64..5.0, c1 in -5.0f64..5.0, shift in -20.0f64..20.0) {
            let base = softmax(&[c0, c1]);
            let shifted = softmax(&[c0 + shift, c1 + shift]);
            prop_assert!((base[0] - shifted[0]).abs() < 1e-12);
            prop_assert!((base[1] - shifted[1]).abs() < 1e-12);

            // the losses and decoders inherit the invariance
            let anchors = two_anchor_set();
            let gt = [1.8, 1.6, 1.9];
            let mk = |c: Vec<f64>| DimensionPrediction {
                confidences: c,
                offsets: vec![[0.05, -0.02, 0.1]; 2],
            };
            let a = dimension_loss(&mk(vec![c0, c1]), &anchors, gt);
            let b = dimension_loss(&mk(vec![c0 + shift, c1 + shift]), &anchors, gt);
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert_eq!(
                decode_dimension(&mk(vec![c0, c1]), &anchors).unwrap(),
                decode_dimension(&mk(vec![c0 + shift, c1 + shift]), &anchors).unwrap()
            );

            let aset = AngleAnchorSet { anchors: vec![0.0, PI / 2.0] };
            let amk = |c: Vec<f64>| AnglePrediction { confidences: c, offsets: vec![0.2, -0.1] };
            let a = orientation_loss(&amk(vec![c0, c1]), &aset, 0.4);
            let b = orientation_loss(&amk(vec![c0 + shift, c1 + shift]), &aset, 0.4);
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert_eq!(
                decode_orientation(&amk(vec![c0, c1]), &aset),
                decode_orientation(&amk(vec![c0 + shift, c1 + shift]), &aset)
            );
        }

        #[test]
        fn best_anchor_scale_invariant(scale in 0.1f64..10.0, gw in 0.5f64..3.0, gh in 0.5f64..3.0, gl in 0.5f64..3.0) {
            let anchors = two_anchor_set();
            let scaled = DimensionAnchorSet {
                anchors: anchors.anchors.iter()
                    .map(|a| [a[0] * scale, a[1] * scale, a[2] * scale])
                    .collect(),
            };
            let gt = [gw, gh, gl];
            let gt_scaled = [gw * scale, gh * scale, gl * scale];
            prop_assert_eq!(
                best_anchor_dimension(&anchors, gt),
                best_anchor_dimension(&scaled, gt_scaled)
            );
        }
    }
}
