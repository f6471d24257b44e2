//! Exact 3D IoU for center-aligned and general yaw-rotated cuboids.
//!
//! Both boxes are assumed to share the gravity (y) axis, which holds for the
//! yaw-only box model. General overlap decomposes into a bird's-eye-view
//! polygon intersection in the x–z plane times the vertical extent overlap.
//! [`iou_3d_monte_carlo`] is an independent sampling estimate kept as a test
//! oracle for the analytic path.

use crate::geometry::{mat3_mul_vec, mat3_transpose, rotation_from_yaw, Cuboid3D};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Vertices closer than this are merged to avoid sliver polygons (meters).
const VERTEX_MERGE_EPS: f64 = 1e-9;

/// Convex polygon in the ground (x–z) plane, counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon2D {
    vertices: Vec<[f64; 2]>,
}

impl ConvexPolygon2D {
    /// Normalize a convex vertex loop: merge near-duplicate neighbours and
    /// orient counter-clockwise. Fewer than three surviving vertices yield
    /// the empty polygon.
    pub fn new(vertices: Vec<[f64; 2]>) -> Self {
        let mut merged: Vec<[f64; 2]> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if let Some(last) = merged.last() {
                if (v[0] - last[0]).abs() < VERTEX_MERGE_EPS
                    && (v[1] - last[1]).abs() < VERTEX_MERGE_EPS
                {
                    continue;
                }
            }
            merged.push(v);
        }
        if merged.len() >= 2 {
            let first = merged[0];
            let last = merged[merged.len() - 1];
            if (first[0] - last[0]).abs() < VERTEX_MERGE_EPS
                && (first[1] - last[1]).abs() < VERTEX_MERGE_EPS
            {
                merged.pop();
            }
        }
        if merged.len() < 3 {
            return Self { vertices: Vec::new() };
        }
        if signed_area(&merged) < 0.0 {
            merged.reverse();
        }
        Self { vertices: merged }
    }

    pub fn empty() -> Self {
        Self { vertices: Vec::new() }
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).max(0.0)
    }
}

fn signed_area(vertices: &[[f64; 2]]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        twice += a[0] * b[1] - b[0] * a[1];
    }
    twice / 2.0
}

/// 3D IoU of two cuboids sharing their bottom-center and yaw: the overlap is
/// the per-axis minimum extent product.
pub fn iou_center_aligned(a: [f64; 3], b: [f64; 3]) -> f64 {
    let inter = a[0].min(b[0]) * a[1].min(b[1]) * a[2].min(b[2]);
    let va = a[0] * a[1] * a[2];
    let vb = b[0] * b[1] * b[2];
    inter / (va + vb - inter)
}

/// Ground-plane footprint: an l×w rectangle centered at (Tx, Tz), rotated by
/// yaw, counter-clockwise.
pub fn bev_footprint(c: &Cuboid3D) -> ConvexPolygon2D {
    let (s, cos) = c.yaw.sin_cos();
    let hx = c.l / 2.0;
    let hz = c.w / 2.0;
    // object-frame (x, z) corners in counter-clockwise order
    let corners = [[hx, hz], [-hx, hz], [-hx, -hz], [hx, -hz]];
    let verts = corners
        .iter()
        .map(|&[x, z]| {
            [
                cos * x + s * z + c.location[0],
                -s * x + cos * z + c.location[2],
            ]
        })
        .collect();
    ConvexPolygon2D::new(verts)
}

/// Intersection of two convex polygons by successive half-plane clipping
/// against the second polygon's edges. May be empty.
pub fn polygon_intersection(p: &ConvexPolygon2D, q: &ConvexPolygon2D) -> ConvexPolygon2D {
    if p.is_empty() || q.is_empty() {
        return ConvexPolygon2D::empty();
    }
    let mut subject: Vec<[f64; 2]> = p.vertices.clone();
    let clip = &q.vertices;
    for i in 0..clip.len() {
        if subject.len() < 3 {
            return ConvexPolygon2D::empty();
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        subject = clip_halfplane(&subject, a, b);
    }
    ConvexPolygon2D::new(subject)
}

/// Keep the part of `poly` on the left of the directed edge a→b.
fn clip_halfplane(poly: &[[f64; 2]], a: [f64; 2], b: [f64; 2]) -> Vec<[f64; 2]> {
    let side = |p: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = poly[i];
        let next = poly[(i + 1) % poly.len()];
        let sc = side(cur);
        let sn = side(next);
        if sc >= 0.0 {
            out.push(cur);
        }
        if (sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0) {
            let t = sc / (sc - sn);
            out.push([
                cur[0] + (next[0] - cur[0]) * t,
                cur[1] + (next[1] - cur[1]) * t,
            ]);
        }
    }
    out
}

fn y_extent_overlap(a: &Cuboid3D, b: &Cuboid3D) -> f64 {
    // y-extent of a box is [Ty − h, Ty] under the y-down bottom-center anchor
    let top = (a.location[1] - a.h).max(b.location[1] - b.h);
    let bottom = a.location[1].min(b.location[1]);
    (bottom - top).max(0.0)
}

/// Exact 3D IoU of two yaw-rotated cuboids: BEV polygon overlap times
/// vertical extent overlap. Symmetric by construction (operands are
/// canonically ordered before clipping).
pub fn iou_3d(a: &Cuboid3D, b: &Cuboid3D) -> f64 {
    let key = |c: &Cuboid3D| {
        (
            c.location[0],
            c.location[1],
            c.location[2],
            c.w,
            c.h,
            c.l,
            c.yaw,
        )
    };
    let (first, second) = if key(a) <= key(b) { (a, b) } else { (b, a) };
    if first == second {
        return 1.0;
    }
    let inter_area = polygon_intersection(&bev_footprint(first), &bev_footprint(second)).area();
    let inter = inter_area * y_extent_overlap(first, second);
    let va = first.volume();
    let vb = second.volume();
    let inter = inter.min(va).min(vb);
    let union = va + vb - inter;
    if inter <= 0.0 || union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Bird's-eye-view IoU: footprint overlap ignoring the vertical axis.
/// Canonically ordered like [`iou_3d`], so symmetric exactly.
pub fn bev_iou(a: &Cuboid3D, b: &Cuboid3D) -> f64 {
    let key = |c: &Cuboid3D| (c.location[0], c.location[2], c.w, c.l, c.yaw);
    let (first, second) = if key(a) <= key(b) { (a, b) } else { (b, a) };
    if key(first) == key(second) {
        return 1.0;
    }
    let fa = bev_footprint(first);
    let fb = bev_footprint(second);
    let inter = polygon_intersection(&fa, &fb)
        .area()
        .min(fa.area())
        .min(fb.area());
    let union = fa.area() + fb.area() - inter;
    if inter <= 0.0 || union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

fn point_in_cuboid(p: [f64; 3], c: &Cuboid3D, rot_t: &[[f64; 3]; 3]) -> bool {
    let d = [
        p[0] - c.location[0],
        p[1] - c.location[1],
        p[2] - c.location[2],
    ];
    let q = mat3_mul_vec(rot_t, &d);
    q[0].abs() <= c.l / 2.0 && (-c.h..=0.0).contains(&q[1]) && q[2].abs() <= c.w / 2.0
}

/// Unbiased sampling estimate of [`iou_3d`] over the union's axis-aligned
/// bounding volume. Deterministic given the seed; test oracle only.
pub fn iou_3d_monte_carlo(a: &Cuboid3D, b: &Cuboid3D, n: usize, seed: u64) -> f64 {
    assert!(n >= 1, "sample count must be at least 1");
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for c in [a, b] {
        for corner in bev_footprint(c).vertices() {
            lo[0] = lo[0].min(corner[0]);
            hi[0] = hi[0].max(corner[0]);
            lo[2] = lo[2].min(corner[1]);
            hi[2] = hi[2].max(corner[1]);
        }
        lo[1] = lo[1].min(c.location[1] - c.h);
        hi[1] = hi[1].max(c.location[1]);
    }
    let rot_ta = mat3_transpose(&rotation_from_yaw(a.yaw));
    let rot_tb = mat3_transpose(&rotation_from_yaw(b.yaw));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_a = 0u64;
    let mut in_b = 0u64;
    let mut in_both = 0u64;
    for _ in 0..n {
        let p = [
            rng.random_range(lo[0]..=hi[0]),
            rng.random_range(lo[1]..=hi[1]),
            rng.random_range(lo[2]..=hi[2]),
        ];
        let hit_a = point_in_cuboid(p, a, &rot_ta);
        let hit_b = point_in_cuboid(p, b, &rot_tb);
        in_a += hit_a as u64;
        in_b += hit_b as u64;
        in_both += (hit_a && hit_b) as u64;
    }
    let in_union = in_a + in_b - in_both;
    if in_union == 0 {
        0.0
    } else {
        in_both as f64 / in_union as f64
    }
}
