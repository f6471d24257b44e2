//! Cuboid vertex model, yaw rotation and pinhole projection.
//!
//! Camera coordinates are x-right, y-down, z-forward. A [`Cuboid3D`] is
//! anchored at the *bottom-face center*: in the object frame the eight
//! vertices have y ∈ {0, −h}, so vertices 0–3 form the ground ring and 4–7
//! the roof ring. This matches the KITTI label convention, where the stored
//! location is the bottom center of the box.

use thiserror::Error;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Depth magnitudes below this are treated as lying on the principal plane.
pub const DEGENERATE_DEPTH: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("cuboid dimensions must be positive, got w={w} h={h} l={l}")]
    InvalidDimensions { w: f64, h: f64, l: f64 },
    #[error("invalid intrinsic matrix: {0}")]
    InvalidIntrinsics(&'static str),
    #[error("vertex {vertex} projects onto the principal plane (|depth| < 1e-12)")]
    DegenerateProjection { vertex: usize },
    #[error("vertex {vertex} has non-positive depth {depth}")]
    BehindCamera { vertex: usize, depth: f64 },
}

/// Wrap an angle to [−π, π).
pub fn wrap_to_pi(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let wrapped = theta - two_pi * ((theta + std::f64::consts::PI) / two_pi).floor();
    // floor rounding can land exactly on π for inputs like -π - 1e-18
    if wrapped >= std::f64::consts::PI {
        wrapped - two_pi
    } else {
        wrapped
    }
}

/// A full 3D box hypothesis: dimensions, bottom-center location, global yaw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cuboid3D {
    /// Width in meters (lateral extent along z in the object frame).
    pub w: f64,
    /// Height in meters.
    pub h: f64,
    /// Length in meters.
    pub l: f64,
    /// Bottom-face center `[Tx, Ty, Tz]` in camera coordinates, meters.
    pub location: Vec3,
    /// Global orientation θ in radians, normalized to [−π, π).
    pub yaw: f64,
}

impl Cuboid3D {
    /// Build a cuboid, rejecting non-positive dimensions and normalizing yaw.
    pub fn new(w: f64, h: f64, l: f64, location: Vec3, yaw: f64) -> Result<Self, GeometryError> {
        if !(w > 0.0 && h > 0.0 && l > 0.0) {
            return Err(GeometryError::InvalidDimensions { w, h, l });
        }
        Ok(Self {
            w,
            h,
            l,
            location,
            yaw: wrap_to_pi(yaw),
        })
    }

    /// Dimension triple in the internal (w, h, l) order.
    pub fn dims(&self) -> [f64; 3] {
        [self.w, self.h, self.l]
    }

    pub fn volume(&self) -> f64 {
        self.w * self.h * self.l
    }

    /// Same box moved by `delta` (dimensions and yaw unchanged).
    pub fn translated(&self, delta: Vec3) -> Self {
        Self {
            location: [
                self.location[0] + delta[0],
                self.location[1] + delta[1],
                self.location[2] + delta[2],
            ],
            ..*self
        }
    }
}

/// 3×4 pinhole projection matrix (KITTI "P2"), pixel units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    k: [[f64; 4]; 3],
}

impl CameraIntrinsics {
    /// Validate and wrap a row-major 3×4 matrix.
    pub fn from_matrix(k: [[f64; 4]; 3]) -> Result<Self, GeometryError> {
        if k.iter().flatten().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidIntrinsics("entries must be finite"));
        }
        if (k[2][2] - 1.0).abs() > 1e-9 {
            return Err(GeometryError::InvalidIntrinsics("K[2][2] must be 1"));
        }
        if k[0][0] <= 0.0 {
            return Err(GeometryError::InvalidIntrinsics("focal fx must be positive"));
        }
        if k[1][1] <= 0.0 {
            return Err(GeometryError::InvalidIntrinsics("focal fy must be positive"));
        }
        Ok(Self { k })
    }

    /// Ideal pinhole camera with focal `f` and principal point `(cx, cy)`.
    pub fn ideal(f: f64, cx: f64, cy: f64) -> Result<Self, GeometryError> {
        Self::from_matrix([
            [f, 0.0, cx, 0.0],
            [0.0, f, cy, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
    }

    pub fn matrix(&self) -> &[[f64; 4]; 3] {
        &self.k
    }

    pub fn row(&self, i: usize) -> [f64; 4] {
        self.k[i]
    }

    pub fn fx(&self) -> f64 {
        self.k[0][0]
    }

    pub fn fy(&self) -> f64 {
        self.k[1][1]
    }

    pub fn cx(&self) -> f64 {
        self.k[0][2]
    }

    pub fn cy(&self) -> f64 {
        self.k[1][2]
    }
}

/// Axis-aligned 2D rectangle in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox2D {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BBox2D {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        (self.width().max(0.0)) * (self.height().max(0.0))
    }

    pub fn center_u(&self) -> f64 {
        0.5 * (self.x1 + self.x2)
    }

    /// Standard rectangle intersection-over-union.
    pub fn iou(&self, other: &BBox2D) -> f64 {
        let ix = (self.x2.min(other.x2) - self.x1.max(other.x1)).max(0.0);
        let iy = (self.y2.min(other.y2) - self.y1.max(other.y1)).max(0.0);
        let inter = ix * iy;
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }
}

/// A 2D detection: axis-aligned box plus confidence score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection2D {
    pub bbox: BBox2D,
    pub score: f64,
}

/// Projection of the eight cuboid vertices, with signed projective scales.
///
/// `depths[i]` is the scale s of vertex i; a non-positive value marks a
/// vertex on or behind the principal plane. Vertex order matches
/// [`cuboid_vertices`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedBox {
    pub vertices: [[f64; 2]; 8],
    pub depths: [f64; 8],
}

impl ProjectedBox {
    /// Mean of the eight projected u coordinates.
    pub fn center_u(&self) -> f64 {
        self.vertices.iter().map(|v| v[0]).sum::<f64>() / 8.0
    }
}

/// Object-frame coordinates of the eight vertices.
///
/// x = ±l/2 in the order [+,+,−,−,+,+,−,−], y = [0,0,0,0,−h,−h,−h,−h],
/// z = ±w/2 in the order [+,−,−,+,+,−,−,+]. Vertices 0–3 are the ground
/// ring, 4–7 the roof ring, and vertex i+4 sits directly above vertex i.
pub fn cuboid_vertices(c: &Cuboid3D) -> [Vec3; 8] {
    let hx = c.l / 2.0;
    let hz = c.w / 2.0;
    [
        [hx, 0.0, hz],
        [hx, 0.0, -hz],
        [-hx, 0.0, -hz],
        [-hx, 0.0, hz],
        [hx, -c.h, hz],
        [hx, -c.h, -hz],
        [-hx, -c.h, -hz],
        [-hx, -c.h, hz],
    ]
}

/// Rotation about the camera y axis by the global orientation θ.
pub fn rotation_from_yaw(theta: f64) -> Mat3 {
    let (s, c) = theta.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn mat3_mul_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat3_transpose(m: &Mat3) -> Mat3 {
    [
        [m[0][0], m[1][0], m[2][0]],
        [m[0][1], m[1][1], m[2][1]],
        [m[0][2], m[1][2], m[2][2]],
    ]
}

/// Project all eight vertices: s·[u, v, 1]ᵀ = K·[R|T]·[x, y, z, 1]ᵀ.
///
/// Vertices behind the camera are reported with their negative depth rather
/// than erroring, so samplers can filter such candidates gracefully. Only a
/// vertex landing exactly on the principal plane is an error.
pub fn project_cuboid(
    c: &Cuboid3D,
    cam: &CameraIntrinsics,
) -> Result<ProjectedBox, GeometryError> {
    let rot = rotation_from_yaw(c.yaw);
    let k = cam.matrix();
    let mut vertices = [[0.0; 2]; 8];
    let mut depths = [0.0; 8];
    for (i, vert) in cuboid_vertices(c).iter().enumerate() {
        let r = mat3_mul_vec(&rot, vert);
        let p = [
            r[0] + c.location[0],
            r[1] + c.location[1],
            r[2] + c.location[2],
        ];
        let s = k[2][0] * p[0] + k[2][1] * p[1] + k[2][2] * p[2] + k[2][3];
        if s.abs() < DEGENERATE_DEPTH {
            return Err(GeometryError::DegenerateProjection { vertex: i });
        }
        let us = k[0][0] * p[0] + k[0][1] * p[1] + k[0][2] * p[2] + k[0][3];
        let vs = k[1][0] * p[0] + k[1][1] * p[1] + k[1][2] * p[2] + k[1][3];
        vertices[i] = [us / s, vs / s];
        depths[i] = s;
    }
    Ok(ProjectedBox { vertices, depths })
}

/// Axis-aligned bounding rectangle of the projected vertices.
///
/// Requires every depth positive; behind-camera projections have mirrored
/// pixel coordinates and no meaningful hull.
pub fn projected_hull_bbox(p: &ProjectedBox) -> Result<BBox2D, GeometryError> {
    for (i, &d) in p.depths.iter().enumerate() {
        if d <= 0.0 {
            return Err(GeometryError::BehindCamera { vertex: i, depth: d });
        }
    }
    let mut bbox = BBox2D::new(
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for v in &p.vertices {
        bbox.x1 = bbox.x1.min(v[0]);
        bbox.y1 = bbox.y1.min(v[1]);
        bbox.x2 = bbox.x2.max(v[0]);
        bbox.y2 = bbox.y2.max(v[1]);
    }
    Ok(bbox)
}
