//! Conversions among local orientation (observation angle, KITTI alpha),
//! global orientation (rotation_y) and the camera-object ray direction.
//!
//! The three angles satisfy θ_ray = wrap(θ_local − θ_global). The ray
//! direction is recovered from the image either through the linear model
//! θ_ray = k·(width/2 − u_center) with a fitted coefficient k, or exactly
//! through the pinhole relation θ_ray = atan2(cx − u_center, fx). Signs are
//! fixed so that θ_local reproduces KITTI's alpha = rotation_y − atan2(Tx, Tz)
//! on real labels.

use crate::geometry::{wrap_to_pi, BBox2D, CameraIntrinsics, Vec3};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OrientationError {
    #[error("ray-coefficient fit is degenerate: all center offsets are zero")]
    DegenerateFit,
    #[error("ray coefficient {0} is not plausible for a real camera (|k| must be < 0.1)")]
    ImplausibleCoefficient(f64),
}

/// Proportionality coefficient of the linear ray model, radians per pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayCoefficient(f64);

impl RayCoefficient {
    pub fn new(k: f64) -> Result<Self, OrientationError> {
        if !k.is_finite() || k.abs() >= 0.1 {
            return Err(OrientationError::ImplausibleCoefficient(k));
        }
        Ok(Self(k))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The three linked orientations of one object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationTriple {
    pub theta_local: f64,
    pub theta_global: f64,
    pub theta_ray: f64,
}

impl OrientationTriple {
    pub fn from_local_and_ray(theta_local: f64, theta_ray: f64) -> Self {
        Self {
            theta_local: wrap_to_pi(theta_local),
            theta_global: global_from_local(theta_local, theta_ray),
            theta_ray: wrap_to_pi(theta_ray),
        }
    }

    pub fn from_global_and_ray(theta_global: f64, theta_ray: f64) -> Self {
        Self {
            theta_local: local_from_global(theta_global, theta_ray),
            theta_global: wrap_to_pi(theta_global),
            theta_ray: wrap_to_pi(theta_ray),
        }
    }
}

/// Result of the least-squares ray-coefficient fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayFit {
    pub k: RayCoefficient,
    /// Root of the summed squared residuals, radians.
    pub residual: f64,
}

/// Linear ray estimate from a pixel offset to the image center.
pub fn ray_from_center_offset(offset_px: f64, k: RayCoefficient) -> f64 {
    k.value() * offset_px
}

/// Linear ray estimate from the 2D box center: θ_ray = k·(width/2 − (x1+x2)/2).
pub fn ray_from_bbox(bbox: &BBox2D, image_width: f64, k: RayCoefficient) -> f64 {
    ray_from_center_offset(image_width / 2.0 - bbox.center_u(), k)
}

/// Exact pinhole ray direction from a horizontal image coordinate:
/// θ_ray = atan2(cx − u_center, fx). No fitted coefficient needed.
pub fn ray_from_u_exact(u_center: f64, cam: &CameraIntrinsics) -> f64 {
    (cam.cx() - u_center).atan2(cam.fx())
}

/// Ray direction of a known 3D location: θ_ray = −atan2(Tx, Tz).
pub fn ray_from_location(location: &Vec3) -> f64 {
    -location[0].atan2(location[2])
}

/// θ_global = wrap(θ_local − θ_ray).
pub fn global_from_local(theta_local: f64, theta_ray: f64) -> f64 {
    wrap_to_pi(theta_local - theta_ray)
}

/// θ_local = wrap(θ_global + θ_ray); inverse of [`global_from_local`].
pub fn local_from_global(theta_global: f64, theta_ray: f64) -> f64 {
    wrap_to_pi(theta_global + theta_ray)
}

/// Closed-form least squares through the origin: k = Σ xᵢyᵢ / Σ xᵢ².
///
/// `pairs` holds (center offset in pixels, θ_ray in radians).
pub fn fit_ray_coefficient(pairs: &[(f64, f64)]) -> Result<RayFit, OrientationError> {
    let sum_xx: f64 = pairs.iter().map(|(x, _)| x * x).sum();
    if pairs.is_empty() || sum_xx == 0.0 {
        return Err(OrientationError::DegenerateFit);
    }
    let sum_xy: f64 = pairs.iter().map(|(x, y)| x * y).sum();
    let k = sum_xy / sum_xx;
    let residual = pairs
        .iter()
        .map(|(x, y)| (y - k * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(RayFit {
        k: RayCoefficient::new(k)?,
        residual,
    })
}
