//! Geometry and evaluation toolkit for monocular 3D object detection.
//!
//! Given 2D detections, camera intrinsics and per-object dimension/orientation
//! estimates, the crate constructs 3D box proposals, solves a tight-constraint
//! seed location, densely samples candidates around the seed, scores them
//! through a pluggable fitting-degree scorer and evaluates result sets with
//! KITTI-style metrics.
//!
//! The pipeline stages map onto the modules:
//!
//! 1. [`geometry`] – cuboid vertex model, yaw rotation, pinhole projection.
//! 2. [`anchors`] – anchor clustering, regression losses and decoding.
//! 3. [`orientation`] – local/global/ray angle conversions and the linear
//!    ray-angle fit.
//! 4. [`localization`] – tight-constraint seed solving and Gaussian dense
//!    sampling.
//! 5. [`scoring`] – fitting-degree scorer contract with oracle and geometric
//!    baseline implementations, plus wireframe rendering.
//! 6. [`overlap`] – exact oriented 3D IoU and its Monte-Carlo oracle.
//! 7. [`kitti`] – label/calibration parsing and difficulty classification.
//! 8. [`eval`] – dimension error, AOS and 2D/BEV/3D average precision.
//!
//! [`pipeline`] ties the stages together for one detection; the `mono3d-cli`
//! crate wraps it in batch subcommands.

pub mod anchors;
pub mod eval;
pub mod geometry;
pub mod kitti;
pub mod localization;
pub mod orientation;
pub mod overlap;
pub mod pipeline;
pub mod raster;
pub mod scoring;

pub use geometry::{BBox2D, CameraIntrinsics, Cuboid3D, Detection2D, ProjectedBox};
pub use localization::{Candidate, SamplingParams, TightConstraintSolution};
pub use scoring::FittingScorer;
