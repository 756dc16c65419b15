//! Stereo-rig geometry, a seeded detection oracle standing in for the
//! object detector, disparity/depth recovery, and direction estimation.
//!
//! The rig frame coincides with the panel frame: cameras sit at the panel
//! center displaced +-baseline/2 along x, looking down +z. Image y grows
//! downward, world y upward; the sign flip is explicit in projection and
//! back-projection.

use crate::geometry::{direction_from_position, Direction, GeometryError, Position};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum VisionError {
    #[error("point is behind the cameras (z = {z} <= 0)")]
    BehindCamera { z: f64 },
    #[error("projection falls outside the image ({x:.1}, {y:.1})")]
    OutOfView { x: f64, y: f64 },
    #[error("no depth: disparity {0} is not positive")]
    NoDepth(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Stereo camera pair: shared focal length and per-camera principal points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StereoRig {
    /// Focal length in pixels.
    pub focal_px: f64,
    /// Camera spacing in meters.
    pub baseline_m: f64,
    pub image_width_px: f64,
    pub image_height_px: f64,
    /// Left principal point (x, y) in pixels.
    pub principal_left: (f64, f64),
    /// Right principal point (x, y) in pixels.
    pub principal_right: (f64, f64),
}

impl Default for StereoRig {
    fn default() -> Self {
        Self {
            focal_px: 700.0,
            baseline_m: 0.12,
            image_width_px: 1280.0,
            image_height_px: 720.0,
            principal_left: (640.0, 360.0),
            principal_right: (640.0, 360.0),
        }
    }
}

/// Pixel coordinates of one target in both images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StereoObservation {
    /// Left-image point (x1, y1).
    pub left: (f64, f64),
    /// Right-image point (x2, y2).
    pub right: (f64, f64),
}

/// Axis-aligned prediction box around a target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionBox {
    pub center: (f64, f64),
    pub width: f64,
    pub height: f64,
    pub confidence: f64,
}

/// Stand-in for the object detector: centers boxes on the true pixel
/// points plus Gaussian noise, or misses entirely. Deterministic given
/// `(seed, tick)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorOracle {
    /// Per-axis pixel noise standard deviation.
    pub pixel_noise_sigma: f64,
    /// Probability of producing no detection on a tick.
    pub miss_probability: f64,
    /// End-to-end acquisition latency in seconds.
    pub latency_s: f64,
    pub seed: u64,
}

impl Default for DetectorOracle {
    fn default() -> Self {
        Self {
            pixel_noise_sigma: 0.0,
            miss_probability: 0.0,
            latency_s: 0.085,
            seed: 0,
        }
    }
}

const BOX_WIDTH_PX: f64 = 40.0;
const BOX_HEIGHT_PX: f64 = 80.0;

/// Forward pinhole projection of a panel-frame point into both images.
pub fn project(rig: &StereoRig, p: &Position) -> Result<StereoObservation, VisionError> {
    if !(p.z > 0.0) {
        return Err(VisionError::BehindCamera { z: p.z });
    }
    let f = rig.focal_px;
    let half_base = rig.baseline_m / 2.0;
    let x1 = rig.principal_left.0 + f * (p.x + half_base) / p.z;
    let x2 = rig.principal_right.0 + f * (p.x - half_base) / p.z;
    let y1 = rig.principal_left.1 - f * p.y / p.z;
    let y2 = rig.principal_right.1 - f * p.y / p.z;
    for &(x, y) in &[(x1, y1), (x2, y2)] {
        if x < 0.0 || x > rig.image_width_px || y < 0.0 || y > rig.image_height_px {
            return Err(VisionError::OutOfView { x, y });
        }
    }
    Ok(StereoObservation {
        left: (x1, y1),
        right: (x2, y2),
    })
}

/// Signed disparity: left offset from the left principal point plus right
/// principal point offset from the right image point.
pub fn disparity(rig: &StereoRig, obs: &StereoObservation) -> f64 {
    (obs.left.0 - rig.principal_left.0) + (rig.principal_right.0 - obs.right.0)
}

/// Depth from disparity, `f * b / d`. Fails for non-positive disparity
/// (point at infinity or a matching failure).
pub fn depth(rig: &StereoRig, disparity_px: f64) -> Result<f64, VisionError> {
    if !(disparity_px > 0.0) {
        return Err(VisionError::NoDepth(disparity_px));
    }
    Ok(rig.focal_px * rig.baseline_m / disparity_px)
}

/// Back-project a left-image box center at a known depth and convert to a
/// panel-frame direction.
///
/// The left-camera x is shifted by half the baseline so the result is
/// expressed at the rig center.
pub fn estimate_direction(
    rig: &StereoRig,
    left_box: &DetectionBox,
    depth_m: f64,
) -> Result<(Direction, Position), VisionError> {
    let z = depth_m;
    let x = (left_box.center.0 - rig.principal_left.0) * z / rig.focal_px - rig.baseline_m / 2.0;
    let y = -(left_box.center.1 - rig.principal_left.1) * z / rig.focal_px;
    let p = Position::new(x, y, z);
    Ok((direction_from_position(&p)?, p))
}

/// Rig-center back-projection from both boxes: the two per-camera
/// estimates average out the half-baseline bias and split pixel noise.
pub fn estimate_direction_pair(
    rig: &StereoRig,
    left_box: &DetectionBox,
    right_box: &DetectionBox,
    depth_m: f64,
) -> Result<(Direction, Position), VisionError> {
    let z = depth_m;
    let f = rig.focal_px;
    let x_left = (left_box.center.0 - rig.principal_left.0) * z / f - rig.baseline_m / 2.0;
    let x_right = (right_box.center.0 - rig.principal_right.0) * z / f + rig.baseline_m / 2.0;
    let y_left = -(left_box.center.1 - rig.principal_left.1) * z / f;
    let y_right = -(right_box.center.1 - rig.principal_right.1) * z / f;
    let p = Position::new((x_left + x_right) / 2.0, (y_left + y_right) / 2.0, z);
    Ok((direction_from_position(&p)?, p))
}

/// One oracle observation: boxes centered on the true pixel points plus
/// independent per-axis Gaussian noise, or `None` on a miss.
pub fn detect(
    oracle: &DetectorOracle,
    rig: &StereoRig,
    true_obs: &StereoObservation,
    tick: u64,
) -> Option<(DetectionBox, DetectionBox)> {
    let mut rng = crate::rngstream::derive(oracle.seed, crate::rngstream::STREAM_DETECT, tick);
    if rng.gen::<f64>() < oracle.miss_probability {
        return None;
    }
    let noise = Normal::new(0.0, oracle.pixel_noise_sigma.max(0.0)).expect("sigma >= 0");
    let mut noisy = |p: (f64, f64)| -> (f64, f64) {
        let nx = if oracle.pixel_noise_sigma > 0.0 {
            noise.sample(&mut rng)
        } else {
            0.0
        };
        let ny = if oracle.pixel_noise_sigma > 0.0 {
            noise.sample(&mut rng)
        } else {
            0.0
        };
        (
            (p.0 + nx).clamp(0.0, rig.image_width_px),
            (p.1 + ny).clamp(0.0, rig.image_height_px),
        )
    };
    let make_box = |center: (f64, f64)| DetectionBox {
        center: (
            center
                .0
                .clamp(BOX_WIDTH_PX / 2.0, rig.image_width_px - BOX_WIDTH_PX / 2.0),
            center.1.clamp(
                BOX_HEIGHT_PX / 2.0,
                rig.image_height_px - BOX_HEIGHT_PX / 2.0,
            ),
        ),
        width: BOX_WIDTH_PX,
        height: BOX_HEIGHT_PX,
        confidence: 1.0,
    };
    let left = make_box(noisy(true_obs.left));
    let right = make_box(noisy(true_obs.right));
    Some((left, right))
}

/// Full zero-latency pipeline: project, detect, disparity, depth,
/// rig-center back-projection. `None` when the detector misses.
pub fn observe_position(
    oracle: &DetectorOracle,
    rig: &StereoRig,
    p: &Position,
    tick: u64,
) -> Result<Option<(Direction, Position)>, VisionError> {
    let true_obs = project(rig, p)?;
    let Some((left, right)) = detect(oracle, rig, &true_obs, tick) else {
        return Ok(None);
    };
    let obs = StereoObservation {
        left: left.center,
        right: right.center,
    };
    let d = disparity(rig, &obs);
    let z = depth(rig, d)?;
    Ok(Some(estimate_direction_pair(rig, &left, &right, z)?))
}
