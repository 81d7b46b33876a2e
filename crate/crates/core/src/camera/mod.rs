//! Pinhole cameras, orbit trajectories and per-frame projection.
//!
//! Camera space is x right, y down, z forward (depth); image origin is the
//! top-left corner with y pointing down.

mod project;
mod proxy;

pub use project::{
    project_frame, project_point, Keypoint, ProjectedFrame, ProjectedPoint, Projection, StrandPolyline, NEAR_PLANE,
};
pub use proxy::{BoundingBox, Proxy, ProxyShape};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{Mat3, Rigid, Vec3};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum CameraError {
    #[error("invalid camera parameter {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("orbit trajectory needs at least one azimuth keyframe")]
    EmptyKeyframes,
    #[error("azimuth keyframes must start at frame 0 and strictly increase")]
    UnorderedKeyframes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

/// Default focal length in pixels (about 74° horizontal field of view at 832 px).
pub const DEFAULT_FOCAL: f64 = 550.0;

impl Default for CameraIntrinsics {
    fn default() -> Self {
        Self::centered(832, 480, DEFAULT_FOCAL)
    }
}

impl CameraIntrinsics {
    pub fn centered(width: u32, height: u32, focal: f64) -> Self {
        Self { fx: focal, fy: focal, cx: width as f64 / 2.0, cy: height as f64 / 2.0, width, height }
    }

    pub fn validate(&self) -> Result<(), CameraError> {
        let bad = |field, reason: &str| Err(CameraError::Invalid { field, reason: reason.into() });
        if !(self.fx > 0.0 && self.fx.is_finite()) {
            return bad("fx", "must be > 0");
        }
        if !(self.fy > 0.0 && self.fy.is_finite()) {
            return bad("fy", "must be > 0");
        }
        if self.width == 0 || self.height == 0 {
            return bad("width", "image must be non-empty");
        }
        if !(self.cx >= 0.0 && self.cx < self.width as f64) {
            return bad("cx", "must lie in [0, width)");
        }
        if !(self.cy >= 0.0 && self.cy < self.height as f64) {
            return bad("cy", "must lie in [0, height)");
        }
        Ok(())
    }
}

/// World-to-camera rigid transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose<T> {
    pub world_to_camera: Rigid<T>,
}

impl<T: Real> CameraPose<T> {
    /// Camera at `eye` looking at `target` with world `up` roughly up.
    pub fn look_at(eye: Vec3<T>, target: Vec3<T>, up: Vec3<T>) -> Self {
        let forward = (target - eye).normalize();
        let right = forward.cross(up).try_normalize().unwrap_or(Vec3::unit_x());
        let down = forward.cross(right);
        let rotation = Mat3::from_rows(right, down, forward);
        let translation = -rotation.mul_vec(eye);
        Self { world_to_camera: Rigid::new(rotation, translation) }
    }

    /// Camera center in world space.
    pub fn position(&self) -> Vec3<T> {
        self.world_to_camera.inverse().translation
    }

    /// Optical axis direction in world space.
    pub fn forward(&self) -> Vec3<T> {
        self.world_to_camera.rotation.rows[2]
    }

    pub fn transform(&self, p: Vec3<T>) -> Vec3<T> {
        self.world_to_camera.apply(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraTrajectory<T> {
    pub poses: Vec<CameraPose<T>>,
    pub intrinsics: CameraIntrinsics,
}

impl<T: Real> CameraTrajectory<T> {
    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn constant(pose: CameraPose<T>, frames: usize, intrinsics: CameraIntrinsics) -> Self {
        Self { poses: vec![pose; frames], intrinsics }
    }
}

/// Camera placement on a sphere around `target`.
///
/// Azimuth 0 is the front view (camera on +z looking toward -z); positive
/// azimuth moves the camera toward the subject's right (-x). Elevation
/// raises it above the target.
pub fn orbit_pose<T: Real>(target: Vec3<T>, radius: T, elevation_deg: T, azimuth_deg: T) -> CameraPose<T> {
    let (sa, ca) = azimuth_deg.to_radians().sin_cos();
    let (se, ce) = elevation_deg.to_radians().sin_cos();
    let eye = target + Vec3::new(-radius * sa * ce, radius * se, radius * ca * ce);
    CameraPose::look_at(eye, target, Vec3::unit_y())
}

/// Azimuth of `pose` around `target` in degrees, inverse of [`orbit_pose`].
pub fn orbit_azimuth<T: Real>(pose: &CameraPose<T>, target: Vec3<T>) -> T {
    let d = pose.position() - target;
    (-d.x).atan2(d.z).to_degrees()
}

/// Piecewise-linear interpolation of `(frame, degrees)` keyframes, held
/// constant outside the keyed range.
pub fn interpolate_keyframes(keyframes: &[(usize, f64)], frame: usize) -> Result<f64, CameraError> {
    validate_keyframes(keyframes)?;
    let i = keyframes.partition_point(|k| k.0 <= frame);
    if i == 0 {
        return Ok(keyframes[0].1);
    }
    let (fa, a) = keyframes[i - 1];
    if fa == frame || i == keyframes.len() {
        return Ok(a);
    }
    let (fb, b) = keyframes[i];
    let s = (frame - fa) as f64 / (fb - fa) as f64;
    Ok(a * (1.0 - s) + b * s)
}

fn validate_keyframes(keyframes: &[(usize, f64)]) -> Result<(), CameraError> {
    match keyframes.first() {
        None => Err(CameraError::EmptyKeyframes),
        Some(k) if k.0 != 0 => Err(CameraError::UnorderedKeyframes),
        _ if keyframes.windows(2).any(|w| w[1].0 <= w[0].0) => Err(CameraError::UnorderedKeyframes),
        _ if keyframes.iter().any(|k| !k.1.is_finite()) => {
            Err(CameraError::Invalid { field: "azimuth_keyframes", reason: "non-finite angle".into() })
        }
        _ => Ok(()),
    }
}

/// Per-frame orbit around `target` following the azimuth keyframes.
pub fn orbit_trajectory<T: Real>(
    target: Vec3<T>,
    radius: T,
    elevation_deg: T,
    azimuth_keyframes: &[(usize, f64)],
    frames: usize,
    intrinsics: CameraIntrinsics,
) -> Result<CameraTrajectory<T>, CameraError> {
    validate_keyframes(azimuth_keyframes)?;
    intrinsics.validate()?;
    if !(radius > T::zero()) {
        return Err(CameraError::Invalid { field: "radius", reason: "must be > 0".into() });
    }
    let poses = (0..frames)
        .map(|f| {
            let az = interpolate_keyframes(azimuth_keyframes, f)?;
            Ok(orbit_pose(target, radius, elevation_deg, T::lit(az)))
        })
        .collect::<Result<_, CameraError>>()?;
    Ok(CameraTrajectory { poses, intrinsics })
}
