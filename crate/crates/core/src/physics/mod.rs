//! Per-strand hair dynamics: geometry over time from hair properties,
//! external forces and head motion.

mod motion;
mod sequence;
mod sim;
mod wind;

pub use motion::{eval_head_pose, HeadKeyframe, HeadMotionScript};
pub use sequence::{freeze_geometry, read_hseq, write_hseq, GeometryFrame, GeometrySequence, HseqError};
pub use sim::{simulate, simulate_frames, step, SimState, StepInputs};
pub(crate) use wind::splitmix64;
pub use wind::{eval_wind, gust, WindField};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid physics parameter {field}: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    #[error("simulation diverged at frame {frame}, substep {substep} (strand {strand})")]
    Divergence { frame: usize, substep: usize, strand: usize },
    #[error("hair model is not attached to the scalp")]
    NotAttached,
    #[error("state shape does not match the hair model")]
    ShapeMismatch,
    #[error("frame index {index} out of range for sequence of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("frame count must be >= 1")]
    EmptySequence,
}

/// Hair material and integration settings.
///
/// `mass` is per free vertex (kg), `stiffness` pulls vertices toward their
/// groomed rest position (N/m), `damping` is a velocity decay rate (1/s)
/// and `gravity_scale` multiplies standard gravity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsParams {
    pub mass: f64,
    pub stiffness: f64,
    pub damping: f64,
    pub gravity_scale: f64,
    pub substeps: usize,
    pub fps: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self { mass: 0.1, stiffness: 6.0, damping: 9.0, gravity_scale: 1.0, substeps: 10, fps: 16.0 }
    }
}

impl PhysicsParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |field, reason: &str| Err(SimError::InvalidParam { field, reason: reason.into() });
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return bad("mass", "must be > 0");
        }
        if !(self.stiffness >= 0.0 && self.stiffness.is_finite()) {
            return bad("stiffness", "must be >= 0");
        }
        if !(self.damping >= 0.0 && self.damping.is_finite()) {
            return bad("damping", "must be >= 0");
        }
        if !(self.gravity_scale >= 0.0 && self.gravity_scale.is_finite()) {
            return bad("gravity_scale", "must be >= 0");
        }
        if self.substeps < 1 {
            return bad("substeps", "must be >= 1");
        }
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return bad("fps", "must be > 0");
        }
        Ok(())
    }

    /// Substep length in seconds.
    pub fn dt(&self) -> f64 {
        1.0 / (self.fps * self.substeps as f64)
    }
}
