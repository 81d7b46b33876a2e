use serde::{Deserialize, Serialize};

use crate::math::{Quat, Rigid, Vec3};
use crate::scalar::Real;

use super::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeadKeyframe {
    /// Seconds.
    pub time: f64,
    /// Degrees about +y.
    #[serde(default)]
    pub yaw: f64,
    /// Degrees about +x.
    #[serde(default)]
    pub pitch: f64,
    /// Degrees about +z.
    #[serde(default)]
    pub roll: f64,
    /// Meters.
    #[serde(default)]
    pub translation: [f64; 3],
}

impl HeadKeyframe {
    pub fn at(time: f64) -> Self {
        Self { time, yaw: 0.0, pitch: 0.0, roll: 0.0, translation: [0.0; 3] }
    }
}

/// Keyframed head motion. Rotation is slerped, translation lerped, and the
/// pose is held after the last keyframe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeadMotionScript {
    pub keyframes: Vec<HeadKeyframe>,
}

impl Default for HeadMotionScript {
    fn default() -> Self {
        Self { keyframes: vec![HeadKeyframe::at(0.0)] }
    }
}

impl HeadMotionScript {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |reason: &str| Err(SimError::InvalidParam { field: "keyframes", reason: reason.into() });
        match self.keyframes.first() {
            None => return bad("at least one keyframe required"),
            Some(k) if k.time != 0.0 => return bad("first keyframe must be at t=0"),
            _ => {}
        }
        if self.keyframes.windows(2).any(|w| !(w[1].time > w[0].time)) {
            return bad("keyframe times must be strictly increasing");
        }
        let finite = self
            .keyframes
            .iter()
            .all(|k| [k.time, k.yaw, k.pitch, k.roll].iter().chain(k.translation.iter()).all(|v| v.is_finite()));
        if !finite {
            return bad("non-finite keyframe value");
        }
        Ok(())
    }
}

fn keyframe_rotation<T: Real>(k: &HeadKeyframe) -> Quat<T> {
    Quat::from_yaw_pitch_roll_deg(T::lit(k.yaw), T::lit(k.pitch), T::lit(k.roll))
}

/// Head motion at time `t` (seconds): rotation about the rest head center
/// followed by a translation. Times before 0 are treated as 0.
pub fn eval_head_pose<T: Real>(script: &HeadMotionScript, t: T) -> Rigid<T> {
    let keys = &script.keyframes;
    let Some(first) = keys.first() else {
        return Rigid::identity();
    };
    let t = t.as_f64();
    let pose_of = |k: &HeadKeyframe| Rigid::new(keyframe_rotation::<T>(k).to_mat3(), Vec3::from_f64(k.translation));
    if t <= first.time || keys.len() == 1 {
        return pose_of(first);
    }
    let last = &keys[keys.len() - 1];
    if t >= last.time {
        return pose_of(last);
    }
    let i = keys.partition_point(|k| k.time <= t) - 1;
    let (a, b) = (&keys[i], &keys[i + 1]);
    if t == a.time {
        return pose_of(a);
    }
    let s = T::lit((t - a.time) / (b.time - a.time));
    let q = keyframe_rotation::<T>(a).slerp(&keyframe_rotation(b), s);
    let ta = Vec3::<T>::from_f64(a.translation);
    let tb = Vec3::<T>::from_f64(b.translation);
    Rigid::new(q.to_mat3(), ta + (tb - ta) * s)
}
