use serde::{Deserialize, Serialize};

use crate::math::Vec3;
use crate::scalar::Real;

use super::SimError;

/// Uniform wind with optional seeded gusts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindField {
    /// Unit vector.
    pub direction: [f64; 3],
    /// Air speed, m/s.
    pub strength: f64,
    /// Relative gust modulation in `[0, 1]`.
    pub gust_amplitude: f64,
    /// Hz.
    pub gust_frequency: f64,
    /// Linear drag, kg/s.
    pub drag_coefficient: f64,
    pub seed: u64,
}

impl Default for WindField {
    fn default() -> Self {
        Self {
            direction: [1.0, 0.0, 0.0],
            strength: 10.0,
            gust_amplitude: 0.2,
            gust_frequency: 0.5,
            drag_coefficient: 0.05,
            seed: 0,
        }
    }
}

impl WindField {
    pub fn calm() -> Self {
        Self { strength: 0.0, gust_amplitude: 0.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |field, reason: &str| Err(SimError::InvalidParam { field, reason: reason.into() });
        let d = Vec3::<f64>::from(self.direction);
        if !d.is_finite() || (d.norm() - 1.0).abs() > 1e-6 {
            return bad("direction", "must be a unit vector");
        }
        if !(self.strength >= 0.0 && self.strength.is_finite()) {
            return bad("strength", "must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.gust_amplitude) {
            return bad("gust_amplitude", "must be in [0, 1]");
        }
        if !(self.gust_frequency >= 0.0 && self.gust_frequency.is_finite()) {
            return bad("gust_frequency", "must be >= 0");
        }
        if !(self.drag_coefficient >= 0.0 && self.drag_coefficient.is_finite()) {
            return bad("drag_coefficient", "must be >= 0");
        }
        Ok(())
    }

    /// Wind with `direction` normalized; other fields unchanged.
    pub fn normalized(mut self) -> Self {
        let d = Vec3::<f64>::from(self.direction);
        if let Some(u) = d.try_normalize() {
            self.direction = u.into();
        }
        self
    }
}

/// Spatial scale of the gust noise lattice, 1/m.
const GUST_SPATIAL_SCALE: f64 = 0.5;

/// Air velocity at `position` and time `t`:
/// `strength · direction · (1 + gust_amplitude · gust(position, t))`.
pub fn eval_wind<T: Real>(field: &WindField, position: Vec3<T>, t: T) -> Vec3<T> {
    let dir = Vec3::<T>::from_f64(field.direction);
    let mut speed = field.strength;
    if speed == 0.0 {
        return Vec3::zero();
    }
    if field.gust_amplitude != 0.0 {
        let g = gust(field.seed, position.cast(), t.as_f64() * field.gust_frequency);
        speed *= 1.0 + field.gust_amplitude * g;
    }
    dir * T::lit(speed)
}

/// Seeded 4D value noise over `(position · 0.5, phase)`, in `[-1, 1]`.
pub fn gust(seed: u64, position: Vec3<f64>, phase: f64) -> f64 {
    let c = [position.x * GUST_SPATIAL_SCALE, position.y * GUST_SPATIAL_SCALE, position.z * GUST_SPATIAL_SCALE, phase];
    let cell = c.map(|v| v.floor());
    let frac = [0, 1, 2, 3].map(|i| {
        let f = c[i] - cell[i];
        f * f * (3.0 - 2.0 * f)
    });
    let base = cell.map(|v| v as i64);
    let mut acc = [0.0f64; 16];
    for (corner, slot) in acc.iter_mut().enumerate() {
        let mut key = seed;
        for (axis, b) in base.iter().enumerate() {
            let offset = ((corner >> axis) & 1) as i64;
            key = splitmix64(key ^ (b + offset) as u64);
        }
        *slot = lattice_value(key);
    }
    // collapse one axis at a time, highest axis first
    let mut len = 16;
    for axis in (0..4).rev() {
        len /= 2;
        for i in 0..len {
            acc[i] = acc[i] + (acc[i + len] - acc[i]) * frac[axis];
        }
    }
    acc[0]
}

#[inline]
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn lattice_value(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}
