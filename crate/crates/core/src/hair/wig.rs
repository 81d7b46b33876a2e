use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::math::{Mat3, Vec3};
use crate::scalar::Real;

use super::{HairError, HairModel, HumanRig, Strand};

/// Parameters of a procedurally grown wig.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WigSpec {
    pub strand_count: usize,
    pub segments_per_strand: usize,
    /// Strand length in meters.
    pub length: f64,
    /// Helical offset magnitude relative to the strand direction.
    pub curl: f64,
    /// Polar-cap half angle of the scalp region, degrees.
    pub scalp_coverage: f64,
    pub seed: u64,
}

impl Default for WigSpec {
    fn default() -> Self {
        Self { strand_count: 10_000, segments_per_strand: 16, length: 0.25, curl: 0.0, scalp_coverage: 95.0, seed: 0 }
    }
}

impl WigSpec {
    pub fn validate(&self) -> Result<(), HairError> {
        let bad = |field, reason: &str| Err(HairError::InvalidSpec { field, reason: reason.into() });
        if self.strand_count < 1 {
            return bad("strand_count", "must be >= 1");
        }
        if self.segments_per_strand < 1 {
            return bad("segments_per_strand", "must be >= 1");
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return bad("length", "must be > 0");
        }
        if !(self.curl >= 0.0) || !self.curl.is_finite() {
            return bad("curl", "must be >= 0");
        }
        if !(self.scalp_coverage > 0.0 && self.scalp_coverage <= 180.0) {
            return bad("scalp_coverage", "must be in (0, 180]");
        }
        Ok(())
    }
}

/// The cap axis leans back from vertical so the hairline clears the face.
const CAP_TILT_DEG: f64 = 25.0;
/// Helix pitch of curled strands, meters per turn.
const CURL_PITCH: f64 = 0.04;
/// Rest vertices beyond the root keep at least this many segment lengths of
/// clearance from the scalp.
const SCALP_CLEARANCE: f64 = 0.5;

const GOLDEN_CONJUGATE: f64 = 0.618_033_988_749_894_9;

/// Grows `spec.strand_count` strands on the rig's head sphere.
///
/// Roots follow a Fibonacci lattice over the scalp cap (the first root is the
/// cap apex) with a seeded azimuth rotation. Each strand leaves the scalp
/// along the surface normal and bends toward gravity; every segment is
/// exactly `length / segments_per_strand` long.
pub fn generate_wig<T: Real>(spec: &WigSpec, rig: &HumanRig<T>) -> Result<HairModel<T>, HairError> {
    spec.validate()?;
    rig.validate()?;
    let scalp = rig.head_sphere;
    let center = scalp.center.cast::<f64>();
    let radius = scalp.radius.as_f64();
    let seg = spec.length / spec.segments_per_strand as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let azimuth_offset: f64 = rng.random();

    let cap_axis = Mat3::from_rows(
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, CAP_TILT_DEG.to_radians().cos(), CAP_TILT_DEG.to_radians().sin()),
        Vec3::new(0.0, -CAP_TILT_DEG.to_radians().sin(), CAP_TILT_DEG.to_radians().cos()),
    );
    let cos_max = spec.scalp_coverage.to_radians().cos();
    let n = spec.strand_count;
    let down = Vec3::new(0.0, -1.0, 0.0);

    let mut strands = Vec::with_capacity(n);
    for i in 0..n {
        let u = i as f64 / n as f64;
        let cos_polar = 1.0 - u * (1.0 - cos_max);
        let sin_polar = (1.0 - cos_polar * cos_polar).max(0.0).sqrt();
        let azimuth = std::f64::consts::TAU * (azimuth_offset + i as f64 * GOLDEN_CONJUGATE).fract();
        let local = Vec3::new(sin_polar * azimuth.cos(), cos_polar, sin_polar * azimuth.sin());
        // cap_axis tips +y toward -z (backwards)
        let normal = cap_axis.mul_vec(local).normalize();
        let curl_phase = std::f64::consts::TAU * rng.random::<f64>();

        let vertices = grow_strand(center, radius, normal, down, seg, spec, curl_phase);
        let rest_lengths = vec![T::lit(seg); spec.segments_per_strand];
        let vertices: Vec<Vec3<T>> = vertices.into_iter().map(|v| v.cast()).collect();
        strands.push(Strand { vertices, rest_lengths, root_local: None });
    }
    Ok(HairModel { strands, scalp })
}

fn grow_strand(
    center: Vec3<f64>,
    radius: f64,
    normal: Vec3<f64>,
    down: Vec3<f64>,
    seg: f64,
    spec: &WigSpec,
    curl_phase: f64,
) -> Vec<Vec3<f64>> {
    let horizontal = Vec3::new(normal.x, 0.0, normal.z).try_normalize().unwrap_or(Vec3::new(0.0, 0.0, -1.0));
    let fall = (down + horizontal * 0.5).normalize();
    let side = normal.cross(fall).try_normalize().unwrap_or(Vec3::unit_x());
    let min_dist = radius + SCALP_CLEARANCE * seg;

    let mut vertices = Vec::with_capacity(spec.segments_per_strand + 1);
    let mut p = center + normal * radius;
    vertices.push(p);
    for j in 0..spec.segments_per_strand {
        let s = j as f64 / spec.segments_per_strand as f64;
        let w = 1.0 - (1.0 - s).powi(4);
        let base = (normal * (1.0 - w) + fall * w).normalize();
        let mut t = base;
        if spec.curl > 0.0 {
            let phase = curl_phase + std::f64::consts::TAU * (j as f64 * seg) / CURL_PITCH;
            let e2 = base.cross(side);
            t = (base + (side * phase.cos() + e2 * phase.sin()) * spec.curl).normalize();
        }
        if j > 0 && (p + t * seg).distance(center) < min_dist {
            // Slide along the tangent plane; distance from the center cannot shrink.
            let radial = (p - center).normalize();
            let inward = t.dot(radial).min(0.0);
            t = (t - radial * inward).try_normalize().unwrap_or(radial);
        }
        p += t * seg;
        vertices.push(p);
    }
    vertices
}
