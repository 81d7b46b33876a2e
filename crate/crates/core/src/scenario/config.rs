use std::fmt;
use std::path::PathBuf;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::camera::{CameraError, CameraIntrinsics, DEFAULT_FOCAL};
use crate::hair::{HairError, WigSpec};
use crate::physics::{splitmix64, HeadMotionScript, PhysicsParams, SimError, WindField};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path} (line {line}, column {column}): {message}")]
    Schema { path: String, line: usize, column: usize, message: String },
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Invalid { field: field.into(), reason: reason.into() }
    }
}

/// Procedural wig parameters, or a path to an HSTR strand file.
#[derive(Debug, Clone, PartialEq)]
pub enum WigSource {
    Generate(WigSpec),
    File(PathBuf),
}

impl Default for WigSource {
    fn default() -> Self {
        Self::Generate(WigSpec::default())
    }
}

impl Serialize for WigSource {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Generate(spec) => spec.serialize(s),
            Self::File(path) => path.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for WigSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct SourceVisitor;

        impl<'de> Visitor<'de> for SourceVisitor {
            type Value = WigSource;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a wig parameter object or a strand file path")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<WigSource, E> {
                Ok(WigSource::File(PathBuf::from(v)))
            }

            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<WigSource, A::Error> {
                WigSpec::deserialize(de::value::MapAccessDeserializer::new(map)).map(WigSource::Generate)
            }
        }

        d.deserialize_any(SourceVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RigParams {
    /// Head sphere radius, meters.
    pub head_radius: f64,
    /// Offset of the whole figure, meters.
    pub origin: [f64; 3],
}

impl Default for RigParams {
    fn default() -> Self {
        Self { head_radius: 0.1, origin: [0.0; 3] }
    }
}

/// Orbit camera around `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraSpec {
    pub target: [f64; 3],
    /// Distance from the target, meters.
    pub radius: f64,
    /// Degrees above the target.
    pub elevation: f64,
    /// `[frame, degrees]` pairs; positive azimuth moves toward the subject's right.
    pub azimuth_keyframes: Vec<(usize, f64)>,
    /// Pixels.
    pub focal_length: f64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        Self {
            target: [0.0, 1.5, 0.0],
            radius: 1.2,
            elevation: 0.0,
            azimuth_keyframes: vec![(0, 0.0)],
            focal_length: DEFAULT_FOCAL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Effect {
    #[default]
    None,
    /// Hold the geometry of simulated frame `freeze_frame` (from 0) for the
    /// rest of the clip while the camera follows `azimuth_keyframes`.
    BulletTime { freeze_frame: usize, azimuth_keyframes: Vec<(usize, f64)> },
    /// Palindromic loop of the rendered clip.
    Cinemagraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Mixed into the wig and wind seeds; `--seed` replaces it.
    pub seed: u64,
    pub wig: WigSource,
    pub rig: RigParams,
    pub physics: PhysicsParams,
    pub wind: WindField,
    pub motion: HeadMotionScript,
    pub camera: CameraSpec,
    pub frames: usize,
    /// `[width, height]` in pixels.
    pub resolution: [u32; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_image: Option<PathBuf>,
    pub effect: Effect,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            wig: WigSource::default(),
            rig: RigParams::default(),
            physics: PhysicsParams::default(),
            wind: WindField::default(),
            motion: HeadMotionScript::default(),
            camera: CameraSpec::default(),
            frames: 81,
            resolution: [832, 480],
            reference_image: None,
            effect: Effect::None,
        }
    }
}

/// Seed for one random stream, combining the scenario seed with a
/// component's own seed.
pub fn derive_seed(scenario_seed: u64, own_seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(scenario_seed.wrapping_add(stream)) ^ own_seed)
}

fn sim_field(prefix: &str, e: SimError) -> ConfigError {
    match e {
        SimError::InvalidParam { field, reason } => ConfigError::invalid(format!("{prefix}.{field}"), reason),
        other => ConfigError::invalid(prefix, other.to_string()),
    }
}

fn camera_field(e: CameraError) -> ConfigError {
    match e {
        CameraError::Invalid { field, reason } => ConfigError::invalid(format!("camera.{field}"), reason),
        other => ConfigError::invalid("camera.azimuth_keyframes", other.to_string()),
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.frames < 1 {
            return Err(ConfigError::invalid("frames", "must be >= 1"));
        }
        let [w, h] = self.resolution;
        if w == 0 || h == 0 || w > 16384 || h > 16384 {
            return Err(ConfigError::invalid("resolution", "each side must be in 1..=16384"));
        }
        if let WigSource::Generate(spec) = &self.wig {
            spec.validate().map_err(|e| match e {
                HairError::InvalidSpec { field, reason } => ConfigError::invalid(format!("wig.{field}"), reason),
                other => ConfigError::invalid("wig", other.to_string()),
            })?;
        }
        let r = &self.rig;
        if !(r.head_radius > 0.0 && r.head_radius.is_finite()) {
            return Err(ConfigError::invalid("rig.head_radius", "must be > 0"));
        }
        if r.origin.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::invalid("rig.origin", "must be finite"));
        }
        self.physics.validate().map_err(|e| sim_field("physics", e))?;
        self.wind.validate().map_err(|e| sim_field("wind", e))?;
        self.motion.validate().map_err(|e| sim_field("motion", e))?;

        let c = &self.camera;
        if c.target.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::invalid("camera.target", "must be finite"));
        }
        if !(c.radius > 0.0 && c.radius.is_finite()) {
            return Err(ConfigError::invalid("camera.radius", "must be > 0"));
        }
        if !(c.elevation.abs() < 90.0) {
            return Err(ConfigError::invalid("camera.elevation", "must be strictly between -90 and 90"));
        }
        CameraIntrinsics::centered(w, h, c.focal_length).validate().map_err(|e| match e {
            CameraError::Invalid { reason, .. } => ConfigError::invalid("camera.focal_length", reason),
            other => camera_field(other),
        })?;
        crate::camera::interpolate_keyframes(&c.azimuth_keyframes, 0).map_err(camera_field)?;

        match &self.effect {
            Effect::None => {}
            Effect::BulletTime { freeze_frame, azimuth_keyframes } => {
                if *freeze_frame >= self.frames {
                    return Err(ConfigError::invalid("effect.bullet_time.freeze_frame", "must be < frames"));
                }
                crate::camera::interpolate_keyframes(azimuth_keyframes, 0)
                    .map_err(|e| ConfigError::invalid("effect.bullet_time.azimuth_keyframes", e.to_string()))?;
            }
            Effect::Cinemagraph => {
                if self.frames < 2 {
                    return Err(ConfigError::invalid("frames", "cinemagraph needs at least 2 frames"));
                }
            }
        }
        Ok(())
    }

    /// Wind with its seed mixed with the scenario seed.
    pub fn effective_wind(&self) -> WindField {
        WindField { seed: derive_seed(self.seed, self.wind.seed, 2), ..self.wind.clone() }
    }

    /// Stable pretty-printed JSON; parsing it yields an equal config.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
