//! Scenario description and the end-to-end pipeline with its effects.

mod config;

pub use config::{derive_seed, CameraSpec, ConfigError, Effect, RigParams, ScenarioConfig, WigSource};

use thiserror::Error;

use crate::camera::{orbit_trajectory, CameraError, CameraIntrinsics, CameraTrajectory};
use crate::hair::{attach_to_scalp, generate_wig, load_strands, FormatError, HairError, HairModel, HumanRig};
use crate::math::Vec3;
use crate::physics::{freeze_geometry, simulate, GeometrySequence, SimError};
use crate::raster::{extract_control_sequence, ControlSequence, RasterError};

/// Pipeline failure, tagged with the stage that raised it.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("hair: {0}")]
    Hair(#[from] HairError),
    #[error("hair: {0}")]
    StrandFile(#[from] FormatError),
    #[error("simulate: {0}")]
    Sim(#[from] SimError),
    #[error("camera: {0}")]
    Camera(#[from] CameraError),
    #[error("render: {0}")]
    Raster(#[from] RasterError),
    #[error("effect: {0}")]
    Effect(String),
}

impl PipelineError {
    pub fn stage(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Hair(_) | Self::StrandFile(_) => "hair",
            Self::Sim(_) => "simulate",
            Self::Camera(_) => "camera",
            Self::Raster(_) => "render",
            Self::Effect(_) => "effect",
        }
    }
}

/// Rig and attached wig described by `cfg`.
pub fn build_subject(cfg: &ScenarioConfig) -> Result<(HumanRig<f64>, HairModel<f64>), PipelineError> {
    let rig = HumanRig::canonical(cfg.rig.head_radius, cfg.rig.origin);
    rig.validate()?;
    let model = match &cfg.wig {
        WigSource::Generate(spec) => {
            let spec = crate::hair::WigSpec { seed: derive_seed(cfg.seed, spec.seed, 1), ..spec.clone() };
            generate_wig(&spec, &rig)?
        }
        WigSource::File(path) => load_strands(path)?,
    };
    let model = attach_to_scalp(&model, &rig)?;
    Ok((rig, model))
}

/// Camera intrinsics for the configured resolution and focal length.
pub fn intrinsics(cfg: &ScenarioConfig) -> CameraIntrinsics {
    CameraIntrinsics::centered(cfg.resolution[0], cfg.resolution[1], cfg.camera.focal_length)
}

/// Per-frame cameras orbiting the configured target.
pub fn camera_trajectory(
    cfg: &ScenarioConfig,
    azimuth_keyframes: &[(usize, f64)],
    frames: usize,
) -> Result<CameraTrajectory<f64>, PipelineError> {
    let c = &cfg.camera;
    Ok(orbit_trajectory(Vec3::from(c.target), c.radius, c.elevation, azimuth_keyframes, frames, intrinsics(cfg))?)
}

/// Runs simulation for `cfg.frames` frames (or fewer, see [`Effect`]).
pub fn simulate_scenario(cfg: &ScenarioConfig) -> Result<GeometrySequence<f64>, PipelineError> {
    cfg.validate()?;
    let (rig, model) = build_subject(cfg)?;
    let frames = match cfg.effect {
        Effect::BulletTime { freeze_frame, .. } => freeze_frame + 1,
        _ => cfg.frames,
    };
    Ok(simulate(&model, &rig, &cfg.physics, &cfg.effective_wind(), &cfg.motion, frames)?)
}

/// Renders geometry frames along the scenario camera.
pub fn render_geometry(cfg: &ScenarioConfig, seq: &GeometrySequence<f64>) -> Result<ControlSequence, PipelineError> {
    let rig = HumanRig::canonical(cfg.rig.head_radius, cfg.rig.origin);
    let keys = match &cfg.effect {
        Effect::BulletTime { azimuth_keyframes, .. } => azimuth_keyframes,
        _ => &cfg.camera.azimuth_keyframes,
    };
    let traj = camera_trajectory(cfg, keys, seq.len())?;
    Ok(extract_control_sequence(seq, &rig, &traj, cfg.physics.fps)?)
}

/// Simulates, renders and applies the configured effect.
pub fn run_pipeline(cfg: &ScenarioConfig) -> Result<(GeometrySequence<f64>, ControlSequence), PipelineError> {
    let simulated = simulate_scenario(cfg)?;
    match &cfg.effect {
        Effect::None => {
            let control = render_geometry(cfg, &simulated)?;
            Ok((simulated, control))
        }
        Effect::BulletTime { freeze_frame, azimuth_keyframes } => {
            let control = bullet_time_from(cfg, &simulated, *freeze_frame, azimuth_keyframes)?;
            let geometry = frozen_clip(&simulated, *freeze_frame, cfg.frames)?;
            Ok((geometry, control))
        }
        Effect::Cinemagraph => {
            let control = render_geometry(cfg, &simulated)?;
            Ok((simulated, cinemagraph_loop(&control)?))
        }
    }
}

/// Frames `0..freeze_frame` as simulated, then copies of `freeze_frame`.
fn frozen_clip(
    seq: &GeometrySequence<f64>,
    freeze_frame: usize,
    total: usize,
) -> Result<GeometrySequence<f64>, PipelineError> {
    let tail = freeze_geometry(seq, freeze_frame, total - freeze_frame)?;
    let mut frames = seq.frames[..freeze_frame].to_vec();
    frames.extend(tail.frames);
    Ok(GeometrySequence { offsets: seq.offsets.clone(), frames })
}

fn bullet_time_from(
    cfg: &ScenarioConfig,
    simulated: &GeometrySequence<f64>,
    freeze_frame: usize,
    azimuth_keyframes: &[(usize, f64)],
) -> Result<ControlSequence, PipelineError> {
    if freeze_frame >= cfg.frames {
        return Err(SimError::IndexOutOfRange { index: freeze_frame, len: cfg.frames }.into());
    }
    let clip = frozen_clip(simulated, freeze_frame, cfg.frames)?;
    let rig = HumanRig::canonical(cfg.rig.head_radius, cfg.rig.origin);
    let traj = camera_trajectory(cfg, azimuth_keyframes, cfg.frames)?;
    Ok(extract_control_sequence(&clip, &rig, &traj, cfg.physics.fps)?)
}

/// Simulates up to `freeze_frame`, then holds that geometry while the
/// camera follows `azimuth_keyframes` for the rest of the clip.
pub fn bullet_time(
    cfg: &ScenarioConfig,
    freeze_frame: usize,
    azimuth_keyframes: &[(usize, f64)],
) -> Result<ControlSequence, PipelineError> {
    let cfg = ScenarioConfig {
        effect: Effect::BulletTime { freeze_frame, azimuth_keyframes: azimuth_keyframes.to_vec() },
        ..cfg.clone()
    };
    let simulated = simulate_scenario(&cfg)?;
    bullet_time_from(&cfg, &simulated, freeze_frame, azimuth_keyframes)
}

/// Demo sweep for a `frames`-long clip: hold at the middle frame, turn the
/// camera 20° toward the subject's right, then 40° back to the left.
pub fn default_sweep(frames: usize) -> (usize, Vec<(usize, f64)>) {
    let last = frames.saturating_sub(1);
    let freeze = last / 2;
    let turn = freeze + (last - freeze) / 2;
    let mut keys = vec![(0, 0.0), (freeze, 0.0), (turn, 20.0), (last, -20.0)];
    keys.dedup_by_key(|k| k.0);
    (freeze, keys)
}

/// Appends the reversed interior: `f1..fT, f(T-1)..f2`.
pub fn cinemagraph_loop(seq: &ControlSequence) -> Result<ControlSequence, PipelineError> {
    let t = seq.len();
    if t < 2 {
        return Err(PipelineError::Effect(format!("cinemagraph needs at least 2 frames, got {t}")));
    }
    let images = seq.frames.iter().chain(seq.frames[1..t - 1].iter().rev()).map(|f| f.image.clone()).collect();
    Ok(ControlSequence::from_images(images, seq.resolution, seq.fps))
}
