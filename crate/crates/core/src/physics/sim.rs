use rayon::prelude::*;

use crate::hair::{HairModel, HumanRig, Sphere};
use crate::math::{Rigid, Vec3};
use crate::scalar::Real;

use super::{
    eval_head_pose, eval_wind, GeometryFrame, GeometrySequence, HeadMotionScript, PhysicsParams, SimError, WindField,
    STANDARD_GRAVITY,
};

/// Fraction of the constraint displacement fed back into velocity.
const VELOCITY_CORRECTION: f64 = 0.5;

/// Positions and velocities of every strand vertex, strand-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState<T> {
    /// `offsets[i]..offsets[i + 1]` indexes strand `i`.
    pub offsets: Vec<usize>,
    pub positions: Vec<Vec3<T>>,
    pub velocities: Vec<Vec3<T>>,
    /// Seconds.
    pub time: T,
}

impl<T: Real> SimState<T> {
    /// Rest shape carried by `head_frame`, at rest.
    pub fn at_rest(model: &HairModel<T>, head_frame: &Rigid<T>) -> Result<Self, SimError> {
        let mut offsets = Vec::with_capacity(model.strands.len() + 1);
        let mut positions = Vec::with_capacity(model.total_vertices());
        offsets.push(0);
        for s in &model.strands {
            let anchor = s.root_local.as_ref().ok_or(SimError::NotAttached)?;
            positions.extend(anchor.rest.iter().map(|p| head_frame.apply(*p)));
            offsets.push(positions.len());
        }
        let velocities = vec![Vec3::zero(); positions.len()];
        Ok(Self { offsets, positions, velocities, time: T::zero() })
    }

    pub fn strand_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn strand(&self, i: usize) -> &[Vec3<T>] {
        &self.positions[self.offsets[i]..self.offsets[i + 1]]
    }

    fn matches(&self, model: &HairModel<T>) -> bool {
        self.strand_count() == model.strands.len()
            && model.strands.iter().enumerate().all(|(i, s)| self.offsets[i + 1] - self.offsets[i] == s.vertex_count())
            && self.velocities.len() == self.positions.len()
    }
}

/// Constants of one substep, shared by every strand.
struct Substep<T> {
    dt: T,
    inv_mass: T,
    stiffness: T,
    damping_factor: T,
    drag: T,
    gravity_force: Vec3<T>,
    /// Added to each rest target so the groomed shape balances gravity.
    target_offset: Vec3<T>,
    /// Start of the substep, seconds (wind is sampled here).
    time: T,
    frame_prev: Rigid<T>,
    frame_next: Rigid<T>,
    head: Sphere<T>,
}

impl<T: Real> Substep<T> {
    #[allow(clippy::too_many_arguments)]
    fn new(
        params: &PhysicsParams,
        drag: f64,
        gravity: Vec3<T>,
        dt: T,
        time: T,
        frame_prev: Rigid<T>,
        frame_next: Rigid<T>,
        radius: T,
    ) -> Self {
        let mass = T::lit(params.mass);
        let stiffness = T::lit(params.stiffness);
        let gravity_force = gravity * (mass * T::lit(params.gravity_scale));
        let target_offset = if stiffness > T::zero() { -gravity_force / stiffness } else { Vec3::zero() };
        Self {
            dt,
            inv_mass: T::one() / mass,
            stiffness,
            damping_factor: (T::one() - T::lit(params.damping) * dt).max(T::zero()),
            drag: T::lit(drag),
            gravity_force,
            target_offset,
            time,
            frame_prev,
            frame_next,
            head: Sphere::new(frame_next.translation, radius),
        }
    }
}

/// Advances one strand by one substep. Returns `false` on non-finite output.
fn substep_strand<T: Real>(
    pos: &mut [Vec3<T>],
    vel: &mut [Vec3<T>],
    rest_lengths: &[T],
    rest_local: &[Vec3<T>],
    wind: &WindField,
    k: &Substep<T>,
) -> bool {
    let dt = k.dt;
    let inv_dt = T::one() / dt;

    // kinematic root
    let root = k.frame_next.apply(rest_local[0]);
    vel[0] = (root - k.frame_prev.apply(rest_local[0])) * inv_dt;
    pos[0] = root;

    // forces, semi-implicit Euler, damping
    for i in 1..pos.len() {
        let p = pos[i];
        let mut force = k.gravity_force;
        if k.drag > T::zero() {
            force += (eval_wind(wind, p, k.time) - vel[i]) * k.drag;
        }
        if k.stiffness > T::zero() {
            let target = k.frame_next.apply(rest_local[i]) + k.target_offset;
            force += (target - p) * k.stiffness;
        }
        let v = vel[i] + force * (dt * k.inv_mass);
        pos[i] = p + v * dt;
        vel[i] = v * k.damping_factor;
    }

    // follow-the-leader length projection interleaved with head collision
    let correction = T::lit(VELOCITY_CORRECTION) * inv_dt;
    let r = k.head.radius;
    let c = k.head.center;
    for i in 1..pos.len() {
        let prev = pos[i - 1];
        let predicted = pos[i];
        let len = rest_lengths[i - 1];
        let onto_length = |q: Vec3<T>| {
            let dir = (q - prev)
                .try_normalize()
                .unwrap_or_else(|| k.frame_next.apply_vector(rest_local[i] - rest_local[i - 1]).normalize());
            prev + dir * len
        };
        let mut q = onto_length(predicted);
        let collided = (q - c).norm() < r;
        if collided {
            q = surface_at_length(prev, q, len, c, r)
                .unwrap_or_else(|| c + (q - c).try_normalize().unwrap_or(Vec3::unit_y()) * r);
        }
        let mut v = vel[i] + (q - predicted) * correction;
        if collided {
            let n = (q - c).normalize();
            let vn = v.dot(n);
            if vn < T::zero() {
                v -= n * vn;
            }
        }
        pos[i] = q;
        vel[i] = v;
    }
    pos.iter().chain(vel.iter()).all(|v| v.is_finite())
}

/// Point on the head sphere at distance `len` from `prev`, nearest to `q`.
/// `None` when no such point exists.
fn surface_at_length<T: Real>(prev: Vec3<T>, q: Vec3<T>, len: T, c: Vec3<T>, r: T) -> Option<Vec3<T>> {
    let to_center = c - prev;
    let dist = to_center.norm();
    let axis = to_center.try_normalize()?;
    // the two spheres meet on a circle around `axis`
    let along = (len * len + dist * dist - r * r) / (T::lit(2.0) * dist);
    let circle_sq = len * len - along * along;
    if circle_sq < T::zero() {
        return None;
    }
    let rel = q - prev;
    let side = (rel - axis * rel.dot(axis))
        .try_normalize()
        .or_else(|| axis.cross(Vec3::unit_x()).try_normalize())
        .or_else(|| axis.cross(Vec3::unit_y()).try_normalize())?;
    Some(prev + axis * along + side * circle_sq.sqrt())
}

fn split_strands_mut<'a, T>(mut buf: &'a mut [T], offsets: &[usize]) -> Vec<&'a mut [T]> {
    let mut out = Vec::with_capacity(offsets.len().saturating_sub(1));
    for w in offsets.windows(2) {
        let (head, tail) = buf.split_at_mut(w[1] - w[0]);
        out.push(head);
        buf = tail;
    }
    out
}

/// Inputs of a single [`step`].
pub struct StepInputs<'a, T> {
    pub model: &'a HairModel<T>,
    pub rig: &'a HumanRig<T>,
    pub params: &'a PhysicsParams,
    pub wind: &'a WindField,
    /// Unscaled gravitational acceleration, m/s².
    pub gravity: Vec3<T>,
    /// Head motion at the start and end of the substep.
    pub pose_now: Rigid<T>,
    pub pose_next: Rigid<T>,
}

/// One substep of length `1 / (fps · substeps)` over every strand.
pub fn step<T: Real>(state: &SimState<T>, inputs: &StepInputs<'_, T>) -> Result<SimState<T>, SimError> {
    if !state.matches(inputs.model) {
        return Err(SimError::ShapeMismatch);
    }
    let dt = T::lit(inputs.params.dt());
    let k = Substep::new(
        inputs.params,
        inputs.wind.drag_coefficient,
        inputs.gravity,
        dt,
        state.time,
        inputs.rig.head_frame_for(&inputs.pose_now),
        inputs.rig.head_frame_for(&inputs.pose_next),
        inputs.rig.head_sphere.radius,
    );
    let mut next = state.clone();
    next.time = state.time + dt;
    let pos = split_strands_mut(&mut next.positions, &state.offsets);
    let vel = split_strands_mut(&mut next.velocities, &state.offsets);
    for (i, (p, v)) in pos.into_iter().zip(vel).enumerate() {
        let strand = &inputs.model.strands[i];
        let anchor = strand.root_local.as_ref().ok_or(SimError::NotAttached)?;
        if !substep_strand(p, v, &strand.rest_lengths, &anchor.rest, inputs.wind, &k) {
            return Err(SimError::Divergence { frame: 0, substep: 0, strand: i });
        }
    }
    Ok(next)
}

/// Simulates `frame_count` frames starting from the rest shape at t = 0.
///
/// Frame `f` (1-based) is the state at `t = f / fps`, after `substeps`
/// substeps; the head pose recorded with it is the motion at that time.
pub fn simulate<T: Real>(
    model: &HairModel<T>,
    rig: &HumanRig<T>,
    params: &PhysicsParams,
    wind: &WindField,
    motion: &HeadMotionScript,
    frame_count: usize,
) -> Result<GeometrySequence<T>, SimError> {
    let mut frames = Vec::with_capacity(frame_count);
    simulate_frames(model, rig, params, wind, motion, frame_count, |f| {
        frames.push(f);
        Ok(())
    })?;
    let offsets = offsets_of(model);
    Ok(GeometrySequence { offsets, frames })
}

fn offsets_of<T: Real>(model: &HairModel<T>) -> Vec<usize> {
    let mut offsets = vec![0];
    for s in &model.strands {
        offsets.push(offsets.last().unwrap() + s.vertex_count());
    }
    offsets
}

/// Streaming form of [`simulate`]: `sink` receives each frame in order.
pub fn simulate_frames<T: Real>(
    model: &HairModel<T>,
    rig: &HumanRig<T>,
    params: &PhysicsParams,
    wind: &WindField,
    motion: &HeadMotionScript,
    frame_count: usize,
    mut sink: impl FnMut(GeometryFrame<T>) -> Result<(), SimError>,
) -> Result<(), SimError> {
    params.validate()?;
    wind.validate()?;
    motion.validate()?;
    if frame_count < 1 {
        return Err(SimError::EmptySequence);
    }
    if !model.is_attached() {
        return Err(SimError::NotAttached);
    }
    let fps = T::lit(params.fps);
    let substeps = params.substeps;
    let dt = T::lit(params.dt());
    let gravity = Vec3::new(T::zero(), T::lit(-STANDARD_GRAVITY), T::zero());
    let anchors: Vec<&[Vec3<T>]> = model
        .strands
        .iter()
        .map(|s| s.root_local.as_ref().map(|a| a.rest.as_slice()).ok_or(SimError::NotAttached))
        .collect::<Result<_, _>>()?;

    let mut state = SimState::at_rest(model, &rig.head_frame_for(&eval_head_pose(motion, T::zero())))?;
    for frame in 1..=frame_count {
        let base = T::from_usize_lossy(frame - 1);
        // substep k ends at ((frame - 1) + k / substeps) / fps; k = substeps lands exactly on frame / fps
        let time_at = |k: usize| (base + T::from_usize_lossy(k) / T::from_usize_lossy(substeps)) / fps;
        let frames: Vec<Rigid<T>> =
            (0..=substeps).map(|k| rig.head_frame_for(&eval_head_pose(motion, time_at(k)))).collect();
        let kernels: Vec<Substep<T>> = (1..=substeps)
            .map(|k| {
                Substep::new(
                    params,
                    wind.drag_coefficient,
                    gravity,
                    dt,
                    time_at(k - 1),
                    frames[k - 1],
                    frames[k],
                    rig.head_sphere.radius,
                )
            })
            .collect();

        let pos = split_strands_mut(&mut state.positions, &state.offsets);
        let vel = split_strands_mut(&mut state.velocities, &state.offsets);
        let failure = pos
            .into_par_iter()
            .zip(vel)
            .enumerate()
            .filter_map(|(i, (p, v))| {
                let strand = &model.strands[i];
                kernels.iter().enumerate().find_map(|(k, kernel)| {
                    (!substep_strand(p, v, &strand.rest_lengths, anchors[i], wind, kernel)).then_some((i, k + 1))
                })
            })
            .min();
        if let Some((strand, substep)) = failure {
            return Err(SimError::Divergence { frame, substep, strand });
        }
        state.time = time_at(substeps);
        sink(GeometryFrame {
            positions: state.positions.clone(),
            head_pose: eval_head_pose(motion, state.time),
            time: state.time,
        })?;
    }
    Ok(())
}
