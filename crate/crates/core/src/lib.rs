//! Physics-driven hair geometry and per-frame control signals.
//!
//! The pipeline grows (or loads) a wig, simulates it under gravity, wind and
//! head motion, projects every frame through a pinhole camera and renders an
//! RGB control image that selects a strand-direction map over hair pixels and
//! an OpenPose-style skeleton elsewhere.
//!
//! Geometry, physics and projection are generic over [`Real`]; the aliases
//! below fix the scalar to `f64`, which the pipeline uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod bytes;
pub mod camera;
pub mod hair;
pub mod io;
pub mod math;
pub mod physics;
pub mod raster;
pub mod scalar;
pub mod scenario;

pub use scalar::Real;

pub type Vec3 = math::Vec3<f64>;
pub type Rigid = math::Rigid<f64>;
pub type HairModel = hair::HairModel<f64>;
pub type HairModel32 = hair::HairModel<f32>;
pub type Strand = hair::Strand<f64>;
pub type HumanRig = hair::HumanRig<f64>;
pub type SimState = physics::SimState<f64>;
pub type GeometrySequence = physics::GeometrySequence<f64>;
pub type GeometrySequence32 = physics::GeometrySequence<f32>;
pub type CameraPose = camera::CameraPose<f64>;
pub type CameraTrajectory = camera::CameraTrajectory<f64>;
