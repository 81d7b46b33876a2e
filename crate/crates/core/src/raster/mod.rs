//! Control-image rendering: strand-direction map, skeleton map, hair mask
//! and their per-pixel composition.

mod line;
mod mask;
mod pose_map;
mod strand_map;

pub use mask::compute_hair_mask;
pub use pose_map::{rasterize_pose_map, PALETTE};
pub use strand_map::{direction_color, rasterize_strand_map};

use rayon::prelude::*;
use thiserror::Error;

use crate::camera::{project_frame, CameraTrajectory, ProjectedFrame};
use crate::hair::HumanRig;
use crate::physics::GeometrySequence;
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum RasterError {
    #[error("image dimensions differ: {a:?} vs {b:?}")]
    DimensionMismatch { a: (u32, u32), b: (u32, u32) },
    #[error("geometry has {geometry} frames but the camera trajectory has {camera}")]
    LengthMismatch { geometry: usize, camera: usize },
    #[error("pixel buffer has {len} bytes, expected {expected}")]
    BufferSize { len: usize, expected: usize },
}

/// Output size in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub width: u32,
    pub height: u32,
}

impl Dims {
    pub const fn new(width: u32, height: u32) -> Self {
        Self { width, height }
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Stroke scale relative to the 832×480 reference.
    pub fn stroke_scale(&self) -> f64 {
        (self.width as f64 / 832.0).min(self.height as f64 / 480.0)
    }
}

/// Row-major 8-bit RGB.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl RasterImage {
    pub fn black(dims: Dims) -> Self {
        Self { width: dims.width, height: dims.height, pixels: vec![0; dims.pixel_count() * 3] }
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, RasterError> {
        let expected = width as usize * height as usize * 3;
        if pixels.len() != expected {
            return Err(RasterError::BufferSize { len: pixels.len(), expected });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.width, self.height)
    }

    fn index(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * 3
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = self.index(x, y);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = self.index(x, y);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn pixels_rgb(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.pixels.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }
}

/// Per-pixel nearest strand depth (camera z, meters); `+∞` where uncovered.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthBuffer {
    pub width: u32,
    pub height: u32,
    pub depth: Vec<f32>,
}

impl DepthBuffer {
    pub fn empty(dims: Dims) -> Self {
        Self { width: dims.width, height: dims.height, depth: vec![f32::INFINITY; dims.pixel_count()] }
    }

    pub fn at(&self, x: u32, y: u32) -> f32 {
        self.depth[y as usize * self.width as usize + x as usize]
    }
}

/// Row-major binary mask; `true` marks hair pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HairMask {
    pub width: u32,
    pub height: u32,
    pub bits: Vec<bool>,
}

impl HairMask {
    pub fn filled(dims: Dims, value: bool) -> Self {
        Self { width: dims.width, height: dims.height, bits: vec![value; dims.pixel_count()] }
    }

    pub fn at(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlFrame {
    pub image: RasterImage,
    /// Position within its sequence, from 0.
    pub frame_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSequence {
    pub frames: Vec<ControlFrame>,
    pub resolution: Dims,
    pub fps: f64,
}

impl ControlSequence {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Rebuilds from images, numbering frames in order.
    pub fn from_images(images: Vec<RasterImage>, resolution: Dims, fps: f64) -> Self {
        let frames =
            images.into_iter().enumerate().map(|(frame_index, image)| ControlFrame { image, frame_index }).collect();
        Self { frames, resolution, fps }
    }
}

/// Picks the strand pixel where the mask is set and the pose pixel elsewhere.
pub fn compose_control(
    strand: &RasterImage,
    pose: &RasterImage,
    mask: &HairMask,
    frame_index: usize,
) -> Result<ControlFrame, RasterError> {
    let dims = strand.dims();
    for other in [pose.dims(), Dims::new(mask.width, mask.height)] {
        if other != dims {
            return Err(RasterError::DimensionMismatch {
                a: (dims.width, dims.height),
                b: (other.width, other.height),
            });
        }
    }
    let mut out = pose.clone();
    for ((dst, src), hair) in out.pixels.chunks_exact_mut(3).zip(strand.pixels.chunks_exact(3)).zip(&mask.bits) {
        if *hair {
            dst.copy_from_slice(src);
        }
    }
    Ok(ControlFrame { image: out, frame_index })
}

/// All four passes for one projected frame.
pub fn render_control_frame(pf: &ProjectedFrame, dims: Dims, frame_index: usize) -> ControlFrame {
    let (strand, depth) = rasterize_strand_map(pf, dims);
    let pose = rasterize_pose_map(pf, dims);
    let mask = compute_hair_mask(&depth, pf, dims);
    compose_control(&strand, &pose, &mask, frame_index).expect("passes share dimensions")
}

/// Projects and renders every frame of `seq` along `traj`.
///
/// Frames are rendered in parallel; the result does not depend on the
/// thread count.
pub fn extract_control_sequence<T: Real>(
    seq: &GeometrySequence<T>,
    rig: &HumanRig<T>,
    traj: &CameraTrajectory<T>,
    fps: f64,
) -> Result<ControlSequence, RasterError> {
    if seq.len() != traj.len() {
        return Err(RasterError::LengthMismatch { geometry: seq.len(), camera: traj.len() });
    }
    let intr = traj.intrinsics;
    let dims = Dims::new(intr.width, intr.height);
    let frames = seq
        .frames
        .par_iter()
        .zip(&traj.poses)
        .enumerate()
        .map(|(i, (frame, pose))| {
            let pf = project_frame(&seq.offsets, frame, rig, pose, &intr);
            render_control_frame(&pf, dims, i)
        })
        .collect();
    Ok(ControlSequence { frames, resolution: dims, fps })
}
