//! Per-frame geometry snapshots and the HSEQ v1 dump format.
//!
//! HSEQ layout (little-endian): magic `HSEQ`, `u32` version (1), `u32` frame
//! count, `u32` strand count, `u32` max vertex count; then per frame and per
//! strand a `u32` vertex count followed by `f32 × 3` positions.

use std::hash::Hasher;
use std::io::{self, Write};

use fnv::FnvHasher;
use thiserror::Error;

use crate::bytes::{ReadError, Reader};
use crate::math::{Rigid, Vec3};
use crate::scalar::Real;

use super::{eval_head_pose, HeadMotionScript, SimError};

pub const HSEQ_MAGIC: &[u8; 4] = b"HSEQ";
pub const HSEQ_VERSION: u32 = 1;

/// Hair vertex positions and head motion at one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryFrame<T> {
    pub positions: Vec<Vec3<T>>,
    pub head_pose: Rigid<T>,
    /// Seconds.
    pub time: T,
}

impl<T: Real> GeometryFrame<T> {
    /// FNV-1a over the bit patterns of every position and the head pose.
    pub fn geometry_hash(&self) -> u64 {
        let mut h = FnvHasher::default();
        let mut put = |v: T| h.write_u64(v.as_f64().to_bits());
        for p in &self.positions {
            put(p.x);
            put(p.y);
            put(p.z);
        }
        for row in self.head_pose.rotation.rows {
            put(row.x);
            put(row.y);
            put(row.z);
        }
        put(self.head_pose.translation.x);
        put(self.head_pose.translation.y);
        put(self.head_pose.translation.z);
        h.finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySequence<T> {
    /// `offsets[i]..offsets[i + 1]` indexes strand `i` in each frame.
    pub offsets: Vec<usize>,
    pub frames: Vec<GeometryFrame<T>>,
}

impl<T: Real> GeometrySequence<T> {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn strand_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn strand<'a>(&self, frame: &'a GeometryFrame<T>, i: usize) -> &'a [Vec3<T>] {
        &frame.positions[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn max_vertex_count(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Replaces head poses and times with those of `motion` at `(i + 1) / fps`.
    pub fn with_motion(mut self, motion: &HeadMotionScript, fps: f64) -> Self {
        for (i, f) in self.frames.iter_mut().enumerate() {
            let t = T::from_usize_lossy(i + 1) / T::lit(fps);
            f.head_pose = eval_head_pose(motion, t);
            f.time = t;
        }
        self
    }
}

/// `new_length` copies of frame `at_frame`.
pub fn freeze_geometry<T: Real>(
    seq: &GeometrySequence<T>,
    at_frame: usize,
    new_length: usize,
) -> Result<GeometrySequence<T>, SimError> {
    let frame = seq.frames.get(at_frame).ok_or(SimError::IndexOutOfRange { index: at_frame, len: seq.frames.len() })?;
    if new_length < 1 {
        return Err(SimError::EmptySequence);
    }
    Ok(GeometrySequence { offsets: seq.offsets.clone(), frames: vec![frame.clone(); new_length] })
}

#[derive(Debug, Error)]
pub enum HseqError {
    #[error("bad magic at byte {offset}")]
    BadMagic { offset: u64 },
    #[error("unsupported version {version} at byte {offset}")]
    Version { offset: u64, version: u32 },
    #[error("truncated payload at byte {offset}: needed {needed} more bytes")]
    Truncated { offset: u64, needed: u64 },
    #[error("non-finite value at byte {offset}")]
    NonFinite { offset: u64 },
    #[error("inconsistent layout at byte {offset}: {reason}")]
    Layout { offset: u64, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<ReadError> for HseqError {
    fn from(e: ReadError) -> Self {
        match e {
            ReadError::Truncated { offset, needed } => Self::Truncated { offset, needed },
            ReadError::NonFinite { offset } => Self::NonFinite { offset },
        }
    }
}

pub fn write_hseq<T: Real, W: Write>(seq: &GeometrySequence<T>, mut w: W) -> io::Result<()> {
    w.write_all(HSEQ_MAGIC)?;
    for v in [HSEQ_VERSION, seq.frames.len() as u32, seq.strand_count() as u32, seq.max_vertex_count() as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    for f in &seq.frames {
        for s in seq.offsets.windows(2) {
            w.write_all(&((s[1] - s[0]) as u32).to_le_bytes())?;
            for p in &f.positions[s[0]..s[1]] {
                for c in [p.x, p.y, p.z] {
                    w.write_all(&c.as_f32().to_le_bytes())?;
                }
            }
        }
    }
    Ok(())
}

/// Parses an HSEQ dump. Head poses are identity and times are frame
/// indices; see [`GeometrySequence::with_motion`].
pub fn read_hseq<T: Real>(bytes: &[u8]) -> Result<GeometrySequence<T>, HseqError> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != HSEQ_MAGIC {
        return Err(HseqError::BadMagic { offset: 0 });
    }
    let at = r.offset();
    let version = r.u32()?;
    if version != HSEQ_VERSION {
        return Err(HseqError::Version { offset: at, version });
    }
    let frame_count = r.u32()? as usize;
    let strand_count = r.u32()? as usize;
    let max_vertices = r.u32()? as usize;
    let mut offsets: Option<Vec<usize>> = None;
    let mut frames = Vec::with_capacity(frame_count.min(bytes.len()));
    for fi in 0..frame_count {
        let mut these = vec![0usize];
        let mut positions = Vec::new();
        for _ in 0..strand_count {
            let at = r.offset();
            let n = r.u32()? as usize;
            if n > max_vertices {
                return Err(HseqError::Layout {
                    offset: at,
                    reason: format!("{n} vertices exceeds declared max {max_vertices}"),
                });
            }
            for _ in 0..n {
                let p = Vec3::new(r.finite_f32()?, r.finite_f32()?, r.finite_f32()?);
                positions.push(p.cast::<T>());
            }
            these.push(positions.len());
        }
        match &offsets {
            None => offsets = Some(these),
            Some(o) if *o != these => {
                return Err(HseqError::Layout {
                    offset: r.offset(),
                    reason: format!("frame {fi} strand layout differs from frame 0"),
                })
            }
            Some(_) => {}
        }
        frames.push(GeometryFrame { positions, head_pose: Rigid::identity(), time: T::from_usize_lossy(fi) });
    }
    if r.remaining() != 0 {
        return Err(HseqError::Layout { offset: r.offset(), reason: "trailing bytes".into() });
    }
    let offsets = offsets.unwrap_or_else(|| vec![0; strand_count + 1]);
    Ok(GeometrySequence { offsets, frames })
}
