//! Hair geometry: strands, scalp, the human rig, procedural wigs and the
//! HSTR strand file format.

mod attach;
mod rig;
mod strand_file;
mod wig;

pub use attach::attach_to_scalp;
pub use rig::{joint, Capsule, HumanRig, PosedRig, BONES, HEAD_JOINTS, JOINT_COUNT, JOINT_NAMES};
pub use strand_file::{load_strands, read_strands, save_strands, write_strands, FormatError};
pub use wig::{generate_wig, WigSpec};

use thiserror::Error;

use crate::math::{Rigid, Vec3};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum HairError {
    #[error("invalid wig spec: {field} {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error("invalid hair model: {0}")]
    InvalidModel(String),
    #[error("strand roots not on scalp (indices {indices:?})")]
    Attachment { indices: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere<T> {
    pub center: Vec3<T>,
    pub radius: T,
}

impl<T: Real> Sphere<T> {
    pub fn new(center: Vec3<T>, radius: T) -> Self {
        Self { center, radius }
    }

    /// Signed distance from the surface, negative inside.
    pub fn signed_distance(&self, p: Vec3<T>) -> T {
        p.distance(self.center) - self.radius
    }
}

/// Root anchor and rest shape of a strand in the head's local frame.
///
/// `rest[0]` is the root; `rest[i]` is the groomed rest position of vertex
/// `i`. The head frame maps local points to world.
#[derive(Debug, Clone, PartialEq)]
pub struct RootAnchor<T> {
    pub rest: Vec<Vec3<T>>,
}

impl<T: Real> RootAnchor<T> {
    pub fn root(&self) -> Vec3<T> {
        self.rest[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Strand<T> {
    /// Root first.
    pub vertices: Vec<Vec3<T>>,
    /// One entry per segment.
    pub rest_lengths: Vec<T>,
    /// Populated by [`attach_to_scalp`].
    pub root_local: Option<RootAnchor<T>>,
}

impl<T: Real> Strand<T> {
    pub fn new(vertices: Vec<Vec3<T>>, rest_lengths: Vec<T>) -> Result<Self, HairError> {
        let s = Self { vertices, rest_lengths, root_local: None };
        s.validate()?;
        Ok(s)
    }

    /// Builds a strand whose rest lengths are the current segment lengths.
    pub fn from_polyline(vertices: Vec<Vec3<T>>) -> Result<Self, HairError> {
        let rest = vertices.windows(2).map(|w| w[0].distance(w[1])).collect();
        Self::new(vertices, rest)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn root(&self) -> Vec3<T> {
        self.vertices[0]
    }

    pub fn validate(&self) -> Result<(), HairError> {
        if self.vertices.len() < 2 {
            return Err(HairError::InvalidModel(format!(
                "strand has {} vertices, need at least 2",
                self.vertices.len()
            )));
        }
        if self.rest_lengths.len() + 1 != self.vertices.len() {
            return Err(HairError::InvalidModel(format!(
                "strand has {} vertices but {} rest lengths",
                self.vertices.len(),
                self.rest_lengths.len()
            )));
        }
        if let Some(l) = self.rest_lengths.iter().find(|l| !(**l > T::zero()) || !l.is_finite()) {
            return Err(HairError::InvalidModel(format!("non-positive rest length {l}")));
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(HairError::InvalidModel("non-finite vertex".into()));
        }
        if let Some(anchor) = &self.root_local {
            if anchor.rest.len() != self.vertices.len() {
                return Err(HairError::InvalidModel("root anchor shape mismatch".into()));
            }
        }
        Ok(())
    }
}

/// A set of strands grown from a spherical scalp.
#[derive(Debug, Clone, PartialEq)]
pub struct HairModel<T> {
    pub strands: Vec<Strand<T>>,
    pub scalp: Sphere<T>,
}

/// Roots further than this from the scalp surface make a model invalid.
pub const ROOT_ON_SCALP_TOLERANCE: f64 = 1e-6;

impl<T: Real> HairModel<T> {
    /// Checks the structural invariants. Root placement is only checked to
    /// the looser attachment tolerance because imported files may carry
    /// single-precision roots.
    pub fn validate(&self) -> Result<(), HairError> {
        if !(self.scalp.radius > T::zero()) || !self.scalp.center.is_finite() {
            return Err(HairError::InvalidModel("scalp must have positive radius".into()));
        }
        for (i, s) in self.strands.iter().enumerate() {
            s.validate().map_err(|e| match e {
                HairError::InvalidModel(m) => HairError::InvalidModel(format!("strand {i}: {m}")),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn strand_count(&self) -> usize {
        self.strands.len()
    }

    pub fn max_vertex_count(&self) -> usize {
        self.strands.iter().map(Strand::vertex_count).max().unwrap_or(0)
    }

    pub fn total_vertices(&self) -> usize {
        self.strands.iter().map(Strand::vertex_count).sum()
    }

    pub fn is_attached(&self) -> bool {
        self.strands.iter().all(|s| s.root_local.is_some())
    }

    /// World positions of every strand's rest shape under `head_frame`.
    pub fn rest_positions(&self, head_frame: &Rigid<T>) -> Option<Vec<Vec<Vec3<T>>>> {
        self.strands
            .iter()
            .map(|s| s.root_local.as_ref().map(|a| a.rest.iter().map(|p| head_frame.apply(*p)).collect()))
            .collect()
    }

    pub fn cast<U: Real>(&self) -> HairModel<U> {
        HairModel {
            strands: self
                .strands
                .iter()
                .map(|s| Strand {
                    vertices: s.vertices.iter().map(|v| v.cast()).collect(),
                    rest_lengths: s.rest_lengths.iter().map(|l| U::lit(l.as_f64())).collect(),
                    root_local: s
                        .root_local
                        .as_ref()
                        .map(|a| RootAnchor { rest: a.rest.iter().map(|v| v.cast()).collect() }),
                })
                .collect(),
            scalp: Sphere::new(self.scalp.center.cast(), U::lit(self.scalp.radius.as_f64())),
        }
    }
}
