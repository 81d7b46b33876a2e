//! HSTR v1 strand files.
//!
//! Little-endian layout: magic `HSTR`, `u32` version (1), `u32` strand count,
//! `f32 × 4` scalp `(cx, cy, cz, r)`, then per strand a `u32` vertex count,
//! `vertex_count × 3` `f32` positions and `vertex_count − 1` `f32` rest
//! lengths. Every float must be finite.

use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::bytes::Reader;
use crate::math::Vec3;
use crate::scalar::Real;

use super::{HairModel, Sphere, Strand};

pub const MAGIC: &[u8; 4] = b"HSTR";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic at byte {offset}")]
    BadMagic { offset: u64 },
    #[error("unsupported version {version} at byte {offset}")]
    Version { offset: u64, version: u32 },
    #[error("truncated payload at byte {offset}: needed {needed} more bytes")]
    Truncated { offset: u64, needed: u64 },
    #[error("non-finite value at byte {offset}")]
    NonFinite { offset: u64 },
    #[error("invalid content at byte {offset}: {reason}")]
    Invalid { offset: u64, reason: String },
    #[error("trailing data at byte {offset}")]
    Trailing { offset: u64 },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl From<crate::bytes::ReadError> for FormatError {
    fn from(e: crate::bytes::ReadError) -> Self {
        match e {
            crate::bytes::ReadError::Truncated { offset, needed } => Self::Truncated { offset, needed },
            crate::bytes::ReadError::NonFinite { offset } => Self::NonFinite { offset },
        }
    }
}

/// Serializes `model` to HSTR bytes. Coordinates are stored as `f32`.
pub fn write_strands<T: Real, W: Write>(model: &HairModel<T>, mut w: W) -> io::Result<()> {
    let f = |v: T| v.as_f32().to_le_bytes();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(model.strands.len() as u32).to_le_bytes())?;
    for v in [model.scalp.center.x, model.scalp.center.y, model.scalp.center.z, model.scalp.radius] {
        w.write_all(&f(v))?;
    }
    for s in &model.strands {
        w.write_all(&(s.vertices.len() as u32).to_le_bytes())?;
        for p in &s.vertices {
            w.write_all(&f(p.x))?;
            w.write_all(&f(p.y))?;
            w.write_all(&f(p.z))?;
        }
        for l in &s.rest_lengths {
            w.write_all(&f(*l))?;
        }
    }
    Ok(())
}

pub fn read_strands<T: Real>(bytes: &[u8]) -> Result<HairModel<T>, FormatError> {
    let mut r = Reader::new(bytes);
    let magic = r.take(4)?;
    if magic != MAGIC {
        return Err(FormatError::BadMagic { offset: 0 });
    }
    let at = r.offset();
    let version = r.u32()?;
    if version != VERSION {
        return Err(FormatError::Version { offset: at, version });
    }
    let count = r.u32()? as usize;
    let center = Vec3::new(r.finite_f32()?, r.finite_f32()?, r.finite_f32()?);
    let at = r.offset();
    let radius = r.finite_f32()?;
    if !(radius > 0.0) {
        return Err(FormatError::Invalid { offset: at, reason: "scalp radius must be > 0".into() });
    }
    let mut strands = Vec::with_capacity(count.min(bytes.len() / 4));
    for _ in 0..count {
        let at = r.offset();
        let n = r.u32()? as usize;
        if n < 2 {
            return Err(FormatError::Invalid { offset: at, reason: format!("strand with {n} vertices") });
        }
        let mut vertices = Vec::with_capacity(n.min(bytes.len() / 12));
        for _ in 0..n {
            let p = Vec3::new(r.finite_f32()?, r.finite_f32()?, r.finite_f32()?);
            vertices.push(p.cast::<T>());
        }
        let mut rest_lengths = Vec::with_capacity(n - 1);
        for _ in 0..n - 1 {
            let at = r.offset();
            let l = r.finite_f32()?;
            if !(l > 0.0) {
                return Err(FormatError::Invalid { offset: at, reason: "rest length must be > 0".into() });
            }
            rest_lengths.push(T::lit(l as f64));
        }
        strands.push(Strand { vertices, rest_lengths, root_local: None });
    }
    if r.remaining() != 0 {
        return Err(FormatError::Trailing { offset: r.offset() });
    }
    let model = HairModel { strands, scalp: Sphere::new(center.cast(), T::lit(radius as f64)) };
    if model.strands.is_empty() {
        return Err(FormatError::Invalid { offset: 8, reason: "strand count must be >= 1".into() });
    }
    Ok(model)
}

pub fn save_strands<T: Real>(model: &HairModel<T>, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    let io_err = |source| FormatError::Io { path: path.display().to_string(), source };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = io::BufWriter::new(file);
    write_strands(model, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub fn load_strands<T: Real>(path: impl AsRef<Path>) -> Result<HairModel<T>, FormatError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    read_strands(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hair::{generate_wig, HumanRig, WigSpec};
    use proptest::prelude::*;

    fn small_wig() -> HairModel<f32> {
        let spec = WigSpec { strand_count: 20, segments_per_strand: 6, curl: 0.2, ..Default::default() };
        generate_wig(&spec, &HumanRig::canonical(0.1, [0.0; 3])).unwrap()
    }

    fn encode(m: &HairModel<f32>) -> Vec<u8> {
        let mut buf = Vec::new();
        write_strands(m, &mut buf).unwrap();
        buf
    }

    #[test]
    fn roundtrip_generated_wig() {
        let m = small_wig();
        let back: HairModel<f32> = read_strands(&encode(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn wrong_magic() {
        let mut bytes = encode(&small_wig());
        bytes[0] = b'X';
        assert!(matches!(read_strands::<f32>(&bytes), Err(FormatError::BadMagic { offset: 0 })));
    }

    #[test]
    fn declared_two_strands_with_one_present() {
        let mut m = small_wig();
        m.strands.truncate(1);
        let mut bytes = encode(&m);
        bytes[8..12].copy_from_slice(&2u32.to_le_bytes());
        let err = read_strands::<f32>(&bytes).unwrap_err();
        match err {
            FormatError::Truncated { offset, .. } => assert_eq!(offset as usize, bytes.len()),
            other => panic!("expected truncation, got {other}"),
        }
    }

    #[test]
    fn non_finite_coordinate_reports_offset() {
        let mut bytes = encode(&small_wig());
        // first vertex x of strand 0: header 12 + scalp 16 + count 4
        bytes[32..36].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(read_strands::<f32>(&bytes), Err(FormatError::NonFinite { offset: 32 })));
    }

    fn arb_model() -> impl Strategy<Value = HairModel<f32>> {
        let strand = (2usize..6).prop_flat_map(|n| {
            (
                prop::collection::vec(prop::array::uniform3(-10.0f32..10.0), n),
                prop::collection::vec(1e-4f32..1.0, n - 1),
            )
        });
        (prop::collection::vec(strand, 1..5), prop::array::uniform3(-1.0f32..1.0), 0.01f32..1.0).prop_map(
            |(strands, c, r)| HairModel {
                strands: strands
                    .into_iter()
                    .map(|(v, l)| Strand {
                        vertices: v.into_iter().map(Vec3::from).collect(),
                        rest_lengths: l,
                        root_local: None,
                    })
                    .collect(),
                scalp: Sphere::new(Vec3::from(c), r),
            },
        )
    }

    proptest! {
        #[test]
        fn save_load_identity(m in arb_model()) {
            let back: HairModel<f32> = read_strands(&encode(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
