use std::fs;
use std::hash::Hasher;
use std::io::Write;
use std::path::{Path, PathBuf};

use fnv::FnvHasher;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::physics::{write_hseq, GeometrySequence};
use crate::raster::ControlSequence;
use crate::scenario::ScenarioConfig;

use super::png_io::{encode_png, PngError};

pub const MANIFEST_VERSION: u32 = 1;
const MANIFEST_FILE: &str = "manifest.json";
const SCENARIO_FILE: &str = "scenario.json";
const GEOMETRY_FILE: &str = "geometry.hseq";

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Png(#[from] PngError),
    #[error("{path}: malformed manifest: {source}")]
    Manifest { path: PathBuf, source: serde_json::Error },
    #[error("manifest lists {manifest} frames but {on_disk} frame files are present")]
    CountMismatch { manifest: usize, on_disk: usize },
    #[error("{file}: content hash {actual} does not match manifest {expected}")]
    HashMismatch { file: String, expected: String, actual: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BundleError + '_ {
    move |source| BundleError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameEntry {
    pub file: String,
    /// FNV-1a 64 of the file bytes, hex.
    pub fnv1a64: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    pub frame_count: usize,
    /// FNV-1a 64 of the canonical scenario JSON, hex.
    pub scenario_hash: Option<String>,
    pub reference_present: bool,
    pub reference_file: Option<String>,
    pub reference_fnv1a64: Option<String>,
    pub geometry_file: Option<String>,
    pub frames: Vec<FrameEntry>,
}

/// Files of an exported bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlBundle {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

fn fnv_hex(bytes: &[u8]) -> String {
    let mut h = FnvHasher::default();
    h.write(bytes);
    format!("{:016x}", h.finish())
}

/// FNV-1a 64 of the scenario's canonical JSON, hex.
pub fn scenario_hash(cfg: &ScenarioConfig) -> String {
    fnv_hex(cfg.to_canonical_json().as_bytes())
}

fn frame_name(i: usize) -> String {
    format!("frame_{:04}.png", i + 1)
}

fn is_frame_file(name: &str) -> bool {
    name.strip_prefix("frame_")
        .and_then(|r| r.strip_suffix(".png"))
        .is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
}

fn frame_files_on_disk(dir: &Path) -> Result<Vec<PathBuf>, BundleError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        if entry.file_name().to_str().is_some_and(is_frame_file) {
            out.push(entry.path());
        }
    }
    out.sort();
    Ok(out)
}

fn write_durable(path: &Path, bytes: &[u8]) -> Result<(), BundleError> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(bytes).map_err(io_err(path))?;
    f.sync_all().map_err(io_err(path))
}

/// Writes `frame_0001.png`, ... in parallel, replacing any older frame files.
fn write_frames(seq: &ControlSequence, dir: &Path) -> Result<Vec<FrameEntry>, BundleError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for stale in frame_files_on_disk(dir)? {
        fs::remove_file(&stale).map_err(io_err(&stale))?;
    }
    seq.frames
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let bytes = encode_png(&f.image)?;
            let file = frame_name(i);
            write_durable(&dir.join(&file), &bytes)?;
            Ok(FrameEntry { file, fnv1a64: fnv_hex(&bytes) })
        })
        .collect()
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), BundleError> {
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    write_durable(&path, text.as_bytes())
}

fn base_manifest(seq: &ControlSequence, frames: Vec<FrameEntry>) -> Manifest {
    Manifest {
        format_version: MANIFEST_VERSION,
        width: seq.resolution.width,
        height: seq.resolution.height,
        fps: seq.fps,
        frame_count: frames.len(),
        scenario_hash: None,
        reference_present: false,
        reference_file: None,
        reference_fnv1a64: None,
        geometry_file: None,
        frames,
    }
}

/// Writes the frames as PNGs plus `manifest.json` (written last).
pub fn export_frames(seq: &ControlSequence, dir: impl AsRef<Path>) -> Result<Manifest, BundleError> {
    let dir = dir.as_ref();
    let manifest = base_manifest(seq, write_frames(seq, dir)?);
    write_manifest(dir, &manifest)?;
    Ok(manifest)
}

/// Frames, canonical scenario, optional geometry dump and reference image.
pub fn export_bundle(
    seq: &ControlSequence,
    scenario: &ScenarioConfig,
    geometry: Option<&GeometrySequence<f64>>,
    dir: impl AsRef<Path>,
) -> Result<ControlBundle, BundleError> {
    let dir = dir.as_ref();
    let mut manifest = base_manifest(seq, write_frames(seq, dir)?);
    manifest.scenario_hash = Some(scenario_hash(scenario));
    write_durable(&dir.join(SCENARIO_FILE), scenario.to_canonical_json().as_bytes())?;

    if let Some(geom) = geometry {
        let path = dir.join(GEOMETRY_FILE);
        let mut buf = Vec::new();
        write_hseq(geom, &mut buf).map_err(io_err(&path))?;
        write_durable(&path, &buf)?;
        manifest.geometry_file = Some(GEOMETRY_FILE.into());
    }
    if let Some(src) = &scenario.reference_image {
        let bytes = fs::read(src).map_err(io_err(src))?;
        let ext = src.extension().and_then(|e| e.to_str()).unwrap_or("bin");
        let name = format!("reference.{ext}");
        write_durable(&dir.join(&name), &bytes)?;
        manifest.reference_present = true;
        manifest.reference_file = Some(name);
        manifest.reference_fnv1a64 = Some(fnv_hex(&bytes));
    }
    write_manifest(dir, &manifest)?;
    Ok(ControlBundle { dir: dir.to_path_buf(), manifest })
}

/// Checks frame count and every recorded content hash.
pub fn verify_bundle(dir: impl AsRef<Path>) -> Result<Manifest, BundleError> {
    let dir = dir.as_ref();
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read(&path).map_err(io_err(&path))?;
    let manifest: Manifest =
        serde_json::from_slice(&text).map_err(|source| BundleError::Manifest { path: path.clone(), source })?;
    let on_disk = frame_files_on_disk(dir)?.len();
    if on_disk != manifest.frame_count || manifest.frames.len() != manifest.frame_count {
        return Err(BundleError::CountMismatch { manifest: manifest.frame_count, on_disk });
    }
    let check = |file: &str, expected: &str| -> Result<(), BundleError> {
        let p = dir.join(file);
        let bytes = fs::read(&p).map_err(io_err(&p))?;
        let actual = fnv_hex(&bytes);
        if actual != expected {
            return Err(BundleError::HashMismatch { file: file.into(), expected: expected.into(), actual });
        }
        Ok(())
    };
    for f in &manifest.frames {
        check(&f.file, &f.fnv1a64)?;
    }
    if let (Some(file), Some(hash)) = (&manifest.reference_file, &manifest.reference_fnv1a64) {
        check(file, hash)?;
    }
    Ok(manifest)
}
