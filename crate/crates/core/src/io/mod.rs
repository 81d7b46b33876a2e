//! Scenario files, PNG frame bundles and image-similarity metrics.

mod bundle;
mod metrics;
mod png_io;

pub use bundle::{
    export_bundle, export_frames, scenario_hash, verify_bundle, BundleError, ControlBundle, FrameEntry, Manifest,
    MANIFEST_VERSION,
};
pub use metrics::{psnr, ssim, MetricError, PSNR_CAP};
pub use png_io::{decode_png, encode_png, read_png, PngError};

use std::path::Path;

use crate::scenario::{ConfigError, ScenarioConfig};

/// Parses and validates scenario JSON.
pub fn parse_scenario_str(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        if inner.is_syntax() || inner.is_eof() {
            ConfigError::Syntax { line, column, message: inner.to_string() }
        } else {
            ConfigError::Schema { path, line, column, message: inner.to_string() }
        }
    })?;
    de.end().map_err(|e| ConfigError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads, parses and validates a scenario file.
pub fn parse_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_scenario_str(&text)
}
