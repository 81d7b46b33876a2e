use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::raster::RasterImage;

#[derive(Debug, Error)]
pub enum PngError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("encode: {0}")]
    Encode(#[from] png::EncodingError),
    #[error("decode: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("unsupported PNG layout: {0}")]
    Unsupported(String),
}

/// 8-bit RGB PNG with pinned filter and compression, so equal images give
/// equal bytes.
pub fn encode_png(image: &RasterImage) -> Result<Vec<u8>, PngError> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, image.width, image.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_deflate_compression(png::DeflateCompression::Level(6));
        enc.set_filter(png::Filter::Up);
        let mut w = enc.write_header()?;
        w.write_image_data(&image.pixels)?;
        w.finish()?;
    }
    Ok(out)
}

/// Decodes 8-bit RGB or RGBA (alpha dropped) PNG data.
pub fn decode_png(bytes: &[u8]) -> Result<RasterImage, PngError> {
    let mut reader = png::Decoder::new(std::io::Cursor::new(bytes)).read_info()?;
    let size = reader.output_buffer_size().ok_or_else(|| PngError::Unsupported("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(PngError::Unsupported(format!("bit depth {:?}", info.bit_depth)));
    }
    buf.truncate(info.buffer_size());
    let pixels = match info.color_type {
        png::ColorType::Rgb => buf,
        png::ColorType::Rgba => buf.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect(),
        png::ColorType::Grayscale => buf.iter().flat_map(|g| [*g; 3]).collect(),
        other => return Err(PngError::Unsupported(format!("color type {other:?}"))),
    };
    RasterImage::from_pixels(info.width, info.height, pixels).map_err(|e| PngError::Unsupported(e.to_string()))
}

pub fn read_png(path: impl AsRef<Path>) -> Result<RasterImage, PngError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| PngError::Io { path: path.to_path_buf(), source })?;
    decode_png(&bytes)
}
