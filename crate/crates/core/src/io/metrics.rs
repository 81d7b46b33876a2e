use thiserror::Error;

use crate::raster::RasterImage;

/// Reported PSNR for identical images, dB.
pub const PSNR_CAP: f64 = 99.0;

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const PEAK: f64 = 255.0;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("image dimensions differ: {a:?} vs {b:?}")]
    DimensionMismatch { a: (u32, u32), b: (u32, u32) },
    #[error("image {width}x{height} is smaller than the {WINDOW}x{WINDOW} window")]
    TooSmall { width: u32, height: u32 },
}

fn same_dims(a: &RasterImage, b: &RasterImage) -> Result<(), MetricError> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(MetricError::DimensionMismatch { a: (a.width, a.height), b: (b.width, b.height) });
    }
    Ok(())
}

/// Peak signal-to-noise ratio over all channels, capped at [`PSNR_CAP`].
pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<f64, MetricError> {
    same_dims(a, b)?;
    let sum: u64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(x, y)| {
            let d = (*x as i64 - *y as i64).unsigned_abs();
            d * d
        })
        .sum();
    if sum == 0 || a.pixels.is_empty() {
        return Ok(PSNR_CAP);
    }
    let mse = sum as f64 / a.pixels.len() as f64;
    Ok((10.0 * (PEAK * PEAK / mse).log10()).min(PSNR_CAP))
}

fn luma(img: &RasterImage) -> Vec<f64> {
    img.pixels.chunks_exact(3).map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64).collect()
}

fn gaussian_kernel() -> [f64; WINDOW] {
    let mut k = [0.0; WINDOW];
    let c = (WINDOW / 2) as f64;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-(d * d) / (2.0 * SIGMA * SIGMA)).exp();
    }
    let s: f64 = k.iter().sum();
    k.map(|v| v / s)
}

/// Valid-region Gaussian blur: output is `(w - 10) × (h - 10)`.
fn blur_valid(src: &[f64], w: usize, h: usize, k: &[f64; WINDOW]) -> Vec<f64> {
    let ow = w - WINDOW + 1;
    let oh = h - WINDOW + 1;
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        let line = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = k.iter().zip(&line[x..x + WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = k.iter().enumerate().map(|(i, kv)| kv * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// Mean single-scale SSIM of the Rec.601 luma over every full 11×11
/// Gaussian window (σ = 1.5).
pub fn ssim(a: &RasterImage, b: &RasterImage) -> Result<f64, MetricError> {
    same_dims(a, b)?;
    let (w, h) = (a.width as usize, a.height as usize);
    if w < WINDOW || h < WINDOW {
        return Err(MetricError::TooSmall { width: a.width, height: a.height });
    }
    let k = gaussian_kernel();
    let x = luma(a);
    let y = luma(b);
    let sq = |v: &[f64]| v.iter().map(|p| p * p).collect::<Vec<_>>();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();
    let mx = blur_valid(&x, w, h, &k);
    let my = blur_valid(&y, w, h, &k);
    let sxx = blur_valid(&sq(&x), w, h, &k);
    let syy = blur_valid(&sq(&y), w, h, &k);
    let sxy = blur_valid(&xy, w, h, &k);
    let c1 = (K1 * PEAK).powi(2);
    let c2 = (K2 * PEAK).powi(2);
    let total: f64 = (0..mx.len())
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = sxx[i] - ux * ux;
            let vy = syy[i] - uy * uy;
            let cov = sxy[i] - ux * uy;
            ((2.0 * ux * uy + c1) * (2.0 * cov + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / mx.len() as f64)
}
