use crate::camera::ProjectedFrame;

use super::line::thick_segment;
use super::{DepthBuffer, Dims, RasterImage};

/// Line width in pixels at 832×480.
pub const STRAND_LINE_WIDTH: f64 = 2.0;

/// Encodes an image-space unit tangent (x right, y down).
pub fn direction_color(dx: f64, dy: f64) -> [u8; 3] {
    let q = |v: f64| (255.0 * (v + 1.0) / 2.0).round().clamp(0.0, 255.0) as u8;
    [255, q(dx), q(dy)]
}

/// Draws every strand segment root to tip with depth testing.
///
/// A pixel keeps the nearest segment; on equal depth the first drawn
/// (lowest strand, then segment) wins. Segments that project to a point
/// have no direction and are skipped.
pub fn rasterize_strand_map(pf: &ProjectedFrame, dims: Dims) -> (RasterImage, DepthBuffer) {
    let mut image = RasterImage::black(dims);
    let mut depth = DepthBuffer::empty(dims);
    let half = STRAND_LINE_WIDTH * dims.stroke_scale() / 2.0;
    let w = dims.width as usize;
    for pl in &pf.strand_polylines {
        for seg in pl.points.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let (pa, pb) = ([a.x as f64, a.y as f64], [b.x as f64, b.y as f64]);
            let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
            let len = dx.hypot(dy);
            if !(len > 0.0) || !len.is_finite() {
                continue;
            }
            let color = direction_color(dx / len, dy / len);
            let (inv_a, inv_b) = (1.0 / a.depth as f64, 1.0 / b.depth as f64);
            thick_segment(pa, pb, half, dims.width, dims.height, |c| {
                // screen-space linear in 1/z
                let z = (1.0 / (inv_a + (inv_b - inv_a) * c.t)) as f32;
                let i = c.y as usize * w + c.x as usize;
                if z < depth.depth[i] {
                    depth.depth[i] = z;
                    image.pixels[i * 3..i * 3 + 3].copy_from_slice(&color);
                }
            });
        }
    }
    (image, depth)
}
