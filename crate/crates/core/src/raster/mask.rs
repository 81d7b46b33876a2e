use crate::camera::ProjectedFrame;

use super::{DepthBuffer, Dims, HairMask};

/// Marks pixels where a strand is the nearest surface.
///
/// A covered pixel stays hair unless a body proxy is hit along the same
/// pixel-center ray at a depth no greater than the strand's.
pub fn compute_hair_mask(strand_depth: &DepthBuffer, pf: &ProjectedFrame, dims: Dims) -> HairMask {
    let mut mask = HairMask::filled(dims, false);
    let w = dims.width;
    for (i, z) in strand_depth.depth.iter().enumerate() {
        if !z.is_finite() {
            continue;
        }
        let (x, y) = ((i % w as usize) as u32, (i / w as usize) as u32);
        let ray = pf.pixel_ray(x, y);
        let hidden = pf
            .proxies
            .iter()
            .any(|p| p.bounds.is_some_and(|b| b.contains(x, y)) && p.depth_along(ray).is_some_and(|d| d <= *z as f64));
        mask.bits[i] = !hidden;
    }
    mask
}
