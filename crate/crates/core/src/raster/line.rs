//! Binary-coverage thick lines and disks.

/// Pixel whose center lies within the stroke, with the stroke parameter
/// `t ∈ [0, 1]` of the nearest point on the centerline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Covered {
    pub x: u32,
    pub y: u32,
    pub t: f64,
}

/// Clips `a → b` to the rectangle `[lo, hi]²` (Liang–Barsky) and returns the
/// surviving parameter range.
fn clip(a: [f64; 2], b: [f64; 2], lo: [f64; 2], hi: [f64; 2]) -> Option<(f64, f64)> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for axis in 0..2 {
        for (p, q) in [(-d[axis], a[axis] - lo[axis]), (d[axis], hi[axis] - a[axis])] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
            }
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

/// Visits every pixel of a `width × height` image whose center is within
/// `half_width` of segment `a → b`, row by row.
pub(crate) fn thick_segment(
    a: [f64; 2],
    b: [f64; 2],
    half_width: f64,
    width: u32,
    height: u32,
    mut visit: impl FnMut(Covered),
) {
    if width == 0 || height == 0 || !(half_width > 0.0) {
        return;
    }
    let margin = half_width + 1.0;
    let lo = [-margin, -margin];
    let hi = [width as f64 + margin, height as f64 + margin];
    let Some((t0, t1)) = clip(a, b, lo, hi) else { return };
    let d = [b[0] - a[0], b[1] - a[1]];
    let ca = [a[0] + d[0] * t0, a[1] + d[1] * t0];
    let cb = [a[0] + d[0] * t1, a[1] + d[1] * t1];

    let x0 = (ca[0].min(cb[0]) - half_width).floor().max(0.0) as u32;
    let y0 = (ca[1].min(cb[1]) - half_width).floor().max(0.0) as u32;
    let x1 = ((ca[0].max(cb[0]) + half_width).ceil().min(width as f64 - 1.0)).max(0.0) as u32;
    let y1 = ((ca[1].max(cb[1]) + half_width).ceil().min(height as f64 - 1.0)).max(0.0) as u32;
    let len2 = d[0] * d[0] + d[1] * d[1];
    let r2 = half_width * half_width;
    for y in y0..=y1 {
        let py = y as f64 + 0.5;
        for x in x0..=x1 {
            let px = x as f64 + 0.5;
            // nearest point on the clipped piece, expressed on the full segment
            let t = if len2 > 0.0 { (((px - a[0]) * d[0] + (py - a[1]) * d[1]) / len2).clamp(t0, t1) } else { 0.0 };
            let nx = a[0] + d[0] * t - px;
            let ny = a[1] + d[1] * t - py;
            if nx * nx + ny * ny <= r2 {
                visit(Covered { x, y, t });
            }
        }
    }
}

/// Visits every pixel whose center lies within `radius` of `c`.
pub(crate) fn disk(c: [f64; 2], radius: f64, width: u32, height: u32, mut visit: impl FnMut(u32, u32)) {
    thick_segment(c, c, radius, width, height, |p| visit(p.x, p.y));
}
