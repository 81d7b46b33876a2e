//! Body occlusion proxies in camera space, with analytic ray depth.

use crate::math::Vec3;

use super::CameraIntrinsics;

/// Inclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl BoundingBox {
    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProxyShape {
    Sphere { center: Vec3<f64>, radius: f64 },
    Capsule { a: Vec3<f64>, b: Vec3<f64>, radius: f64 },
}

/// A camera-space occluder and the pixels it can cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proxy {
    pub shape: ProxyShape,
    /// `None` when the proxy is entirely behind the camera.
    pub bounds: Option<BoundingBox>,
}

impl Proxy {
    pub fn sphere(center: Vec3<f64>, radius: f64, intr: &CameraIntrinsics) -> Self {
        Self { shape: ProxyShape::Sphere { center, radius }, bounds: sphere_bounds(center, radius, intr) }
    }

    pub fn capsule(a: Vec3<f64>, b: Vec3<f64>, radius: f64, intr: &CameraIntrinsics) -> Self {
        let bounds = match (sphere_bounds(a, radius, intr), sphere_bounds(b, radius, intr)) {
            (Some(p), Some(q)) => {
                Some(BoundingBox { x0: p.x0.min(q.x0), y0: p.y0.min(q.y0), x1: p.x1.max(q.x1), y1: p.y1.max(q.y1) })
            }
            // one end behind the camera: its footprint is unbounded
            (Some(_), None) | (None, Some(_)) => Some(full_frame(intr)),
            (None, None) => None,
        };
        Self { shape: ProxyShape::Capsule { a, b, radius }, bounds }
    }

    /// Camera-space depth (z) of the first surface hit along the camera ray
    /// `(dx, dy, 1)`, if any.
    pub fn depth_along(&self, dir: Vec3<f64>) -> Option<f64> {
        let len = dir.norm();
        let rd = dir / len;
        let t = match self.shape {
            ProxyShape::Sphere { center, radius } => ray_sphere(rd, center, radius),
            ProxyShape::Capsule { a, b, radius } => ray_capsule(rd, a, b, radius),
        }?;
        Some(t * rd.z)
    }
}

fn full_frame(intr: &CameraIntrinsics) -> BoundingBox {
    BoundingBox { x0: 0, y0: 0, x1: intr.width - 1, y1: intr.height - 1 }
}

/// Pixel footprint of a camera-space sphere, clamped to the image.
fn sphere_bounds(c: Vec3<f64>, r: f64, intr: &CameraIntrinsics) -> Option<BoundingBox> {
    if c.z + r <= 0.0 {
        return None;
    }
    let denom = c.z * c.z - r * r;
    if c.z <= r || denom <= 1e-12 {
        return Some(full_frame(intr));
    }
    // tangent planes through the camera center bound the silhouette
    let extent = |m: f64| {
        let s = r * (m * m + c.z * c.z - r * r).max(0.0).sqrt();
        ((m * c.z - s) / denom, (m * c.z + s) / denom)
    };
    let (xl, xh) = extent(c.x);
    let (yl, yh) = extent(c.y);
    let px = |n: f64| intr.cx + intr.fx * n;
    let py = |n: f64| intr.cy + intr.fy * n;
    clamp_box(px(xl), py(yl), px(xh), py(yh), intr)
}

fn clamp_box(x0: f64, y0: f64, x1: f64, y1: f64, intr: &CameraIntrinsics) -> Option<BoundingBox> {
    let (w, h) = (intr.width as f64, intr.height as f64);
    if x1 < 0.0 || y1 < 0.0 || x0 >= w || y0 >= h {
        return None;
    }
    Some(BoundingBox {
        x0: x0.floor().max(0.0) as u32,
        y0: y0.floor().max(0.0) as u32,
        x1: x1.ceil().min(w - 1.0) as u32,
        y1: y1.ceil().min(h - 1.0) as u32,
    })
}

/// Smallest positive hit distance of a unit ray from the origin.
fn ray_sphere(rd: Vec3<f64>, c: Vec3<f64>, r: f64) -> Option<f64> {
    let b = rd.dot(c);
    let disc = b * b - (c.norm_squared() - r * r);
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    [b - s, b + s].into_iter().find(|t| *t > 0.0)
}

/// Smallest positive hit distance of a unit ray from the origin against a
/// capsule: the union of the cylinder body and two end spheres.
fn ray_capsule(rd: Vec3<f64>, a: Vec3<f64>, b: Vec3<f64>, r: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut keep = |t: f64| {
        if t > 0.0 && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    };
    let ba = b - a;
    let baba = ba.norm_squared();
    if baba > 0.0 {
        // cylinder body: |(p - a) × axis| = r with the foot of p inside [a, b]
        let axis = ba / baba.sqrt();
        let oa = -a;
        let d_perp = rd - axis * rd.dot(axis);
        let o_perp = oa - axis * oa.dot(axis);
        let qa = d_perp.norm_squared();
        if qa > 1e-15 {
            let qb = d_perp.dot(o_perp);
            let qc = o_perp.norm_squared() - r * r;
            let disc = qb * qb - qa * qc;
            if disc >= 0.0 {
                let s = disc.sqrt();
                for t in [(-qb - s) / qa, (-qb + s) / qa] {
                    let along = (rd * t - a).dot(ba);
                    if along >= 0.0 && along <= baba {
                        keep(t);
                    }
                }
            }
        }
    }
    if let Some(t) = ray_sphere(rd, a, r) {
        keep(t);
    }
    if let Some(t) = ray_sphere(rd, b, r) {
        keep(t);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Signed distance to a capsule, evaluated independently of the ray code.
    fn capsule_sdf(p: Vec3<f64>, a: Vec3<f64>, b: Vec3<f64>, r: f64) -> f64 {
        let pa = p - a;
        let ba = b - a;
        let h = (pa.dot(ba) / ba.norm_squared()).clamp(0.0, 1.0);
        (pa - ba * h).norm() - r
    }

    /// Sphere tracing with tiny steps, then bisection.
    fn march(rd: Vec3<f64>, a: Vec3<f64>, b: Vec3<f64>, r: f64) -> Option<f64> {
        let mut t = 0.0;
        for _ in 0..10_000 {
            let d = capsule_sdf(rd * t, a, b, r);
            if d < 1e-10 {
                return Some(t);
            }
            t += d;
            if t > 100.0 {
                return None;
            }
        }
        None
    }

    #[test]
    fn sphere_depth_on_axis() {
        let intr = CameraIntrinsics::default();
        let p = Proxy::sphere(Vec3::new(0.0, 0.0, 1.2), 0.1, &intr);
        let z = p.depth_along(Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert!((z - 1.1).abs() < 1e-12);
        let bb = p.bounds.unwrap();
        // silhouette half-width: f·r/sqrt(z² − r²)
        let half = 550.0 * 0.1 / (1.2f64 * 1.2 - 0.01).sqrt();
        assert!(bb.x0 as f64 <= 416.0 - half && bb.x1 as f64 >= 416.0 + half);
    }

    #[test]
    fn behind_camera_has_no_bounds() {
        let intr = CameraIntrinsics::default();
        assert_eq!(Proxy::sphere(Vec3::new(0.0, 0.0, -2.0), 0.5, &intr).bounds, None);
    }

    proptest! {
        #[test]
        fn capsule_hits_match_sphere_tracing(
            ax in -0.3..0.3f64, ay in -0.3..0.3f64, az in 1.0..2.0f64,
            bx in -0.3..0.3f64, by in -0.3..0.3f64, bz in 1.0..2.0f64,
            r in 0.02..0.15f64, dx in -0.3..0.3f64, dy in -0.3..0.3f64,
        ) {
            let a = Vec3::new(ax, ay, az);
            let b = Vec3::new(bx, by, bz);
            prop_assume!(a.distance(b) > 1e-3);
            let rd = Vec3::new(dx, dy, 1.0).normalize();
            let analytic = ray_capsule(rd, a, b, r);
            let traced = march(rd, a, b, r);
            match (analytic, traced) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-6, "{x} vs {y}"),
                (None, None) => {}
                // grazing rays may disagree by a hair
                (Some(x), None) | (None, Some(x)) => {
                    let p = rd * x;
                    prop_assert!(capsule_sdf(p, a, b, r).abs() < 1e-6);
                }
            }
        }
    }
}
