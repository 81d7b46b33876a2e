use crate::hair::{HumanRig, HEAD_JOINTS, JOINT_COUNT};
use crate::math::Vec3;
use crate::physics::GeometryFrame;
use crate::scalar::Real;

use super::{CameraIntrinsics, CameraPose, Proxy};

/// Points with camera depth at or below this (meters) are behind the camera.
pub const NEAR_PLANE: f64 = 1e-6;

/// Result of projecting one world point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection<T> {
    pub pixel: [f32; 2],
    /// Camera-space z.
    pub depth: T,
    pub behind_camera: bool,
}

/// Pinhole projection of `p`. Behind-camera points carry a flag and a NaN
/// pixel; consumers clip segments that cross the near plane.
pub fn project_point<T: Real>(pose: &CameraPose<T>, intr: &CameraIntrinsics, p: Vec3<T>) -> Projection<T> {
    project_camera_point(intr, pose.transform(p))
}

fn project_camera_point<T: Real>(intr: &CameraIntrinsics, q: Vec3<T>) -> Projection<T> {
    if q.z <= T::lit(NEAR_PLANE) {
        return Projection { pixel: [f32::NAN; 2], depth: q.z, behind_camera: true };
    }
    let x = T::lit(intr.cx) + T::lit(intr.fx) * q.x / q.z;
    let y = T::lit(intr.cy) + T::lit(intr.fy) * q.y / q.z;
    Projection { pixel: [x.as_f32(), y.as_f32()], depth: q.z, behind_camera: false }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedPoint {
    pub x: f32,
    pub y: f32,
    /// Camera-space z, meters; always > 0.
    pub depth: f32,
}

/// A run of consecutive projected vertices of one strand.
///
/// Segment `k` of the polyline is strand segment `first_segment + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrandPolyline {
    pub strand: u32,
    pub first_segment: u32,
    pub points: Vec<ProjectedPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f32,
    pub y: f32,
    pub depth: f32,
    pub visible: bool,
}

/// Everything the rasterizers need for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedFrame {
    pub intrinsics: CameraIntrinsics,
    /// Ordered by (strand, segment).
    pub strand_polylines: Vec<StrandPolyline>,
    pub skeleton: [Keypoint; JOINT_COUNT],
    /// Head sphere first, then body capsules in rig order.
    pub proxies: Vec<Proxy>,
}

impl ProjectedFrame {
    /// Frame with no hair and no visible joints.
    pub fn empty(intrinsics: CameraIntrinsics) -> Self {
        Self {
            intrinsics,
            strand_polylines: Vec::new(),
            skeleton: [Keypoint { x: 0.0, y: 0.0, depth: 0.0, visible: false }; JOINT_COUNT],
            proxies: Vec::new(),
        }
    }

    pub fn point_count(&self) -> usize {
        self.strand_polylines.iter().map(|p| p.points.len()).sum()
    }

    /// Camera ray through the center of pixel `(x, y)`, with z = 1.
    pub fn pixel_ray(&self, x: u32, y: u32) -> Vec3<f64> {
        let i = &self.intrinsics;
        Vec3::new((x as f64 + 0.5 - i.cx) / i.fx, (y as f64 + 0.5 - i.cy) / i.fy, 1.0)
    }
}

/// Projects hair, skeleton and body proxies of one frame.
///
/// `offsets` delimits strands within `frame.positions`. Strand segments
/// crossing the near plane are cut there; fully hidden runs are dropped.
pub fn project_frame<T: Real>(
    offsets: &[usize],
    frame: &GeometryFrame<T>,
    rig: &HumanRig<T>,
    camera: &CameraPose<T>,
    intrinsics: &CameraIntrinsics,
) -> ProjectedFrame {
    let near = T::lit(NEAR_PLANE);
    let mut polylines = Vec::new();
    for (si, w) in offsets.windows(2).enumerate() {
        let cam: Vec<Vec3<T>> = frame.positions[w[0]..w[1]].iter().map(|p| camera.transform(*p)).collect();
        let mut current: Option<StrandPolyline> = None;
        let emit = |pl: Option<StrandPolyline>, out: &mut Vec<StrandPolyline>| {
            if let Some(pl) = pl {
                if pl.points.len() >= 2 {
                    out.push(pl);
                }
            }
        };
        for (seg, pair) in cam.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            let (a_in, b_in) = (a.z > near, b.z > near);
            if !a_in && !b_in {
                emit(current.take(), &mut polylines);
                continue;
            }
            let cut = |p: Vec3<T>, q: Vec3<T>| {
                let t = (near - p.z) / (q.z - p.z);
                let mut c = p + (q - p) * t;
                c.z = near;
                c
            };
            let start = if a_in { a } else { cut(a, b) };
            let end = if b_in { b } else { cut(b, a) };
            if current.is_none() || !a_in {
                emit(current.take(), &mut polylines);
                current = Some(StrandPolyline {
                    strand: si as u32,
                    first_segment: seg as u32,
                    points: vec![to_point(intrinsics, start)],
                });
            }
            let pl = current.as_mut().expect("polyline started above");
            pl.points.push(to_point(intrinsics, end));
            if !b_in {
                emit(current.take(), &mut polylines);
            }
        }
        emit(current.take(), &mut polylines);
    }

    let posed = rig.posed(&frame.head_pose);
    let head_cam = camera.transform(posed.head.center);
    let head_r = posed.head.radius;
    let mut skeleton = [Keypoint { x: 0.0, y: 0.0, depth: 0.0, visible: false }; JOINT_COUNT];
    for (j, kp) in skeleton.iter_mut().enumerate() {
        let q = camera.transform(posed.joints[j]);
        let proj = project_camera_point(intrinsics, q);
        let occluded = HEAD_JOINTS.contains(&j) && hidden_by_sphere(q, head_cam, head_r);
        *kp = Keypoint {
            x: proj.pixel[0],
            y: proj.pixel[1],
            depth: q.z.as_f32(),
            visible: !proj.behind_camera && !occluded,
        };
    }

    let to64 = |v: Vec3<T>| v.cast::<f64>();
    let mut proxies = vec![Proxy::sphere(to64(head_cam), head_r.as_f64(), intrinsics)];
    for (a, b, r) in &posed.capsules {
        proxies.push(Proxy::capsule(to64(camera.transform(*a)), to64(camera.transform(*b)), r.as_f64(), intrinsics));
    }

    ProjectedFrame { intrinsics: *intrinsics, strand_polylines: polylines, skeleton, proxies }
}

fn to_point<T: Real>(intr: &CameraIntrinsics, q: Vec3<T>) -> ProjectedPoint {
    let x = T::lit(intr.cx) + T::lit(intr.fx) * q.x / q.z;
    let y = T::lit(intr.cy) + T::lit(intr.fy) * q.y / q.z;
    ProjectedPoint { x: x.as_f32(), y: y.as_f32(), depth: q.z.as_f32() }
}

/// Whether the head sphere blocks the line of sight to camera-space `q`.
fn hidden_by_sphere<T: Real>(q: Vec3<T>, center: Vec3<T>, r: T) -> bool {
    let len = q.norm();
    let Some(rd) = q.try_normalize() else { return false };
    let b = rd.dot(center);
    let disc = b * b - (center.norm_squared() - r * r);
    if disc < T::zero() {
        return false;
    }
    let t = b - disc.sqrt();
    t > T::zero() && t < len - T::lit(1e-6)
}
