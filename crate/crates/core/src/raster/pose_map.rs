use crate::camera::ProjectedFrame;
use crate::hair::{BONES, JOINT_COUNT};

use super::line::{disk, thick_segment};
use super::{Dims, RasterImage};

/// OpenPose colors; joint `j` uses entry `j`, bone `i` uses entry `i`.
pub const PALETTE: [[u8; 3]; JOINT_COUNT] = [
    [255, 0, 0],
    [255, 85, 0],
    [255, 170, 0],
    [255, 255, 0],
    [170, 255, 0],
    [85, 255, 0],
    [0, 255, 0],
    [0, 255, 85],
    [0, 255, 170],
    [0, 255, 255],
    [0, 170, 255],
    [0, 85, 255],
    [0, 0, 255],
    [85, 0, 255],
    [170, 0, 255],
    [255, 0, 255],
    [255, 0, 170],
    [255, 0, 85],
];

/// Bone width and joint radius in pixels at 832×480.
pub const BONE_WIDTH: f64 = 4.0;
pub const JOINT_RADIUS: f64 = 4.0;

/// Skeleton on black: bones in limb order, then joint disks on top.
/// A bone is drawn only when both of its joints are visible.
pub fn rasterize_pose_map(pf: &ProjectedFrame, dims: Dims) -> RasterImage {
    let mut image = RasterImage::black(dims);
    let s = dims.stroke_scale();
    let kp = &pf.skeleton;
    for (i, &(a, b)) in BONES.iter().enumerate() {
        if !(kp[a].visible && kp[b].visible) {
            continue;
        }
        let pa = [kp[a].x as f64, kp[a].y as f64];
        let pb = [kp[b].x as f64, kp[b].y as f64];
        thick_segment(pa, pb, BONE_WIDTH * s / 2.0, dims.width, dims.height, |c| image.set_pixel(c.x, c.y, PALETTE[i]));
    }
    for (j, k) in kp.iter().enumerate().filter(|(_, k)| k.visible) {
        disk([k.x as f64, k.y as f64], JOINT_RADIUS * s, dims.width, dims.height, |x, y| {
            image.set_pixel(x, y, PALETTE[j])
        });
    }
    image
}
