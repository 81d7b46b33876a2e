use crate::math::{Rigid, Vec3};
use crate::scalar::Real;

use super::{HairError, Sphere};

pub const JOINT_COUNT: usize = 18;

/// COCO-18 keypoint order used by OpenPose-style pose maps.
pub const JOINT_NAMES: [&str; JOINT_COUNT] = [
    "nose",
    "neck",
    "right_shoulder",
    "right_elbow",
    "right_wrist",
    "left_shoulder",
    "left_elbow",
    "left_wrist",
    "right_hip",
    "right_knee",
    "right_ankle",
    "left_hip",
    "left_knee",
    "left_ankle",
    "right_eye",
    "left_eye",
    "right_ear",
    "left_ear",
];

pub mod joint {
    pub const NOSE: usize = 0;
    pub const NECK: usize = 1;
    pub const R_SHOULDER: usize = 2;
    pub const R_ELBOW: usize = 3;
    pub const R_WRIST: usize = 4;
    pub const L_SHOULDER: usize = 5;
    pub const L_ELBOW: usize = 6;
    pub const L_WRIST: usize = 7;
    pub const R_HIP: usize = 8;
    pub const R_KNEE: usize = 9;
    pub const R_ANKLE: usize = 10;
    pub const L_HIP: usize = 11;
    pub const L_KNEE: usize = 12;
    pub const L_ANKLE: usize = 13;
    pub const R_EYE: usize = 14;
    pub const L_EYE: usize = 15;
    pub const R_EAR: usize = 16;
    pub const L_EAR: usize = 17;
}

/// Joints rigidly carried by the head.
pub const HEAD_JOINTS: [usize; 5] = [joint::NOSE, joint::R_EYE, joint::L_EYE, joint::R_EAR, joint::L_EAR];

/// The 17 OpenPose body limbs, in palette order.
pub const BONES: [(usize, usize); 17] = [
    (1, 2),
    (1, 5),
    (2, 3),
    (3, 4),
    (5, 6),
    (6, 7),
    (1, 8),
    (8, 9),
    (9, 10),
    (1, 11),
    (11, 12),
    (12, 13),
    (1, 0),
    (0, 14),
    (14, 16),
    (0, 15),
    (15, 17),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule<T> {
    pub a: usize,
    pub b: usize,
    pub radius: T,
}

/// Standing figure, y-up, facing +z. The subject's right side is -x.
#[derive(Debug, Clone, PartialEq)]
pub struct HumanRig<T> {
    pub joints: [Vec3<T>; JOINT_COUNT],
    pub bones: Vec<(usize, usize)>,
    pub head_sphere: Sphere<T>,
    pub body_capsules: Vec<Capsule<T>>,
    /// Current head motion: rotation about the head center followed by a
    /// translation, relative to the rest layout above.
    pub head_pose: Rigid<T>,
}

/// Rig joints and occlusion proxies in world space for one head pose.
#[derive(Debug, Clone, PartialEq)]
pub struct PosedRig<T> {
    pub joints: [Vec3<T>; JOINT_COUNT],
    pub head: Sphere<T>,
    /// `(a, b, radius)` in world space.
    pub capsules: Vec<(Vec3<T>, Vec3<T>, T)>,
}

const CANONICAL_HEAD_RADIUS: f64 = 0.1;
const CANONICAL_HEAD_CENTER: [f64; 3] = [0.0, 1.62, 0.0];

impl<T: Real> HumanRig<T> {
    /// Canonical adult layout with the head sphere scaled to `head_radius`
    /// and the whole figure shifted by `origin`.
    pub fn canonical(head_radius: f64, origin: [f64; 3]) -> Self {
        let o = Vec3::<f64>::from(origin);
        let hc = Vec3::<f64>::from(CANONICAL_HEAD_CENTER);
        let k = head_radius / CANONICAL_HEAD_RADIUS;
        // Facial joints scale with the head about its center.
        let head = |p: [f64; 3]| hc + (Vec3::from(p) - hc) * k + o;
        let body = |p: [f64; 3]| Vec3::from(p) + o;
        let raw = [
            head([0.0, 1.60, 0.107]),
            body([0.0, 1.45, 0.0]),
            body([-0.18, 1.42, 0.0]),
            body([-0.22, 1.15, 0.0]),
            body([-0.24, 0.90, 0.02]),
            body([0.18, 1.42, 0.0]),
            body([0.22, 1.15, 0.0]),
            body([0.24, 0.90, 0.02]),
            body([-0.10, 0.95, 0.0]),
            body([-0.10, 0.50, 0.01]),
            body([-0.10, 0.08, 0.0]),
            body([0.10, 0.95, 0.0]),
            body([0.10, 0.50, 0.01]),
            body([0.10, 0.08, 0.0]),
            head([-0.035, 1.64, 0.095]),
            head([0.035, 1.64, 0.095]),
            head([-0.105, 1.62, 0.0]),
            head([0.105, 1.62, 0.0]),
        ];
        let capsule = |a, b, r: f64| Capsule { a, b, radius: T::lit(r) };
        use joint::*;
        Self {
            joints: raw.map(|p| Vec3::from_f64(p.into())),
            bones: BONES.to_vec(),
            head_sphere: Sphere::new(Vec3::from_f64((hc + o).into()), T::lit(head_radius)),
            body_capsules: vec![
                capsule(NECK, R_HIP, 0.11),
                capsule(NECK, L_HIP, 0.11),
                capsule(R_SHOULDER, L_SHOULDER, 0.06),
                capsule(R_SHOULDER, R_ELBOW, 0.05),
                capsule(R_ELBOW, R_WRIST, 0.04),
                capsule(L_SHOULDER, L_ELBOW, 0.05),
                capsule(L_ELBOW, L_WRIST, 0.04),
                capsule(R_HIP, R_KNEE, 0.07),
                capsule(R_KNEE, R_ANKLE, 0.05),
                capsule(L_HIP, L_KNEE, 0.07),
                capsule(L_KNEE, L_ANKLE, 0.05),
            ],
            head_pose: Rigid::identity(),
        }
    }

    pub fn validate(&self) -> Result<(), HairError> {
        let bad_bone = self.bones.iter().any(|&(a, b)| a >= JOINT_COUNT || b >= JOINT_COUNT);
        let bad_capsule =
            self.body_capsules.iter().any(|c| c.a >= JOINT_COUNT || c.b >= JOINT_COUNT || !(c.radius > T::zero()));
        if bad_bone || bad_capsule {
            return Err(HairError::InvalidModel("rig has invalid bone or capsule".into()));
        }
        if !(self.head_sphere.radius > T::zero()) {
            return Err(HairError::InvalidModel("rig head sphere radius must be > 0".into()));
        }
        Ok(())
    }

    pub fn with_head_pose(&self, pose: Rigid<T>) -> Self {
        Self { head_pose: pose, ..self.clone() }
    }

    /// Maps head-local points (origin at the rest head center) to world
    /// space under `pose`.
    pub fn head_frame_for(&self, pose: &Rigid<T>) -> Rigid<T> {
        Rigid::new(pose.rotation, self.head_sphere.center + pose.translation)
    }

    /// Head frame for the rig's current pose.
    pub fn head_frame(&self) -> Rigid<T> {
        self.head_frame_for(&self.head_pose)
    }

    pub fn posed(&self, pose: &Rigid<T>) -> PosedRig<T> {
        let frame = self.head_frame_for(pose);
        let c0 = self.head_sphere.center;
        let mut joints = self.joints;
        for &j in &HEAD_JOINTS {
            joints[j] = frame.apply(self.joints[j] - c0);
        }
        PosedRig {
            joints,
            head: Sphere::new(frame.translation, self.head_sphere.radius),
            capsules: self.body_capsules.iter().map(|c| (joints[c.a], joints[c.b], c.radius)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Quat;

    #[test]
    fn canonical_rig_is_valid() {
        let rig = HumanRig::<f64>::canonical(0.1, [0.0; 3]);
        rig.validate().unwrap();
        // facial keypoints sit outside the head sphere so they can be seen
        for &j in &HEAD_JOINTS {
            assert!(rig.head_sphere.signed_distance(rig.joints[j]) > 0.0, "joint {j}");
        }
    }

    #[test]
    fn posing_moves_only_head_joints() {
        let rig = HumanRig::<f64>::canonical(0.1, [0.0; 3]);
        let pose = Rigid::new(Quat::from_yaw_pitch_roll_deg(30.0, 0.0, 0.0).to_mat3(), Vec3::new(0.0, 0.0, 0.05));
        let posed = rig.posed(&pose);
        assert_eq!(posed.joints[joint::NECK], rig.joints[joint::NECK]);
        assert_ne!(posed.joints[joint::NOSE], rig.joints[joint::NOSE]);
        assert!((posed.head.center - Vec3::new(0.0, 1.62, 0.05)).norm() < 1e-12);
        let r0 = rig.joints[joint::NOSE].distance(rig.head_sphere.center);
        let r1 = posed.joints[joint::NOSE].distance(posed.head.center);
        assert!((r0 - r1).abs() < 1e-12);
    }
}
