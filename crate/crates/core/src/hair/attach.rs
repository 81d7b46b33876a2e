use crate::scalar::Real;

use super::{HairError, HairModel, HumanRig, RootAnchor};

/// Roots may sit at most this far (meters) from the scalp surface.
pub const ATTACH_TOLERANCE: f64 = 1e-3;

/// Expresses every strand's current shape in the rig's current head frame.
///
/// The resulting anchors make the present vertex positions the groomed rest
/// shape; calling this again with the same rig reproduces them.
pub fn attach_to_scalp<T: Real>(model: &HairModel<T>, rig: &HumanRig<T>) -> Result<HairModel<T>, HairError> {
    model.validate()?;
    let frame = rig.head_frame();
    let scalp_center = frame.translation;
    let radius = rig.head_sphere.radius;
    let tol = T::lit(ATTACH_TOLERANCE);
    let offending: Vec<usize> = model
        .strands
        .iter()
        .enumerate()
        .filter(|(_, s)| (s.root().distance(scalp_center) - radius).abs() > tol)
        .map(|(i, _)| i)
        .collect();
    if !offending.is_empty() {
        return Err(HairError::Attachment { indices: offending });
    }
    let to_local = frame.inverse();
    let mut out = model.clone();
    out.scalp.center = rig.head_sphere.center;
    out.scalp.radius = radius;
    for s in &mut out.strands {
        s.root_local = Some(RootAnchor { rest: s.vertices.iter().map(|p| to_local.apply(*p)).collect() });
    }
    Ok(out)
}
