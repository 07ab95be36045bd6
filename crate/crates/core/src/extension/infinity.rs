use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::SpatialDomain;
use crate::phi_core::phi::{Envelope, SharedPhi};

/// Lower envelope of `φ` over the `far_fraction` of cloud points farthest
/// from the origin, a proxy for `liminf_{|x|→∞} φ(x, ·)`.
pub fn estimate_phi_infinity(
    phi: &SharedPhi,
    domain: &SpatialDomain,
    far_fraction: f64,
) -> Result<Envelope> {
    if domain.is_bounded() {
        return Err(Error::Config(
            "domain is bounded: supply phi_infinity directly (any weak Phi-function will do)".into(),
        ));
    }
    if !(far_fraction > 0.0 && far_fraction < 1.0) {
        return Err(Error::Config(format!("far_fraction = {far_fraction} is not in (0, 1)")));
    }
    let cloud = domain.cloud();
    let norms = cloud.norms();
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let keep = ((far_fraction * cloud.len() as f64).ceil() as usize).clamp(1, cloud.len());
    let mut far = order[..keep].to_vec();
    far.sort_unstable();
    Ok(Envelope::new(
        Arc::clone(phi),
        cloud.subset(&far),
        format!("liminf proxy of {} over {keep} far points", phi.label()),
    ))
}
