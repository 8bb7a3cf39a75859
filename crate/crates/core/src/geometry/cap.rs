use libm::exp;

use super::special::beta_inc;
use crate::{Error, Result};

/// Upper bound `exp(-cos²α · d / 2)` on the normalized measure of a polar cap
/// of angular radius α on the unit sphere `S^{d-1}`.
pub fn cap_fraction_upper_bound(cos_alpha: f64, d: usize) -> Result<f64> {
    if !(cos_alpha > 0.0 && cos_alpha <= 1.0) {
        return Err(Error::domain("cos_alpha", cos_alpha, "0 < cos_alpha <= 1"));
    }
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(exp(-cos_alpha * cos_alpha * d as f64 / 2.0))
}

/// Exact normalized measure of `{z ∈ S^{d-1} | z·y >= cos_alpha}` for a unit pole `y`.
///
/// Equal to `½ · I_{1-t²}((d-1)/2, ½)` with `t = cos_alpha`.
pub fn cap_fraction_exact(cos_alpha: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&cos_alpha) {
        return Err(Error::domain("cos_alpha", cos_alpha, "0 <= cos_alpha <= 1"));
    }
    if d < 2 {
        return Err(Error::domain("d", d as f64, "d >= 2"));
    }
    Ok(cap_fraction_unchecked(cos_alpha, d))
}

pub(crate) fn cap_fraction_unchecked(t: f64, d: usize) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    let x = (1.0 - t) * (1.0 + t);
    0.5 * beta_inc((d as f64 - 1.0) / 2.0, 0.5, x)
}
