use num_traits::Signed;

use super::CriteriaError;
use crate::rational::{int, min_q, Q};

/// `min(2 - mu, beta2 / (beta2 - (1 - mu)))`, the smallest admissible
/// `beta1` for freeness at a point of multiplicity `mu`.
///
/// For `1 <= mu < 2` this is `2 - mu`; for `0 <= mu < 1` it is the second
/// branch.
pub fn min_formula(mu: &Q, beta2: &Q) -> Result<Q, CriteriaError> {
    if mu.is_negative() || *mu >= int(2) {
        return Err(CriteriaError::Domain(format!("mu = {mu} must lie in [0, 2)")));
    }
    let lower = int(2) - mu;
    if *beta2 < lower {
        return Err(CriteriaError::Domain(format!(
            "beta2 = {beta2} must be >= 2 - mu = {lower}"
        )));
    }
    Ok(point_bound(mu, beta2))
}

/// `min_formula` without the domain checks. Falls back to `2 - mu` when the
/// second branch has a non-positive denominator.
pub(super) fn point_bound(mu: &Q, beta2: &Q) -> Q {
    let first = int(2) - mu;
    let denom = beta2 - (int(1) - mu);
    if denom.is_positive() {
        min_q(&first, &(beta2 / denom))
    } else {
        first
    }
}

/// Smallest admissible `beta1` for tangent separation, where `s` is
/// `beta2_p + beta2_V`: `min((4 - mu_v)/2, s / (s - (2 - mu_v)))`.
/// The second branch only enters when its denominator is positive.
pub fn tangent_bound(mu_v: &Q, s: &Q) -> Q {
    let first = (int(4) - mu_v) / int(2);
    let denom = s - (int(2) - mu_v);
    if denom.is_positive() {
        min_q(&first, &(s / denom))
    } else {
        first
    }
}

/// Smallest `beta2 >= 2 - mu` with `point_bound(mu, beta2) <= d`, if any.
pub(super) fn min_beta2_for_degree(mu: &Q, d: &Q) -> Option<Q> {
    let lower = int(2) - mu;
    if *d >= lower {
        return Some(lower);
    }
    let c = int(1) - mu;
    // for mu < 1 the bound beta2 / (beta2 - c) decreases towards 1
    if !c.is_positive() || *d <= int(1) {
        return None;
    }
    Some(d * &c / (d - int(1)))
}
