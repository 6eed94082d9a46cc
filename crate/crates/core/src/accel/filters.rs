//! Skip predicates. Every input is in SED form unless the name says `norm`.
//!
//! Each returns `true` when the corresponding work can be skipped without
//! changing any weight: no skipped point could be strictly closer to the new
//! center than to its current one.

use super::state::Partition;

/// Cluster-level test: skip when `sed(c_j, c_new) >= 4 r_j`.
#[inline]
pub fn radius_skip(radius_sq: f64, d_new_sq: f64) -> bool {
    d_new_sq >= 4.0 * radius_sq
}

/// Point-level test: skip when `sed(c_j, c_new) >= 4 w_i`.
#[inline]
pub fn weight_skip(w_i: f64, d_new_sq: f64) -> bool {
    d_new_sq >= 4.0 * w_i
}

/// Norm test for one point: skip when `(|c_new| - |p|)^2 >= w_i`.
///
/// Takes plain (not squared) norms in the active reference frame.
#[inline]
pub fn norm_reject_point(norm_p: f64, norm_cnew: f64, w_i: f64) -> bool {
    let diff = norm_cnew - norm_p;
    diff * diff >= w_i
}

/// Norm test for a partition: skip when the new center's norm falls outside
/// `(lower, upper)`. Empty partitions carry `(+inf, -inf)` and always skip.
#[inline]
pub fn norm_reject_partition(part: &Partition, norm_cnew: f64) -> bool {
    norm_outside_bounds(part.lower, part.upper, norm_cnew)
}

#[inline]
pub fn norm_outside_bounds(lower: f64, upper: f64, norm_cnew: f64) -> bool {
    norm_cnew <= lower || norm_cnew >= upper
}

/// Center-pair separation rule, evaluated in metric form:
/// `d(c_src, c_tgt) - r_src >= 2 r_tgt`.
///
/// When it holds, no center drawn from the source cluster (now or later) can
/// take a point from the target cluster.
#[inline]
pub fn centers_separated(d_centers_sq: f64, r_source_sq: f64, r_target_sq: f64) -> bool {
    d_centers_sq.sqrt() - r_source_sq.sqrt() >= 2.0 * r_target_sq.sqrt()
}
