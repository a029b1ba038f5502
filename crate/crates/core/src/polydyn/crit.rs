use alloc::vec::Vec;

use crate::arith::Rational;
use crate::error::{domain, Result};

use super::{canonical_height_green, CanonicalHeight, GreenOptions, NormalFormPoly};

pub fn critical_heights(
    f: &NormalFormPoly<Rational>,
    opts: &GreenOptions,
) -> Result<Vec<CanonicalHeight>> {
    f.critical_points()
        .iter()
        .map(|c| canonical_height_green(f, c, opts))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepletedHeight {
    pub value: f64,
    pub error: f64,
}

/// `h^(k)_crit`: the sum of all critical heights except the `k` largest.
///
/// The `2d - 2` critical points are the affine ones plus `infinity` with
/// multiplicity `d - 1` (height zero). Dropping the `k` largest is monotone
/// in every entry, so evaluating it at the lower and upper ends of the
/// error intervals gives a rigorous enclosure.
pub fn depleted_crit_height(heights: &[CanonicalHeight], k: usize) -> Result<DepletedHeight> {
    let total = 2 * heights.len();
    if k > total {
        return Err(domain(alloc::format!("k = {k} exceeds 2d - 2 = {total}")));
    }
    let lo: Vec<f64> = heights.iter().map(|h| h.lower()).collect();
    let hi: Vec<f64> = heights.iter().map(|h| h.upper()).collect();
    let lo = drop_largest(lo, k, heights.len());
    let hi = drop_largest(hi, k, heights.len());
    Ok(DepletedHeight {
        value: 0.5 * (lo + hi),
        error: 0.5 * (hi - lo),
    })
}

fn drop_largest(mut xs: Vec<f64>, k: usize, zeros: usize) -> f64 {
    xs.extend(core::iter::repeat(0.0).take(zeros));
    xs.sort_by(|a, b| b.total_cmp(a));
    xs[k.min(xs.len())..].iter().sum()
}
