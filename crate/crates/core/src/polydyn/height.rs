use alloc::collections::BTreeMap;

use num_traits::Zero;

use crate::arith::{ln_abs_rational, valuation, LogCombination, Rational};
use crate::error::{budget, Result};
use crate::places::{height, joint_support, PlaceQ};

use super::green::{green_arch_with, green_nonarch, ArchData, GreenOptions, GreenValue};
use super::NormalFormPoly;

/// A global canonical height as a sum of local escape rates.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalHeight {
    pub value: f64,
    pub error: f64,
    pub breakdown: BTreeMap<PlaceQ, GreenValue>,
}

impl CanonicalHeight {
    pub fn from_breakdown(breakdown: BTreeMap<PlaceQ, GreenValue>) -> Self {
        let value = breakdown.values().map(|g| g.value).sum();
        let error = breakdown.values().map(|g| g.error).sum();
        Self {
            value,
            error,
            breakdown,
        }
    }

    pub fn lower(&self) -> f64 {
        (self.value - self.error).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error
    }

    /// Sum of the exact non-archimedean contributions.
    pub fn nonarch_exact(&self) -> LogCombination {
        self.breakdown
            .iter()
            .filter(|(v, _)| !v.is_arch())
            .filter_map(|(_, g)| g.exact.clone())
            .sum()
    }

    /// Whether every non-archimedean term is exactly known.
    pub fn nonarch_is_exact(&self) -> bool {
        self.breakdown
            .iter()
            .all(|(v, g)| v.is_arch() || g.exact.is_some())
    }
}

/// Places that can contribute to `h_f(z)`: the archimedean one and the
/// primes dividing `z` or a coefficient. Elsewhere the coefficients are
/// integral and `|z|_p <= 1`, so the orbit stays in the unit ball.
pub fn relevant_places(f: &NormalFormPoly<Rational>, z: &Rational) -> Result<alloc::vec::Vec<PlaceQ>> {
    let mut places = joint_support(f.coeffs().iter().chain(core::iter::once(z)))?;
    places.insert(PlaceQ::Arch);
    Ok(places.into_iter().collect())
}

pub fn canonical_height_green(
    f: &NormalFormPoly<Rational>,
    z: &Rational,
    opts: &GreenOptions,
) -> Result<CanonicalHeight> {
    let arch = ArchData::new(f);
    let mut breakdown = BTreeMap::new();
    for v in relevant_places(f, z)? {
        let g = match &v {
            PlaceQ::Arch => green_arch_with(f, &arch, z, opts)?,
            PlaceQ::Prime(p) => green_nonarch(f, z, p, opts),
        };
        breakdown.insert(v, g);
    }
    Ok(CanonicalHeight::from_breakdown(breakdown))
}

/// `h(f^n(z)) / d^n`, computed from the exact iterate.
pub fn canonical_height_iter(
    f: &NormalFormPoly<Rational>,
    z: &Rational,
    n: usize,
    bit_budget: u64,
) -> Result<f64> {
    let w = f
        .iterate(z, n, bit_budget)
        .ok_or_else(|| budget(alloc::format!("iterate {n} exceeds {bit_budget} bits")))?;
    Ok(height(&w) / libm::pow(f.degree() as f64, n as f64))
}

/// A bound `B` with `|h(f(z)) - d h(z)| <= B` for every rational `z`.
///
/// Upper side: `log+ |f(z)|_v <= d log+ |z|_v + log+ max_j |a_j|_v`, plus
/// `log d` at the archimedean place. Lower side: `d log+ |z|_v -
/// log+ |f(z)|_v <= d log+ R_v` where `R_v` is the local escape radius.
/// Consequently `|h - h_f| <= B/(d-1)` and `|h(f^n z)/d^n - h_f(z)| <= B/d^n`.
pub fn one_step_bound(f: &NormalFormPoly<Rational>) -> Result<f64> {
    let d = f.degree();
    let mut primes = joint_support(f.coeffs().iter())?;
    primes.remove(&PlaceQ::Arch);
    let arch = ArchData::new(f);
    let amax = f.coeffs().iter().map(|a| ln_abs_rational(a)).filter(|x| x.is_finite());
    let amax = amax.fold(0.0_f64, f64::max);
    let mut upper = amax + libm::log(d as f64);
    let mut lower = d as f64 * arch.log_r;
    for v in &primes {
        let PlaceQ::Prime(p) = v else { continue };
        let lp = crate::arith::ln_biguint(p);
        let vals: alloc::vec::Vec<Option<i64>> = f.coeffs()[1..]
            .iter()
            .map(|a| (!a.is_zero()).then(|| valuation(a, p)))
            .collect();
        let vmin = vals.iter().flatten().copied().min().unwrap_or(0);
        upper += (-vmin).max(0) as f64 * lp;
        lower += d as f64 * log_radius_nonarch(&vals).max(0.0) * lp;
    }
    Ok(upper.max(lower) * (1.0 + 1e-12) + 1e-9)
}

fn log_radius_nonarch(vals: &[Option<i64>]) -> f64 {
    let d = vals.len() as i64;
    let vd = vals[vals.len() - 1].unwrap_or(0);
    let mut best = vd as f64 / (d - 1) as f64;
    for (i, v) in vals[..vals.len() - 1].iter().enumerate() {
        if let Some(v) = v {
            let j = i as i64 + 1;
            best = best.max((vd - v) as f64 / (d - j) as f64);
        }
    }
    best
}

/// `h_f(z)` estimated from the iterate alone, with the a priori error
/// `B/d^n`.
pub fn canonical_height_iter_bounded(
    f: &NormalFormPoly<Rational>,
    z: &Rational,
    n: usize,
    bit_budget: u64,
) -> Result<(f64, f64)> {
    let v = canonical_height_iter(f, z, n, bit_budget)?;
    Ok((v, one_step_bound(f)? / libm::pow(f.degree() as f64, n as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::polydyn::{CritVector, GreenStatus};

    fn quad(c: i64) -> NormalFormPoly<Rational> {
        CritVector::new(alloc::vec![rat(c, 1)]).unwrap().poly()
    }

    #[test]
    fn pcf_point_has_height_zero() {
        let h = canonical_height_green(&quad(2), &rat(2, 1), &GreenOptions::default()).unwrap();
        assert_eq!(h.value, 0.0);
        assert_eq!(h.error, 0.0);
        assert!(h.breakdown.values().all(|g| g.status == GreenStatus::ExactZero));
        let h = canonical_height_green(&quad(3), &rat(0, 1), &GreenOptions::default()).unwrap();
        assert_eq!(h.value, 0.0);
    }

    #[test]
    fn iterate_oracle_examples() {
        let ln = libm::log;
        let v = canonical_height_iter(&quad(3), &rat(3, 1), 1, 1 << 20).unwrap();
        assert!((v - ln(9.0) / 2.0).abs() < 1e-15);
        let v = canonical_height_iter(&quad(2), &rat(2, 1), 3, 1 << 20).unwrap();
        assert!((v - ln(6.0) / 8.0).abs() < 1e-15);
        assert_eq!(canonical_height_iter(&quad(5), &rat(0, 1), 7, 1 << 20).unwrap(), 0.0);
    }

    #[test]
    fn green_sum_matches_iterates() {
        let f = quad(3);
        let z = rat(3, 1);
        let h = canonical_height_green(&f, &z, &GreenOptions::default()).unwrap();
        let b = one_step_bound(&f).unwrap();
        for n in [4usize, 8, 10] {
            let it = canonical_height_iter(&f, &z, n, 1 << 20).unwrap();
            assert!((h.value - it).abs() <= h.error + b / libm::pow(2.0, n as f64) + 1e-12);
        }
        let two = h.breakdown.get(&PlaceQ::prime(2).unwrap()).unwrap();
        assert_eq!(two.exact, Some(LogCombination::log_int(2)));
    }
}
