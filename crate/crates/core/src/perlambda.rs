//! The multiplier locus `Per_1(lambda)`: normal forms whose fixed point 0
//! has multiplier `lambda`, and the inequalities that bound their heights.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{rational_abs_max, valuation, LogCombination, Rational};
use crate::error::{domain, Result};
use crate::places::{height_affine_exact, height_exact, joint_support, log_plus_norm, PlaceQ};
use crate::polydyn::{
    canonical_height_green, detect_dependence, green_nonarch, CanonicalHeight, CritVector,
    DependenceKind, GreenOptions, GreenStatus, GreenValue, OrbitBudget,
};

/// Guard tolerance for comparisons that fall back to floating point.
pub const GUARD: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct PerSample {
    pub cv: CritVector,
    pub lambda: Rational,
    pub s: BTreeSet<PlaceQ>,
    pub h_c: LogCombination,
    pub h_lambda: LogCombination,
}

impl PerSample {
    pub fn d(&self) -> usize {
        self.cv.d()
    }

    pub fn c(&self) -> &[Rational] {
        self.cv.c()
    }

    /// Builds the sample from critical points directly.
    pub fn from_crit(c: Vec<Rational>) -> Result<Self> {
        if c.iter().any(|x| x.is_zero()) {
            return Err(domain("critical points must be nonzero"));
        }
        let cv = CritVector::new(c)?;
        let lambda = cv.lambda().clone();
        let s = s_places(cv.c())?;
        let h_c = height_affine_exact(cv.c())?;
        let h_lambda = height_exact(&lambda)?;
        Ok(Self {
            cv,
            lambda,
            s,
            h_c,
            h_lambda,
        })
    }
}

/// A point of `Per_1(lambda)` with `c_2.. = free` and `c_1` solving
/// `prod c_i = (-1)^(d-1) lambda`.
pub fn sample_per1(d: usize, lambda: &Rational, free: &[Rational]) -> Result<PerSample> {
    if d < 2 {
        return Err(domain("degree must be at least 2"));
    }
    if free.len() != d - 2 {
        return Err(domain(alloc::format!("need {} free entries, got {}", d - 2, free.len())));
    }
    if lambda.is_zero() {
        return Err(domain("lambda must be nonzero"));
    }
    if free.iter().any(|x| x.is_zero()) {
        return Err(domain("free entries must be nonzero"));
    }
    let prod = free.iter().fold(Rational::one(), |acc, x| acc * x);
    let mut c1 = lambda / prod;
    if d % 2 == 0 {
        c1 = -c1;
    }
    let mut c = alloc::vec![c1];
    c.extend_from_slice(free);
    PerSample::from_crit(c)
}

/// `S = {v : 5 log |c_1|_v < log ||c||_v}`, decided exactly.
///
/// Only places in the joint support can qualify; elsewhere both sides
/// vanish.
pub fn s_places(c: &[Rational]) -> Result<BTreeSet<PlaceQ>> {
    let c1 = c.first().ok_or_else(|| domain("empty critical vector"))?;
    if c1.is_zero() {
        return Err(domain("c_1 must be nonzero"));
    }
    let mut places = joint_support(c.iter())?;
    places.insert(PlaceQ::Arch);
    Ok(places.into_iter().filter(|v| in_s(c1, c, v)).collect())
}

fn in_s(c1: &Rational, c: &[Rational], v: &PlaceQ) -> bool {
    match v {
        PlaceQ::Arch => {
            let m = rational_abs_max(c.iter());
            num_traits::pow(c1.abs(), 5) < m
        }
        PlaceQ::Prime(p) => {
            let vmin = c
                .iter()
                .filter(|x| !x.is_zero())
                .map(|x| valuation(x, p))
                .min()
                .unwrap_or(0);
            -5 * valuation(c1, p) < -vmin
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweightReport {
    pub lhs: LogCombination,
    pub rhs: LogCombination,
    pub margin: LogCombination,
    /// Sign of the margin, exact unless the comparison was too large.
    pub sign: Ordering,
}

impl SweightReport {
    pub fn holds(&self) -> bool {
        self.sign != Ordering::Less
    }
}

/// `sum_{v in S} log+ ||c||_v >= h(c)/(5d-9) - (5d-4)/(5d-9) h(lambda)`.
pub fn sweight_check(sample: &PerSample) -> Result<SweightReport> {
    let d = sample.d() as i64;
    let mut lhs = LogCombination::zero();
    for v in &sample.s {
        lhs += log_plus_norm(sample.c(), v)?;
    }
    let k = Rational::new(1.into(), (5 * d - 9).into());
    let k2 = Rational::new((5 * d - 4).into(), (5 * d - 9).into());
    let rhs = sample.h_c.scale(&k) - sample.h_lambda.scale(&k2);
    let margin = lhs.clone() - rhs.clone();
    let sign = margin.cmp_with_tolerance(&LogCombination::zero(), GUARD);
    Ok(SweightReport {
        lhs,
        rhs,
        margin,
        sign,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum DichotomyBranch {
    /// `log+ ||c||_v = 0`.
    CBounded,
    /// `c_index` has no detected relation to `c_1` and `G_v(c_index) >=
    /// log+ ||c||_v`.
    IndependentEscaper { index: usize, green: GreenValue },
    /// Some candidate's orbit was truncated before it could be classified.
    Undecided,
    Violation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DichotomyReport {
    pub place: PlaceQ,
    /// Index (into the sample's `c`) of the critical point used as `c_1`.
    pub c1_index: usize,
    pub branch: DichotomyBranch,
}

/// Critical heights of a sample and the resulting choice of `c_1`.
#[derive(Clone, Debug)]
pub struct DichotomyContext<'a> {
    sample: &'a PerSample,
    pub heights: Vec<CanonicalHeight>,
    pub c1_index: usize,
    /// `c` reordered so that `c_1` comes first.
    pub reordered: Vec<Rational>,
    /// `S` for the reordered vector.
    pub s: BTreeSet<PlaceQ>,
    opts: GreenOptions,
    budget: OrbitBudget,
}

impl<'a> DichotomyContext<'a> {
    /// Moves a critical point of largest canonical height to the front,
    /// standing in for a maximal representative of its class.
    pub fn new(sample: &'a PerSample, opts: &GreenOptions, budget: OrbitBudget) -> Result<Self> {
        let f = sample.cv.poly();
        let heights: Vec<CanonicalHeight> = sample
            .c()
            .iter()
            .map(|c| canonical_height_green(&f, c, opts))
            .collect::<Result<_>>()?;
        let mut c1_index = 0;
        for (i, h) in heights.iter().enumerate() {
            if h.value > heights[c1_index].value {
                c1_index = i;
            }
        }
        let mut reordered = sample.c().to_vec();
        reordered.swap(0, c1_index);
        let s = s_places(&reordered)?;
        Ok(Self {
            sample,
            heights,
            c1_index,
            reordered,
            s,
            opts: opts.clone(),
            budget,
        })
    }

    /// Primes `d < p <= bound` in `S`.
    pub fn good_primes(&self, bound: u64) -> Vec<BigUint> {
        let d = BigUint::from(self.sample.d());
        self.s
            .iter()
            .filter_map(|v| v.prime_number())
            .filter(|p| **p > d && **p <= BigUint::from(bound))
            .cloned()
            .collect()
    }

    pub fn check(&self, p: &BigUint) -> Result<DichotomyReport> {
        let d = self.sample.d();
        if *p <= BigUint::from(d) {
            return Err(domain(alloc::format!("need p > d, got p = {p}")));
        }
        let place = PlaceQ::prime_big(p.clone())?;
        if !self.s.contains(&place) {
            return Err(domain(alloc::format!("{place} is not in S")));
        }
        let report = |branch| DichotomyReport {
            place: place.clone(),
            c1_index: self.c1_index,
            branch,
        };
        let c = self.sample.c();
        let vmin = c.iter().map(|x| valuation(x, p)).min().unwrap_or(0);
        if vmin >= 0 {
            return Ok(report(DichotomyBranch::CBounded));
        }
        // log+ ||c||_p = -vmin log p
        let need = Rational::from_integer(BigInt::from(-vmin));
        let f = self.sample.cv.poly();
        let c1 = &c[self.c1_index];
        let mut undecided = false;
        for (i, ci) in c.iter().enumerate() {
            if i == self.c1_index {
                continue;
            }
            let dep = detect_dependence(&f, c1, ci, self.budget);
            if !matches!(dep.kind, DependenceKind::NoRelationFound(_)) {
                continue;
            }
            let g = green_nonarch(&f, ci, p, &self.opts);
            match (&g.status, &g.exact) {
                (GreenStatus::BoundedUpTo(_), _) => undecided = true,
                (_, Some(l)) if l.coefficient(p) >= need => {
                    return Ok(report(DichotomyBranch::IndependentEscaper { index: i, green: g }));
                }
                _ => {}
            }
        }
        Ok(report(if undecided {
            DichotomyBranch::Undecided
        } else {
            DichotomyBranch::Violation
        }))
    }
}

pub fn local_dichotomy_check(
    sample: &PerSample,
    p: &BigUint,
    opts: &GreenOptions,
) -> Result<DichotomyReport> {
    DichotomyContext::new(sample, opts, OrbitBudget::default())?.check(p)
}

/// `1 / (2 (d-2)(5d-9))`.
pub fn epsilon(d: usize) -> Result<Rational> {
    if d < 3 {
        return Err(domain("epsilon is defined for d >= 3"));
    }
    let d = d as i64;
    Ok(Rational::new(1.into(), (2 * (d - 2) * (5 * d - 9)).into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarginClass {
    MarginHolds,
    BoundedHeightRegime,
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub h_c: f64,
    pub h_lambda: f64,
    /// Best pair with no detected relation: the largest `min(h_i, h_j)`;
    /// zero when every pair is related.
    pub min_pair: f64,
    pub pair: Option<(usize, usize)>,
    pub epsilon: Rational,
    pub eps_hc: f64,
    pub class: MarginClass,
}

pub fn theorem_margin(
    sample: &PerSample,
    opts: &GreenOptions,
    budget: OrbitBudget,
) -> Result<TheoremReport> {
    let d = sample.d();
    let eps = epsilon(d)?;
    let f = sample.cv.poly();
    let c = sample.c();
    let heights: Vec<CanonicalHeight> = c
        .iter()
        .map(|ci| canonical_height_green(&f, ci, opts))
        .collect::<Result<_>>()?;
    let mut best = 0.0_f64;
    let mut pair = None;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let dep = detect_dependence(&f, &c[i], &c[j], budget);
            if dep.found() {
                continue;
            }
            let m = heights[i].value.min(heights[j].value);
            if pair.is_none() || m > best {
                best = m;
                pair = Some((i, j));
            }
        }
    }
    let h_c = sample.h_c.to_f64();
    let eps_hc = h_c * eps.to_f64().unwrap_or(0.0);
    let class = if pair.is_some() && best >= eps_hc {
        MarginClass::MarginHolds
    } else {
        MarginClass::BoundedHeightRegime
    };
    Ok(TheoremReport {
        h_c,
        h_lambda: sample.h_lambda.to_f64(),
        min_pair: best,
        pair,
        epsilon: eps,
        eps_hc,
        class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn prime(p: u64) -> PlaceQ {
        PlaceQ::prime(p).unwrap()
    }

    #[test]
    fn sampling() {
        let s = sample_per1(3, &rat(1, 1), &[rat(7, 1)]).unwrap();
        assert_eq!(s.c(), &[rat(1, 7), rat(7, 1)]);
        let s = sample_per1(2, &rat(-3, 1), &[]).unwrap();
        assert_eq!(s.c(), &[rat(3, 1)]);
        let s = sample_per1(4, &rat(2, 1), &[rat(1, 1), rat(1, 1)]).unwrap();
        assert_eq!(s.c(), &[rat(-2, 1), rat(1, 1), rat(1, 1)]);
        assert_eq!(s.cv.poly().multiplier_at_zero(), rat(2, 1));
        assert!(sample_per1(3, &rat(0, 1), &[rat(1, 1)]).is_err());
        assert!(sample_per1(3, &rat(1, 1), &[rat(0, 1)]).is_err());
    }

    #[test]
    fn s_examples() {
        // |1/7|_7 = 7, so only the archimedean place sees c_1 small
        let s: Vec<PlaceQ> = s_places(&[rat(1, 7), rat(7, 1)]).unwrap().into_iter().collect();
        assert_eq!(s, alloc::vec![PlaceQ::Arch]);
        let s: Vec<PlaceQ> = s_places(&[rat(7, 1), rat(1, 7)]).unwrap().into_iter().collect();
        assert_eq!(s, alloc::vec![prime(7)]);
        // d = 2: the condition reads |c_1|_v < 1
        let s: Vec<PlaceQ> = s_places(&[rat(3, 1)]).unwrap().into_iter().collect();
        assert_eq!(s, alloc::vec![prime(3)]);
        assert!(s_places(&[rat(1, 1), rat(-1, 1)]).unwrap().is_empty());
    }

    #[test]
    fn sweight_examples() {
        let s = sample_per1(3, &rat(1, 1), &[rat(7, 1)]).unwrap();
        let r = sweight_check(&s).unwrap();
        assert_eq!(r.lhs, LogCombination::log_int(7));
        assert_eq!(r.rhs, LogCombination::log_int(7).scale(&rat(1, 3)));
        assert_eq!(r.margin, LogCombination::log_int(7).scale(&rat(2, 3)));
        let s = sample_per1(3, &rat(1, 1), &[rat(1, 1)]).unwrap();
        let r = sweight_check(&s).unwrap();
        assert!(r.lhs.is_zero() && r.rhs.is_zero());
        assert_eq!(r.sign, Ordering::Equal);
        let s = sample_per1(4, &rat(2, 1), &[rat(1, 1), rat(1, 1)]).unwrap();
        assert!(sweight_check(&s).unwrap().holds());
    }

    #[test]
    fn dichotomy_examples() {
        let s = sample_per1(3, &rat(1, 1), &[rat(7, 1)]).unwrap();
        let ctx = DichotomyContext::new(&s, &GreenOptions::default(), OrbitBudget::default())
            .unwrap();
        for p in ctx.good_primes(97) {
            let r = ctx.check(&p).unwrap();
            assert!(matches!(
                r.branch,
                DichotomyBranch::CBounded | DichotomyBranch::IndependentEscaper { .. }
            ));
        }
        assert!(ctx.check(&BigUint::from(5u32)).is_err());
        let s = sample_per1(3, &rat(1, 1), &[rat(1, 1)]).unwrap();
        let ctx = DichotomyContext::new(&s, &GreenOptions::default(), OrbitBudget::default())
            .unwrap();
        assert!(ctx.good_primes(97).is_empty());
    }

    #[test]
    fn epsilons() {
        assert_eq!(epsilon(3).unwrap(), rat(1, 12));
        assert_eq!(epsilon(4).unwrap(), rat(1, 44));
        assert!(epsilon(2).is_err());
    }

    #[test]
    fn related_pair_is_bounded_regime() {
        // c = (1, -1): f = z^3/3 - z is odd, so the critical orbits are related
        let s = sample_per1(3, &rat(-1, 1), &[rat(-1, 1)]).unwrap();
        assert_eq!(s.c(), &[rat(1, 1), rat(-1, 1)]);
        let r = theorem_margin(&s, &GreenOptions::default(), OrbitBudget::default()).unwrap();
        assert_eq!(r.pair, None);
        assert_eq!(r.min_pair, 0.0);
        assert_eq!(r.class, MarginClass::BoundedHeightRegime);
        let d2 = sample_per1(2, &rat(1, 1), &[]).unwrap();
        assert!(theorem_margin(&d2, &GreenOptions::default(), OrbitBudget::default()).is_err());
    }
}
