//! Normal-form polynomials over the function field `Q(t)`.
//!
//! Every place of `Q(t)` is non-archimedean with `|n|_v = 1` for integers
//! `n`, so the escape estimates hold with no error terms and every escape
//! rate is an exact rational (in units where `log |x|_v` is an integer).

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith::{Poly, Rational, RationalFunction};
use crate::error::{budget, domain, Error, Result};
use crate::places::{poly_ord, PlaceFF, PlaceGroups};
use crate::polydyn::{
    detect_dependence, DependenceKind, GreenStatus, NonarchData, NormalFormPoly, OrbitBudget,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FFCritVector {
    d: usize,
    c: Vec<RationalFunction>,
    lambda: Rational,
}

impl FFCritVector {
    /// Requires `(-1)^(d-1) prod c_i` to be a nonzero constant.
    pub fn new(c: Vec<RationalFunction>) -> Result<Self> {
        if c.is_empty() {
            return Err(domain("need at least one critical point (d >= 2)"));
        }
        let d = c.len() + 1;
        let mut prod = c.iter().fold(RationalFunction::one(), |acc, x| acc * x.clone());
        if d % 2 == 0 {
            prod = -prod;
        }
        let lambda = prod
            .as_constant()
            .ok_or_else(|| domain(alloc::format!("multiplier {prod} is not constant")))?;
        if lambda.is_zero() {
            return Err(domain("multiplier must be nonzero"));
        }
        Ok(Self { d, c, lambda })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn c(&self) -> &[RationalFunction] {
        &self.c
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn poly(&self) -> NormalFormPoly<RationalFunction> {
        NormalFormPoly::from_critical_points(self.c.clone())
            .expect("a nonempty critical vector always gives a polynomial")
    }
}

/// A finite place group (see [`PlaceGroups`]) or the place at infinity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FFSite {
    Group(Poly),
    Infinity,
}

impl FFSite {
    /// Total degree of the places the site stands for.
    pub fn weight(&self) -> usize {
        match self {
            Self::Group(q) => q.deg0(),
            Self::Infinity => 1,
        }
    }
}

impl fmt::Display for FFSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Group(q) => write!(f, "{q}"),
            Self::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FFGreenValue {
    /// Exact escape rate, zero unless escaped.
    pub value: Rational,
    pub status: GreenStatus,
}

#[derive(Clone, Copy, Debug)]
pub struct FFOptions {
    pub max_steps: usize,
    /// Abort once an iterate has degree above this.
    pub degree_budget: usize,
}

impl Default for FFOptions {
    fn default() -> Self {
        Self {
            max_steps: 64,
            degree_budget: 4096,
        }
    }
}

/// The group `q` must be split into these two parts first.
struct Split(Poly, Poly);

/// `log |x|_v / deg(pi)` for every `pi | q`, when it is the same for all.
fn group_log(x: &RationalFunction, q: &Poly) -> core::result::Result<i64, Split> {
    let part = |p: &Poly| -> core::result::Result<i64, Split> {
        let k = poly_ord(p, q);
        let mut rest = p.clone();
        for _ in 0..k {
            rest = rest.div_rem(q).0;
        }
        let g = Poly::gcd(&rest, q);
        if g.is_constant() {
            Ok(k as i64)
        } else {
            let other = q.div_rem(&g).0.monic();
            Err(Split(g, other))
        }
    };
    Ok(part(x.den())? - part(x.num())?)
}

fn site_log(x: &RationalFunction, site: &FFSite) -> core::result::Result<i64, Split> {
    match site {
        FFSite::Group(q) => group_log(x, q),
        FFSite::Infinity => Ok(x.num().deg0() as i64 - x.den().deg0() as i64),
    }
}

/// Escape rate at a site, per unit weight.
fn green_at(
    f: &NormalFormPoly<RationalFunction>,
    z: &RationalFunction,
    site: &FFSite,
    opts: &FFOptions,
) -> Result<core::result::Result<FFGreenValue, Split>> {
    let mut vals = Vec::new();
    for a in &f.coeffs()[1..] {
        if a.is_zero() {
            vals.push(None);
        } else {
            match site_log(a, site) {
                Ok(l) => vals.push(Some(-l)),
                Err(s) => return Ok(Err(s)),
            }
        }
    }
    let data = NonarchData::from_vals(BigUint::one(), vals);
    let disk = data.invariant_disk();
    let mut seen = BTreeSet::new();
    let mut w = z.clone();
    let mut n = 0;
    loop {
        let zero = FFGreenValue {
            value: Rational::zero(),
            status: GreenStatus::ExactZero,
        };
        if w.is_zero() {
            return Ok(Ok(zero));
        }
        let vw = match site_log(&w, site) {
            Ok(l) => -l,
            Err(s) => return Ok(Err(s)),
        };
        if data.escapes(vw) {
            return Ok(Ok(FFGreenValue {
                value: data.escape_units(vw, n),
                status: GreenStatus::EscapedAtStep(n),
            }));
        }
        if disk.is_some_and(|k| vw >= k) || !seen.insert(w.clone()) {
            return Ok(Ok(zero));
        }
        if n >= opts.max_steps {
            return Ok(Ok(FFGreenValue {
                value: Rational::zero(),
                status: GreenStatus::BoundedUpTo(n),
            }));
        }
        w = f.eval(&w);
        n += 1;
        if w.degree() > opts.degree_budget {
            return Err(budget(alloc::format!(
                "iterate {n} has degree {} > {}",
                w.degree(),
                opts.degree_budget
            )));
        }
    }
}

/// `G_v(z)` in the normalization `log |x|_v = -ord_pi(x) deg(pi)`.
pub fn ff_green(
    cv: &FFCritVector,
    z: &RationalFunction,
    v: &PlaceFF,
    opts: &FFOptions,
) -> Result<FFGreenValue> {
    let site = match v {
        PlaceFF::Finite(pi) => FFSite::Group(pi.clone()),
        PlaceFF::Infinity => FFSite::Infinity,
    };
    match green_at(&cv.poly(), z, &site, opts)? {
        Ok(mut g) => {
            g.value *= Rational::from_integer(site.weight().into());
            Ok(g)
        }
        Err(_) => Err(domain(alloc::format!("{v} is not irreducible"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FFLocal {
    pub site: FFSite,
    /// Weighted contribution `deg(site) * G`.
    pub value: Rational,
    pub status: GreenStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FFHeight {
    pub value: Rational,
    pub breakdown: Vec<FFLocal>,
    /// Sites whose iteration ran out of budget.
    pub truncated: Vec<FFSite>,
}

impl FFHeight {
    pub fn is_exact(&self) -> bool {
        self.truncated.is_empty()
            && self
                .breakdown
                .iter()
                .all(|l| !matches!(l.status, GreenStatus::BoundedUpTo(_)))
    }
}

/// Sites where `z` or some `c_i` is large, as coprime groups.
fn candidate_sites(cv: &FFCritVector, z: &RationalFunction) -> Vec<FFSite> {
    let mut groups = PlaceGroups::new();
    groups.add_poly(z.den());
    for c in cv.c() {
        groups.add_poly(c.den());
    }
    groups.uniformize_rf(z);
    for c in cv.c() {
        groups.uniformize_rf(c);
    }
    let mut out: Vec<FFSite> = groups.groups().iter().cloned().map(FFSite::Group).collect();
    out.push(FFSite::Infinity);
    out
}

/// Sum of local escape rates; elsewhere `|z|_v <= 1` and `||c||_v <= 1`
/// keep the orbit in the unit ball.
///
/// With `tolerant`, sites that exceed the degree budget are listed in
/// `truncated` instead of failing the whole computation.
fn height_terms(
    cv: &FFCritVector,
    z: &RationalFunction,
    opts: &FFOptions,
    tolerant: bool,
) -> Result<FFHeight> {
    let f = cv.poly();
    let mut work = candidate_sites(cv, z);
    let mut breakdown = Vec::new();
    let mut truncated = Vec::new();
    while let Some(site) = work.pop() {
        match green_at(&f, z, &site, opts) {
            Ok(Ok(g)) => {
                let value = g.value * Rational::from_integer(site.weight().into());
                breakdown.push(FFLocal {
                    site,
                    value,
                    status: g.status,
                });
            }
            Ok(Err(Split(a, b))) => {
                work.push(FFSite::Group(a));
                work.push(FFSite::Group(b));
            }
            Err(Error::Budget(_)) if tolerant => truncated.push(site),
            Err(e) => return Err(e),
        }
    }
    breakdown.sort_by(|a, b| a.site.cmp(&b.site));
    truncated.sort();
    let value = breakdown.iter().map(|l| l.value.clone()).sum();
    Ok(FFHeight {
        value,
        breakdown,
        truncated,
    })
}

/// `h_f(z)` over `Q(t)`; fails if some site exceeds the degree budget.
pub fn ff_canonical_height(
    cv: &FFCritVector,
    z: &RationalFunction,
    opts: &FFOptions,
) -> Result<FFHeight> {
    height_terms(cv, z, opts, false)
}

/// Like [`ff_canonical_height`], but records over-budget sites instead of
/// failing.
pub fn ff_canonical_height_partial(
    cv: &FFCritVector,
    z: &RationalFunction,
    opts: &FFOptions,
) -> Result<FFHeight> {
    height_terms(cv, z, opts, true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CinkVerdict {
    ConstantC,
    /// `c_i` and `c_j` have no detected relation and escape at the listed
    /// sites (exact positive rates).
    TwoEscapers {
        i: usize,
        j: usize,
        sites_i: Vec<(FFSite, Rational)>,
        sites_j: Vec<(FFSite, Rational)>,
    },
    Inconclusive(usize),
}

/// Either `c` is constant, or two critical points lie in different
/// (heuristic) dependence classes and both have infinite orbits.
pub fn cink_check(cv: &FFCritVector, opts: &FFOptions, dep: OrbitBudget) -> Result<CinkVerdict> {
    if isotriviality_check(cv) {
        return Ok(CinkVerdict::ConstantC);
    }
    let f = cv.poly();
    let mut escaping: Vec<(usize, Vec<(FFSite, Rational)>)> = Vec::new();
    let mut exact: Vec<Option<Rational>> = Vec::new();
    for (i, c) in cv.c().iter().enumerate() {
        let h = ff_canonical_height_partial(cv, c, opts)?;
        exact.push(h.is_exact().then(|| h.value.clone()));
        let sites: Vec<(FFSite, Rational)> = h
            .breakdown
            .into_iter()
            .filter(|l| l.value > Rational::zero())
            .map(|l| (l.site, l.value))
            .collect();
        if !sites.is_empty() {
            escaping.push((i, sites));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..escaping.len())
        .flat_map(|a| (a + 1..escaping.len()).map(move |b| (a, b)))
        .collect();
    let found = |a: usize, b: usize| CinkVerdict::TwoEscapers {
        i: escaping[a].0,
        j: escaping[b].0,
        sites_i: escaping[a].1.clone(),
        sites_j: escaping[b].1.clone(),
    };
    // pairs ruled out by their exact heights need no orbit search
    for &(a, b) in &pairs {
        let (i, j) = (escaping[a].0, escaping[b].0);
        if let (Some(hi), Some(hj)) = (&exact[i], &exact[j]) {
            if !power_ratio(hi, hj, cv.d()) {
                return Ok(found(a, b));
            }
        }
    }
    for &(a, b) in &pairs {
        let (i, j) = (escaping[a].0, escaping[b].0);
        let verdict = detect_dependence(&f, &cv.c()[i], &cv.c()[j], dep);
        if matches!(verdict.kind, DependenceKind::NoRelationFound(_)) {
            return Ok(found(a, b));
        }
    }
    Ok(CinkVerdict::Inconclusive(opts.max_steps))
}

/// Whether `a / b = d^k` for some integer `k`, for positive `a`, `b`.
///
/// A relation `f^n(a) = zeta f^m(b)` forces `d^n h(a) = d^m h(b)`, so
/// exact heights outside this pattern rule it out without iterating.
fn power_ratio(a: &Rational, b: &Rational, d: usize) -> bool {
    let d = Rational::from_integer(d.into());
    let (mut big, small) = if a >= b { (a.clone(), b) } else { (b.clone(), a) };
    if small.is_zero() {
        return big.is_zero();
    }
    while big > *small {
        big /= d.clone();
    }
    big == *small
}

/// Whether every critical point is constant. For the normal form this is
/// the same as being conjugate to a map over `Q`, and as `h(c) = 0`.
pub fn isotriviality_check(cv: &FFCritVector) -> bool {
    cv.c().iter().all(|c| c.is_constant())
}
