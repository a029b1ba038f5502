//! Absolute values, valuations and Weil heights over `Q` and `Q(t)`.
//!
//! Over `Q` the places are the archimedean one and one per prime, all with
//! weight one. Over `Q(t)` they are the monic irreducible polynomials `pi`
//! (with `|x|_pi = exp(-ord_pi(x) deg pi)`) and the place at infinity
//! (`|x|_inf = exp(deg num - deg den)`), so every local log is an integer.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{
    factor_rational, is_probable_prime, ln_abs_bigint, valuation, LogCombination, Poly, Rational,
    RationalFunction,
};
use crate::error::{domain, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceQ {
    Arch,
    Prime(BigUint),
}

impl PlaceQ {
    pub fn prime(p: u64) -> Result<Self> {
        Self::prime_big(BigUint::from(p))
    }

    pub fn prime_big(p: BigUint) -> Result<Self> {
        if !is_probable_prime(&p) {
            return Err(domain(alloc::format!("{p} is not prime")));
        }
        Ok(Self::Prime(p))
    }

    pub fn is_arch(&self) -> bool {
        matches!(self, Self::Arch)
    }

    pub fn prime_number(&self) -> Option<&BigUint> {
        match self {
            Self::Arch => None,
            Self::Prime(p) => Some(p),
        }
    }
}

impl fmt::Display for PlaceQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Arch => write!(f, "inf"),
            Self::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// `log |x|_v` as an exact combination of prime logs.
pub fn log_abs(x: &Rational, v: &PlaceQ) -> Result<LogCombination> {
    if x.is_zero() {
        return Err(domain("log of zero"));
    }
    match v {
        PlaceQ::Arch => LogCombination::log_abs_of(x),
        PlaceQ::Prime(p) => Ok(LogCombination::log_prime(
            p.clone(),
            Rational::from_integer(BigInt::from(-valuation(x, p))),
        )),
    }
}

/// `log |x|_v` in floating point; never factors.
pub fn log_abs_f64(x: &Rational, v: &PlaceQ) -> Result<f64> {
    if x.is_zero() {
        return Err(domain("log of zero"));
    }
    Ok(match v {
        PlaceQ::Arch => ln_abs_bigint(x.numer()) - ln_abs_bigint(x.denom()),
        PlaceQ::Prime(p) => -(valuation(x, p) as f64) * crate::arith::ln_biguint(p),
    })
}

/// Places where `|x|_v != 1`.
pub fn support(x: &Rational) -> Result<BTreeSet<PlaceQ>> {
    if x.is_zero() {
        return Err(domain("support of zero"));
    }
    let mut out: BTreeSet<PlaceQ> = factor_rational(x)?
        .into_iter()
        .map(|(p, _)| PlaceQ::Prime(p))
        .collect();
    if x.abs() != Rational::one() {
        out.insert(PlaceQ::Arch);
    }
    Ok(out)
}

/// Union of supports, skipping zeros.
pub fn joint_support<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Result<BTreeSet<PlaceQ>> {
    let mut out = BTreeSet::new();
    for x in xs {
        if !x.is_zero() {
            out.extend(support(x)?);
        }
    }
    Ok(out)
}

/// `log max_i |x_i|_v`, exact; `None` when every coordinate is zero.
pub fn log_norm(coords: &[Rational], v: &PlaceQ) -> Result<Option<LogCombination>> {
    let nonzero: Vec<&Rational> = coords.iter().filter(|x| !x.is_zero()).collect();
    if nonzero.is_empty() {
        return Ok(None);
    }
    match v {
        PlaceQ::Arch => {
            let m = crate::arith::rational_abs_max(nonzero.iter().copied());
            Ok(Some(LogCombination::log_abs_of(&m)?))
        }
        PlaceQ::Prime(p) => {
            let vmin = nonzero.iter().map(|x| valuation(x, p)).min().unwrap();
            Ok(Some(LogCombination::log_prime(
                p.clone(),
                Rational::from_integer(BigInt::from(-vmin)),
            )))
        }
    }
}

/// `log+ max_i |x_i|_v`, exact.
pub fn log_plus_norm(coords: &[Rational], v: &PlaceQ) -> Result<LogCombination> {
    match v {
        PlaceQ::Arch => {
            let m = crate::arith::rational_abs_max(coords.iter());
            if m <= Rational::one() {
                Ok(LogCombination::zero())
            } else {
                LogCombination::log_abs_of(&m)
            }
        }
        PlaceQ::Prime(_) => Ok(log_norm(coords, v)?
            .map(|l| l.positive_part())
            .unwrap_or_default()),
    }
}

/// Affine Weil height `h(x_1..x_n) = h([1 : x_1 : ... : x_n])`.
///
/// Computed from the primitive integral representative: with `L` the lcm
/// of the denominators, `gcd(L, L x_1, ..., L x_n) = 1`, so the height is
/// `log max(L, |L x_i|)`. Never factors.
pub fn height_affine(coords: &[Rational]) -> f64 {
    let l = coords
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut best = l.clone();
    for x in coords {
        let v = (x.numer() * (&l / x.denom())).abs();
        if v > best {
            best = v;
        }
    }
    ln_abs_bigint(&best)
}

pub fn height(x: &Rational) -> f64 {
    height_affine(core::slice::from_ref(x))
}

/// The same height as an exact sum of local terms over all places.
pub fn height_affine_exact(coords: &[Rational]) -> Result<LogCombination> {
    let mut places = joint_support(coords.iter())?;
    places.insert(PlaceQ::Arch);
    let mut out = LogCombination::zero();
    for v in &places {
        out += log_plus_norm(coords, v)?;
    }
    Ok(out)
}

pub fn height_exact(x: &Rational) -> Result<LogCombination> {
    height_affine_exact(core::slice::from_ref(x))
}

// ---------------------------------------------------------------------------
// Function field places.

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceFF {
    /// A monic irreducible polynomial over `Q`.
    Finite(Poly),
    Infinity,
}

impl PlaceFF {
    /// Validates irreducibility and normalizes to monic.
    pub fn finite(pi: Poly) -> Result<Self> {
        if !pi.is_irreducible()? {
            return Err(domain(alloc::format!("{pi} is not irreducible over Q")));
        }
        Ok(Self::Finite(pi.monic()))
    }

    pub fn weight(&self) -> usize {
        match self {
            Self::Finite(pi) => pi.deg0(),
            Self::Infinity => 1,
        }
    }
}

impl fmt::Display for PlaceFF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(pi) => write!(f, "{pi}"),
            Self::Infinity => write!(f, "inf"),
        }
    }
}

/// Multiplicity of the (squarefree) `q` in the nonzero polynomial `x`:
/// the largest `k` with `q^k | x`.
pub fn poly_ord(x: &Poly, q: &Poly) -> u64 {
    debug_assert!(!x.is_zero());
    let mut k = 0;
    let mut cur = x.clone();
    loop {
        let (quot, rem) = cur.div_rem(q);
        if !rem.is_zero() {
            return k;
        }
        cur = quot;
        k += 1;
    }
}

/// `ord_q(x) = ord_q(num) - ord_q(den)` for a nonzero rational function.
pub fn ff_ord(x: &RationalFunction, q: &Poly) -> i64 {
    poly_ord(x.num(), q) as i64 - poly_ord(x.den(), q) as i64
}

/// `log |x|_v` for nonzero `x`, an exact integer.
pub fn ff_log_abs(x: &RationalFunction, v: &PlaceFF) -> Result<i64> {
    if crate::arith::Field::is_zero(x) {
        return Err(domain("log of zero"));
    }
    Ok(match v {
        PlaceFF::Finite(pi) => -ff_ord(x, pi) * pi.deg0() as i64,
        PlaceFF::Infinity => x.num().deg0() as i64 - x.den().deg0() as i64,
    })
}

/// Pairwise coprime, squarefree, monic polynomials standing in for the
/// finite places they contain.
///
/// Every irreducible factor of a group is a place; the group is only used
/// for data on which all of its places agree (see [`PlaceGroups::uniformize`]),
/// so a group of degree `k` accounts for `k` times the common local value.
/// This replaces factoring over `Q` by gcd computations.
#[derive(Clone, Debug, Default)]
pub struct PlaceGroups {
    groups: Vec<Poly>,
}

impl PlaceGroups {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn groups(&self) -> &[Poly] {
        &self.groups
    }

    /// Adds the places dividing the nonzero polynomial `p`.
    pub fn add_poly(&mut self, p: &Poly) {
        if p.is_constant() {
            return;
        }
        let radical = p.div_rem(&Poly::gcd(p, &p.derivative())).0.monic();
        let mut pending = alloc::vec![radical];
        while let Some(mut a) = pending.pop() {
            let mut i = 0;
            while i < self.groups.len() && !a.is_constant() {
                let g = Poly::gcd(&a, &self.groups[i]);
                if g.is_constant() {
                    i += 1;
                    continue;
                }
                let b = self.groups.swap_remove(i);
                let rest_b = b.div_rem(&g).0.monic();
                a = a.div_rem(&g).0.monic();
                self.groups.push(g);
                if !rest_b.is_constant() {
                    pending.push(rest_b);
                }
                i = 0;
            }
            if !a.is_constant() {
                self.groups.push(a);
            }
        }
        self.groups.sort();
    }

    /// Splits groups until `ord_pi(p)` is the same for every place in
    /// each group.
    pub fn uniformize(&mut self, p: &Poly) {
        if p.is_zero() {
            return;
        }
        let mut i = 0;
        while i < self.groups.len() {
            let q = self.groups[i].clone();
            let k = poly_ord(p, &q);
            let mut rest = p.clone();
            for _ in 0..k {
                rest = rest.div_rem(&q).0;
            }
            let g = Poly::gcd(&rest, &q);
            if g.is_constant() {
                i += 1;
            } else {
                let other = q.div_rem(&g).0.monic();
                self.groups[i] = g;
                self.groups.push(other);
            }
        }
        self.groups.sort();
    }

    pub fn uniformize_rf(&mut self, x: &RationalFunction) {
        self.uniformize(x.num());
        self.uniformize(x.den());
    }
}

/// The local log at every group that divides `x`, plus infinity, as
/// `(group, weight-scaled log)` pairs.
pub fn ff_local_logs(x: &RationalFunction) -> Result<Vec<(PlaceFF, i64)>> {
    if crate::arith::Field::is_zero(x) {
        return Err(domain("log of zero"));
    }
    let mut groups = PlaceGroups::new();
    groups.add_poly(x.num());
    groups.add_poly(x.den());
    groups.uniformize_rf(x);
    let mut out: Vec<(PlaceFF, i64)> = groups
        .groups()
        .iter()
        .map(|q| (PlaceFF::Finite(q.clone()), -ff_ord(x, q) * q.deg0() as i64))
        .collect();
    out.push((PlaceFF::Infinity, ff_log_abs(x, &PlaceFF::Infinity)?));
    Ok(out)
}

/// `sum_v log |x|_v`, which the product formula forces to be zero.
pub fn ff_product_formula_sum(x: &RationalFunction) -> Result<i64> {
    Ok(ff_local_logs(x)?.into_iter().map(|(_, l)| l).sum())
}

/// `sum_v log+ max_i |x_i|_v` over `Q(t)`; zero exactly on constants.
pub fn ff_height_affine(coords: &[RationalFunction]) -> i64 {
    let mut groups = PlaceGroups::new();
    for x in coords {
        groups.add_poly(x.den());
    }
    for x in coords {
        groups.uniformize(x.den());
    }
    let finite: i64 = groups
        .groups()
        .iter()
        .map(|q| {
            let worst = coords.iter().map(|x| poly_ord(x.den(), q)).max().unwrap_or(0);
            worst as i64 * q.deg0() as i64
        })
        .sum();
    let inf = coords
        .iter()
        .filter(|x| !crate::arith::Field::is_zero(*x))
        .map(|x| x.num().deg0() as i64 - x.den().deg0() as i64)
        .max()
        .unwrap_or(0)
        .max(0);
    finite + inf
}
