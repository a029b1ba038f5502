//! Quadratic rational maps `f(z) = (l0 z + z^2) / (linf z + 1)`.
//!
//! The auxiliary parameter `w` with `l0 linf w^2 + 2w + 1 = 0` makes both
//! critical points rational, so everything here stays inside `Q`. The
//! family `z + a + 1/z`, which has a parabolic fixed point at infinity and
//! is missed by the normal form above, is handled at the end.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{format_rational, ln_abs_bigint, LogCombination, Rational, RationalFunction};
use crate::error::{domain, Error, Result};
use crate::perlambda::GUARD;
use crate::places::{height, height_exact, joint_support, log_abs, PlaceQ};
use crate::polydyn::{CanonicalHeight, OrbitBudget};

/// A point of `P^1(Q)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum P1 {
    Finite(Rational),
    Infinity,
}

impl P1 {
    pub fn height(&self) -> f64 {
        match self {
            Self::Finite(z) => height(z),
            Self::Infinity => 0.0,
        }
    }

    fn coords(&self) -> (BigInt, BigInt) {
        match self {
            Self::Finite(z) => (z.numer().clone(), z.denom().clone()),
            Self::Infinity => (BigInt::one(), BigInt::zero()),
        }
    }

    fn from_coords(x: &BigInt, y: &BigInt) -> Self {
        if y.is_zero() {
            Self::Infinity
        } else {
            Self::Finite(Rational::new(x.clone(), y.clone()))
        }
    }
}

impl fmt::Display for P1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(z) => f.write_str(&format_rational(z)),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

/// `log 2` and `log 3` as exact combinations.
fn log2() -> LogCombination {
    LogCombination::log_int(2)
}

fn log3() -> LogCombination {
    LogCombination::log_int(3)
}

/// `47 log 2 + 6 log 3`, the height cap for maps with a finite critical
/// orbit when `l0` is a root of unity.
pub fn root_of_unity_cap() -> f64 {
    47.0 * core::f64::consts::LN_2 + 6.0 * libm::log(3.0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadMap {
    lambda0: Rational,
    w: Rational,
    lambda_inf: Rational,
    zeta: [Rational; 2],
    xi: [Rational; 2],
}

impl QuadMap {
    pub fn from_lambda_w(lambda0: Rational, w: Rational) -> Result<Self> {
        if lambda0.is_zero() {
            return Err(domain("lambda0 must be nonzero"));
        }
        if w.is_zero() {
            return Err(domain("w must be nonzero"));
        }
        let two_w_1 = &w * Rational::from_integer(2.into()) + Rational::one();
        if two_w_1.is_zero() {
            return Err(domain("w = -1/2 collapses the second critical point"));
        }
        let lambda_inf = -&two_w_1 / (&lambda0 * &w * &w);
        let z1 = &lambda0 * &w;
        let z2 = -&z1 / &two_w_1;
        let xi = [-(&z1 * &z1), -(&z2 * &z2)];
        Ok(Self {
            lambda0,
            w,
            lambda_inf,
            zeta: [z1, z2],
            xi,
        })
    }

    pub fn lambda0(&self) -> &Rational {
        &self.lambda0
    }

    pub fn w(&self) -> &Rational {
        &self.w
    }

    pub fn lambda_inf(&self) -> &Rational {
        &self.lambda_inf
    }

    pub fn critical_points(&self) -> &[Rational; 2] {
        &self.zeta
    }

    pub fn branch_points(&self) -> &[Rational; 2] {
        &self.xi
    }

    /// The parameter of the same map with the critical points swapped.
    pub fn involution(w: &Rational) -> Rational {
        -w / (w * Rational::from_integer(2.into()) + Rational::one())
    }

    /// `1 - l0 linf = (w + 1)^2 / w^2`: the map drops degree only at `w = -1`.
    pub fn is_degenerate(&self) -> bool {
        self.w == -Rational::one()
    }

    /// Numerator of `f'`, namely `linf z^2 + 2z + l0`.
    pub fn derivative_numerator(&self, z: &Rational) -> Rational {
        &self.lambda_inf * z * z + z * Rational::from_integer(2.into()) + &self.lambda0
    }

    pub fn eval(&self, z: &P1) -> P1 {
        if self.is_degenerate() && *z == P1::Finite(-self.lambda0.clone()) {
            // common zero of the lift; there f reduces to l0 z
            return P1::Finite(-(&self.lambda0 * &self.lambda0));
        }
        self.lift().eval(z)
    }

    /// The homogeneous lift `(x^2 + l0 xy, linf xy + y^2)`.
    fn lift(&self) -> Lift {
        let (o, z) = (Rational::one(), Rational::zero());
        Lift([
            [o.clone(), self.lambda0.clone(), z.clone()],
            [z, self.lambda_inf.clone(), o],
        ])
    }

    /// A constant `B` with `|h(f(P)) - 2 h(P)| <= B` on all of `P^1(Q)`;
    /// see [`Lift::tail_bound`].
    pub fn tail_bound(&self) -> Result<f64> {
        if self.is_degenerate() {
            return Err(domain("w = -1 gives 1 - lambda0 lambda_inf = 0"));
        }
        self.lift().tail_bound()
    }
}

/// A degree-2 map on `P^1` as two binary quadratic forms, coefficients of
/// `x^2, xy, y^2`.
#[derive(Clone, Debug)]
struct Lift([[Rational; 3]; 2]);

impl Lift {
    /// Integral forms proportional to the pair.
    fn integral(&self) -> [[BigInt; 3]; 2] {
        let l = self.0.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale = |r: &Rational| (r * Rational::from_integer(l.clone())).to_integer();
        [0, 1].map(|i| [0, 1, 2].map(|j| scale(&self.0[i][j])))
    }

    fn eval(&self, z: &P1) -> P1 {
        let (x, y) = z.coords();
        let [a, b] = self.integral();
        P1::from_coords(&apply(&a, &x, &y), &apply(&b, &x, &y))
    }

    /// `B` with `|h(F(P)) - 2 h(P)| <= B`.
    ///
    /// The upper side is the coefficient height plus `log 2` (two monomials
    /// per coordinate at the real place). For the lower side, linear forms
    /// `G` with `G_1 F_1 + G_2 F_2 = x^3` and `H_1 F_1 + H_2 F_2 = y^3` give
    /// `||P||^3 <= 4 max|G,H| ||P|| ||F(P)||` at the real place and the
    /// ultrametric analogue elsewhere; summing over places costs the
    /// projective height of the `G, H` coefficients plus `log 4`. The forms
    /// exist exactly when the resultant is nonzero.
    fn tail_bound(&self) -> Result<f64> {
        let z = Rational::zero();
        let [a, b] = &self.0;
        // rows x F1, y F1, x F2, y F2 in the basis x^3, x^2 y, x y^2, y^3
        let row = |f: &[Rational; 3], shift: bool| -> [Rational; 4] {
            if shift {
                [z.clone(), f[0].clone(), f[1].clone(), f[2].clone()]
            } else {
                [f[0].clone(), f[1].clone(), f[2].clone(), z.clone()]
            }
        };
        let m = [row(a, false), row(a, true), row(b, false), row(b, true)];
        let singular = || domain("the lift has a common zero");
        let mut g = solve_transposed(&m, 0).ok_or_else(singular)?;
        g.extend(solve_transposed(&m, 3).ok_or_else(singular)?);
        let coeffs: Vec<Rational> = self.0.iter().flatten().cloned().collect();
        let upper = projective_height(&coeffs) + core::f64::consts::LN_2;
        let lower = projective_height(&g) + 2.0 * core::f64::consts::LN_2;
        Ok(upper.max(lower))
    }

    /// Exact projective orbit with heights, stopping at a repeat, at the
    /// budget, or once the height passes `escape`.
    fn orbit(&self, z: &P1, budget: OrbitBudget, escape: Option<f64>) -> P1Orbit {
        let [a, b] = self.integral();
        let (mut x, mut y) = z.coords();
        let mut out = P1Orbit {
            points: Vec::new(),
            heights: Vec::new(),
            repeat: None,
        };
        loop {
            let h = ln_abs_bigint(&x.abs().max(y.abs()));
            if let Some(i) = out.points.iter().position(|p| p.0 == x && p.1 == y) {
                out.repeat = Some(i);
                return out;
            }
            out.points.push((x.clone(), y.clone()));
            out.heights.push(h);
            let done = out.points.len() > budget.steps
                || x.bits().max(y.bits()) > budget.size_bits
                || escape.is_some_and(|e| h > e);
            if done {
                return out;
            }
            let (u, v) = (apply(&a, &x, &y), apply(&b, &x, &y));
            let g = u.gcd(&v);
            x = u / &g;
            y = v / &g;
        }
    }

    /// `h(F^n z) / 2^n` with tail `B / 2^n`; exact zero on a detected cycle.
    fn canonical_height(&self, z: &P1, budget: OrbitBudget) -> Result<CanonicalHeight> {
        let b = self.tail_bound()?;
        let orbit = self.orbit(z, budget, None);
        if orbit.repeat.is_some() {
            return Ok(CanonicalHeight {
                value: 0.0,
                error: 0.0,
                breakdown: BTreeMap::new(),
            });
        }
        let n = orbit.heights.len() - 1;
        let scale = libm::ldexp(1.0, -(n as i32));
        Ok(CanonicalHeight {
            value: orbit.heights[n] * scale,
            error: b * scale,
            breakdown: BTreeMap::new(),
        })
    }
}

fn apply(f: &[BigInt; 3], x: &BigInt, y: &BigInt) -> BigInt {
    &f[0] * x * x + &f[1] * x * y + &f[2] * y * y
}

/// Solves `a M = e_k` for the row vector `a`.
fn solve_transposed(m: &[[Rational; 4]; 4], k: usize) -> Option<Vec<Rational>> {
    let n = 4;
    // augmented system M^T a = e_k
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r: Vec<Rational> = (0..n).map(|j| m[j][i].clone()).collect();
            r.push(if i == k { Rational::one() } else { Rational::zero() });
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, piv);
        let inv = rows[col][col].recip();
        for x in rows[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..=n {
                    let t = &rows[col][c] * &f;
                    rows[r][c] -= t;
                }
            }
        }
    }
    Some(rows.into_iter().map(|r| r[n].clone()).collect())
}

/// `h([x_0 : ... : x_n])` for a nonzero rational vector.
fn projective_height(xs: &[Rational]) -> f64 {
    let l = xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = xs
        .iter()
        .map(|x| x.numer() * (&l / x.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let top = ints.iter().map(|x| x.abs()).max().unwrap_or_default();
    ln_abs_bigint(&top) - ln_abs_bigint(&g)
}

struct P1Orbit {
    points: Vec<(BigInt, BigInt)>,
    heights: Vec<f64>,
    repeat: Option<usize>,
}

/// `h(f^n z) / 2^n` with tail `B / 2^n`; exact zero on a detected cycle.
///
/// The estimate uses the deepest iterate reached within `budget`.
pub fn canonical_height_p1(q: &QuadMap, z: &P1, budget: OrbitBudget) -> Result<CanonicalHeight> {
    q.tail_bound()?;
    q.lift().canonical_height(z, budget)
}

/// `S = { v : log|w|_v > log+|1/l0|_v + C_v }` with `C_v = log 2` at the
/// real and 2-adic places and zero elsewhere.
pub fn s_places_quad(q: &QuadMap) -> Result<alloc::collections::BTreeSet<PlaceQ>> {
    let mut places = joint_support([&q.w, &q.lambda0])?;
    places.insert(PlaceQ::Arch);
    let two = PlaceQ::Prime(2u32.into());
    places.insert(two.clone());
    let inv = q.lambda0.recip();
    let mut out = alloc::collections::BTreeSet::new();
    for v in places {
        let lhs = log_abs(&q.w, &v)?;
        let mut rhs = log_abs(&inv, &v)?.positive_part();
        if v.is_arch() || v == two {
            rhs += log2();
        }
        if lhs.cmp_with_tolerance(&rhs, 0.0) == Ordering::Greater {
            out.insert(v);
        }
    }
    Ok(out)
}

/// An inequality `lhs >= rhs` evaluated exactly.
#[derive(Clone, Debug)]
pub struct HalfheightReport {
    pub lhs: LogCombination,
    pub rhs: LogCombination,
    pub margin: LogCombination,
    pub sign: Ordering,
}

impl HalfheightReport {
    pub fn holds(&self) -> bool {
        self.sign != Ordering::Less
    }
}

/// `sum_{v in S} log+|1/linf|_v >= h(linf)/2 - 5/2 h(l0) - 7/2 log 2`.
pub fn halfheight_check(q: &QuadMap) -> Result<HalfheightReport> {
    let s = s_places_quad(q)?;
    let inv = q.lambda_inf.recip();
    let mut lhs = LogCombination::zero();
    for v in &s {
        lhs += log_abs(&inv, v)?.positive_part();
    }
    let half = Rational::new(1.into(), 2.into());
    let rhs = height_exact(&q.lambda_inf)?.scale(&half)
        - height_exact(&q.lambda0)?.scale(&Rational::new(5.into(), 2.into()))
        - log2().scale(&Rational::new(7.into(), 2.into()));
    let margin = lhs.clone() - rhs.clone();
    let sign = margin.cmp_with_tolerance(&LogCombination::zero(), GUARD);
    Ok(HalfheightReport {
        lhs,
        rhs,
        margin,
        sign,
    })
}

/// `h(linf)/32 - 25/32 h(l0) - 47/32 log 2 - 3/16 log 3`.
pub fn quad2_bound(q: &QuadMap) -> Result<LogCombination> {
    let r = |a: i64, b: i64| Rational::new(a.into(), b.into());
    Ok(height_exact(&q.lambda_inf)?.scale(&r(1, 32))
        - height_exact(&q.lambda0)?.scale(&r(25, 32))
        - log2().scale(&r(47, 32))
        - log3().scale(&r(3, 16)))
}

#[derive(Clone, Debug)]
pub struct Quad2Report {
    pub heights: [CanonicalHeight; 2],
    pub min_height: f64,
    /// Extrapolation error attached to the smaller height.
    pub error: f64,
    pub bound: f64,
    /// `min + error - bound`; nonnegative when the bound is confirmed.
    pub margin: f64,
}

impl Quad2Report {
    pub fn holds(&self) -> bool {
        self.margin >= -GUARD
    }
}

/// Checks the lower bound on both critical heights.
pub fn quad2_check(q: &QuadMap, budget: OrbitBudget) -> Result<Quad2Report> {
    let heights = [
        canonical_height_p1(q, &P1::Finite(q.zeta[0].clone()), budget)?,
        canonical_height_p1(q, &P1::Finite(q.zeta[1].clone()), budget)?,
    ];
    let k = if heights[0].value <= heights[1].value { 0 } else { 1 };
    let bound = quad2_bound(q)?.to_f64();
    let (min_height, error) = (heights[k].value, heights[k].error);
    Ok(Quad2Report {
        margin: min_height + error - bound,
        heights,
        min_height,
        error,
        bound,
    })
}

// ---------------------------------------------------------------------------
// The family z + a + 1/z.

/// `f_a(z) = z + a + 1/z` over `Q`, with critical points `+-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChebMap {
    a: Rational,
}

impl ChebMap {
    pub fn new(a: Rational) -> Self {
        Self { a }
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    /// `(x^2 + a xy + y^2, xy)`; the forms never share a zero.
    fn lift(&self) -> Lift {
        let (o, z) = (Rational::one(), Rational::zero());
        Lift([[o.clone(), self.a.clone(), o.clone()], [z.clone(), o, z]])
    }

    pub fn eval(&self, z: &P1) -> P1 {
        self.lift().eval(z)
    }

    pub fn tail_bound(&self) -> Result<f64> {
        self.lift().tail_bound()
    }
}

/// `h(f^n z) / 2^n` for `f = z + a + 1/z`, with tail `B / 2^n`.
pub fn cheb_canonical_height(f: &ChebMap, z: &P1, budget: OrbitBudget) -> Result<CanonicalHeight> {
    f.lift().canonical_height(z, budget)
}

/// `f^n(z0)` for `f(z) = z + a + 1/z` over `Q(a)`.
pub fn cheb_iterate(z0: &Rational, n: usize) -> Result<RationalFunction> {
    if n > 8 {
        return Err(crate::error::budget("cheb iteration capped at n = 8"));
    }
    let a = RationalFunction::t();
    let mut z = RationalFunction::constant(z0.clone());
    for step in 0..n {
        let inv = z.inv().ok_or_else(|| Error::Numeric {
            step,
            what: "orbit hit zero".into(),
        })?;
        z = z + a.clone() + inv;
    }
    Ok(z)
}

/// Both critical orbits have `deg_a f^n(+-1) = 2^(n-1)`.
pub fn cheb_degree_check(n: usize) -> Result<bool> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let want = 1usize << (n - 1);
    for s in [1i64, -1] {
        if cheb_iterate(&Rational::from_integer(s.into()), n)?.degree() != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fixed points of `z + a + 1/z` with their multipliers.
///
/// Infinity is always fixed and parabolic; for `a != 0` the only affine
/// fixed point is `-1/a` with multiplier `1 - a^2`.
pub fn cheb_fixed_multiplier(a: &Rational) -> Vec<(P1, Rational)> {
    let mut out = Vec::new();
    if !a.is_zero() {
        out.push((P1::Finite(-a.recip()), Rational::one() - a * a));
    }
    out.push((P1::Infinity, Rational::one()));
    out
}

// ---------------------------------------------------------------------------
// Census of maps with a finite critical orbit.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CritOrbit {
    /// Preperiodic with the given tail and cycle lengths.
    Finite { tail: usize, cycle: usize },
    /// Height passed the tail bound at this step, so the orbit is infinite.
    Infinite { step: usize },
    Undecided { steps: usize },
}

impl CritOrbit {
    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite { .. })
    }
}

/// Classifies the forward orbit of `z`; a point of canonical height zero
/// has naive height at most `B`, so passing `B` certifies an infinite orbit.
pub fn classify_orbit(q: &QuadMap, z: &P1, budget: OrbitBudget) -> Result<CritOrbit> {
    let b = q.tail_bound()?;
    let orbit = q.lift().orbit(z, budget, Some(b));
    let n = orbit.points.len();
    Ok(match orbit.repeat {
        Some(i) => CritOrbit::Finite {
            tail: i,
            cycle: n - i,
        },
        None if orbit.heights[n - 1] > b => CritOrbit::Infinite { step: n - 1 },
        None => CritOrbit::Undecided { steps: n - 1 },
    })
}

#[derive(Clone, Debug)]
pub struct CensusEntry {
    pub map: QuadMap,
    pub h_lambda_inf: f64,
    pub orbits: [CritOrbit; 2],
}

impl CensusEntry {
    /// Some critical orbit was left undecided.
    pub fn truncated(&self) -> bool {
        self.orbits
            .iter()
            .any(|o| matches!(o, CritOrbit::Undecided { .. }))
    }

    /// Sort key `(|p|, q, sign)` for `w = p/q`.
    pub fn sort_key(&self) -> (BigInt, BigInt, bool) {
        let w = &self.map.w;
        (w.numer().abs(), w.denom().clone(), w.is_negative())
    }
}

/// Processes one parameter `w = p/q`; `None` when filtered out.
pub fn census_candidate(
    lambda0: &Rational,
    w: &Rational,
    height_cap: f64,
    budget: OrbitBudget,
) -> Result<Option<CensusEntry>> {
    if w.is_zero() || *w == Rational::new((-1).into(), 2.into()) || *w == -Rational::one() {
        return Ok(None);
    }
    let map = QuadMap::from_lambda_w(lambda0.clone(), w.clone())?;
    let h = height(&map.lambda_inf);
    if h > height_cap {
        return Ok(None);
    }
    let orbits = [
        classify_orbit(&map, &P1::Finite(map.zeta[0].clone()), budget)?,
        classify_orbit(&map, &P1::Finite(map.zeta[1].clone()), budget)?,
    ];
    if !orbits.iter().any(CritOrbit::is_finite) {
        return Ok(None);
    }
    if h > root_of_unity_cap() + GUARD {
        return Err(Error::Violation(format!(
            "w = {} has a finite critical orbit but h(lambda_inf) = {h} exceeds the cap",
            format_rational(w)
        )));
    }
    Ok(Some(CensusEntry {
        map,
        h_lambda_inf: h,
        orbits,
    }))
}

/// Parameters `w = p/q` with `max(|p|, q) <= den_cap`, in census order.
pub fn census_parameters(den_cap: u64) -> Vec<Rational> {
    let mut out = Vec::new();
    for p in 1..=den_cap {
        for q in 1..=den_cap {
            if p.gcd(&q) == 1 {
                for s in [1i64, -1] {
                    out.push(Rational::new(BigInt::from(p) * s, q.into()));
                }
            }
        }
    }
    out
}

/// Maps with `l0 = +-1`, `h(linf) <= height_cap` and some finite
/// critical orbit, sorted by `(|p|, q, sign)`.
pub fn census_search(
    lambda0: &Rational,
    height_cap: f64,
    den_cap: u64,
    budget: OrbitBudget,
) -> Result<Vec<CensusEntry>> {
    if lambda0.abs() != Rational::one() {
        return Err(domain("census runs over lambda0 = 1 or -1"));
    }
    let mut out = Vec::new();
    for w in census_parameters(den_cap) {
        if let Some(e) = census_candidate(lambda0, &w, height_cap, budget)? {
            out.push(e);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{parse_rational, Poly};
    use alloc::collections::BTreeSet;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn q(l0: &str, w: &str) -> QuadMap {
        QuadMap::from_lambda_w(rat(l0), rat(w)).unwrap()
    }

    /// Direct evaluation of `(l0 z + z^2) / (linf z + 1)`.
    fn naive_f(m: &QuadMap, z: &Rational) -> Option<Rational> {
        let den = m.lambda_inf() * z + Rational::one();
        (!den.is_zero()).then(|| (m.lambda0() * z + z * z) / den)
    }

    #[test]
    fn parametrization() {
        let m = q("1", "1");
        assert_eq!(*m.lambda_inf(), rat("-3"));
        assert_eq!(m.critical_points(), &[rat("1"), rat("-1/3")]);
        assert_eq!(m.branch_points(), &[rat("-1"), rat("-1/9")]);
        assert_eq!(naive_f(&m, &rat("1")), Some(rat("-1")));
        assert_eq!(naive_f(&m, &rat("-1/3")), Some(rat("-1/9")));
        assert_eq!(*q("1", "1/10").lambda_inf(), rat("-120"));
        assert!(QuadMap::from_lambda_w(rat("1"), rat("-1/2")).is_err());
        assert!(QuadMap::from_lambda_w(rat("0"), rat("1")).is_err());
        assert!(QuadMap::from_lambda_w(rat("1"), rat("0")).is_err());
    }

    #[test]
    fn projective_eval_matches_naive() {
        let m = q("2/3", "5/7");
        for z in ["0", "1", "-4/5", "9/2"] {
            let z = rat(z);
            assert_eq!(m.eval(&P1::Finite(z.clone())), P1::Finite(naive_f(&m, &z).unwrap()));
        }
        let pole = -m.lambda_inf().recip();
        assert_eq!(m.eval(&P1::Finite(pole)), P1::Infinity);
        assert_eq!(m.eval(&P1::Infinity), P1::Infinity);
    }

    #[test]
    fn tail_bound_holds_on_samples() {
        for (l0, w) in [("1", "1"), ("1", "1/10"), ("-1", "3/4"), ("7/2", "-5/3")] {
            let m = q(l0, w);
            let b = m.tail_bound().unwrap();
            for num in -12i64..=12 {
                for den in 1i64..=6 {
                    let z = P1::Finite(Rational::new(num.into(), den.into()));
                    let diff = m.eval(&z).height() - 2.0 * z.height();
                    assert!(diff.abs() <= b + 1e-12, "{l0} {w} {z}: {diff} vs {b}");
                }
            }
        }
        assert!(q("1", "-1").tail_bound().is_err());
    }

    #[test]
    fn heights() {
        let m = q("1", "1");
        let budget = OrbitBudget { steps: 12, size_bits: 1 << 16 };
        for z in [P1::Finite(rat("0")), P1::Infinity, P1::Finite(rat("1"))] {
            let h = canonical_height_p1(&m, &z, budget).unwrap();
            assert_eq!((h.value, h.error), (0.0, 0.0), "{z}");
        }
        let z = P1::Finite(rat("2"));
        let b = m.tail_bound().unwrap();
        for n in [6usize, 8, 10] {
            let lo = canonical_height_p1(&m, &z, OrbitBudget { steps: n, ..budget }).unwrap();
            let hi = canonical_height_p1(&m, &z, OrbitBudget { steps: n + 3, ..budget }).unwrap();
            assert!((lo.value - hi.value).abs() <= b * libm::ldexp(1.0, -(n as i32)));
            assert!(hi.value > 0.0);
        }
    }

    fn places(ps: &[u64]) -> BTreeSet<PlaceQ> {
        ps.iter()
            .map(|&p| if p == 0 { PlaceQ::Arch } else { PlaceQ::prime(p).unwrap() })
            .collect()
    }

    #[test]
    fn s_sets() {
        assert_eq!(s_places_quad(&q("1", "1/10")).unwrap(), places(&[5]));
        assert_eq!(s_places_quad(&q("1", "1")).unwrap(), places(&[]));
        assert_eq!(s_places_quad(&q("1", "8")).unwrap(), places(&[0]));
        // 1/8 is 2-adically large: log 8 > 0 + log 2
        assert_eq!(s_places_quad(&q("1", "1/8")).unwrap(), places(&[2]));
    }

    #[test]
    fn halfheight_examples() {
        let r = halfheight_check(&q("1", "1/10")).unwrap();
        assert!((r.lhs.to_f64() - libm::log(5.0)).abs() < 1e-12);
        let rhs = 0.5 * libm::log(120.0) - 3.5 * core::f64::consts::LN_2;
        assert!((r.rhs.to_f64() - rhs).abs() < 1e-12);
        assert!((r.margin.to_f64() - 1.642).abs() < 1e-3);
        assert!(r.holds());
        let r = halfheight_check(&q("1", "1")).unwrap();
        assert!(r.lhs.is_zero());
        assert!(r.rhs.to_f64() < 0.0 && r.holds());
    }

    #[test]
    fn quad2_examples() {
        let m = q("1", "1/10");
        let r = quad2_check(&m, OrbitBudget { steps: 10, size_bits: 1 << 16 }).unwrap();
        let want = libm::log(120.0) / 32.0
            - 47.0 / 32.0 * core::f64::consts::LN_2
            - 3.0 / 16.0 * libm::log(3.0);
        assert!((r.bound - want).abs() < 1e-12);
        assert!((r.bound + 1.074).abs() < 1e-3);
        assert!(r.holds());
        assert!((root_of_unity_cap() - 39.17).abs() < 5e-3);
    }

    #[test]
    fn cheb_degrees() {
        let f2 = cheb_iterate(&rat("1"), 2).unwrap();
        let a = RationalFunction::t();
        let two = RationalFunction::constant(rat("2"));
        let want_num = (two.clone() + a.clone() + a.clone()) * (two.clone() + a.clone())
            + RationalFunction::one();
        let want = want_num * (two + a).inv().unwrap();
        assert_eq!(f2, want);
        assert_eq!(cheb_iterate(&rat("1"), 1).unwrap().num(), &Poly::from_ints(&[2, 1]));
        for n in 1..=6 {
            assert!(cheb_degree_check(n).unwrap(), "n = {n}");
        }
        assert_eq!(cheb_iterate(&rat("1"), 4).unwrap().degree(), 8);
        assert!(cheb_degree_check(9).is_err());
    }

    #[test]
    fn cheb_fixed_points() {
        let fp = cheb_fixed_multiplier(&rat("1"));
        assert_eq!(fp, [(P1::Finite(rat("-1")), rat("0")), (P1::Infinity, rat("1"))]);
        let fp = cheb_fixed_multiplier(&rat("2"));
        assert_eq!(fp[0], (P1::Finite(rat("-1/2")), rat("-3")));
        assert_eq!(cheb_fixed_multiplier(&rat("0")), [(P1::Infinity, rat("1"))]);
        // direct check of f(z) = z and f'(z) = 1 - 1/z^2
        let a = rat("5/3");
        let (P1::Finite(z), mult) = &cheb_fixed_multiplier(&a)[0] else { panic!() };
        assert_eq!(z + &a + z.recip(), *z);
        assert_eq!(Rational::one() - (z * z).recip(), *mult);
    }

    #[test]
    fn cheb_heights() {
        let f = ChebMap::new(rat("3"));
        assert_eq!(f.eval(&P1::Finite(rat("1"))), P1::Finite(rat("5")));
        assert_eq!(f.eval(&P1::Finite(rat("0"))), P1::Infinity);
        assert_eq!(f.eval(&P1::Infinity), P1::Infinity);
        let budget = OrbitBudget { steps: 12, size_bits: 1 << 18 };
        let inf = cheb_canonical_height(&f, &P1::Infinity, budget).unwrap();
        assert_eq!(inf.value, 0.0);
        // a = 0: +-1 -> +-2 -> +-5/2 ..., z + 1/z
        let g = ChebMap::new(rat("0"));
        assert_eq!(g.eval(&P1::Finite(rat("2"))), P1::Finite(rat("5/2")));
        for k in 3..=6 {
            let a = Rational::from_integer(num_traits::pow(BigInt::from(10), k));
            let f = ChebMap::new(a.clone());
            let h = cheb_canonical_height(&f, &P1::Finite(rat("1")), budget).unwrap();
            let slope = h.value / height(&a);
            assert!((0.4..=0.6).contains(&slope), "k = {k}: {slope}");
        }
    }

    #[test]
    fn census_small() {
        let budget = OrbitBudget { steps: 24, size_bits: 1 << 12 };
        let e = census_candidate(&rat("1"), &rat("1"), 8.0, budget).unwrap().unwrap();
        assert_eq!(e.orbits[0], CritOrbit::Finite { tail: 2, cycle: 1 });
        assert!((e.h_lambda_inf - libm::log(3.0)).abs() < 1e-12);
        assert!(census_candidate(&rat("1"), &rat("-1"), 8.0, budget).unwrap().is_none());
        let rows = census_search(&rat("1"), 8.0, 6, budget).unwrap();
        assert!(rows.iter().any(|r| r.map.w() == &rat("1")));
        let keys: Vec<_> = rows.iter().map(CensusEntry::sort_key).collect();
        assert!(keys.windows(2).all(|k| k[0] < k[1]));
        for r in &rows {
            assert!(r.h_lambda_inf <= root_of_unity_cap());
        }
        assert!(census_search(&rat("2"), 8.0, 4, budget).is_err());
    }
}
