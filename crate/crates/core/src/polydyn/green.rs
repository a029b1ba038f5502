//! Escape-rate (Green's) functions `G_v(z) = lim d^-n log+ |f^n(z)|_v`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{
    bits, ln_abs_rational, ln_biguint, valuation, Interval, LogCombination, Padic, PadicCtx,
    Rational,
};
use crate::error::{Error, Result};

use super::NormalFormPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GreenStatus {
    EscapedAtStep(usize),
    BoundedUpTo(usize),
    ExactZero,
}

/// A local escape rate with a rigorous error radius.
///
/// `value` is zero unless the orbit was seen to escape. For a bounded
/// status `error` is an upper bound for the true value. At
/// non-archimedean places an escape value is exact and `exact` holds it.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenValue {
    pub value: f64,
    pub error: f64,
    pub status: GreenStatus,
    pub exact: Option<LogCombination>,
}

impl GreenValue {
    pub fn exact_zero() -> Self {
        Self {
            value: 0.0,
            error: 0.0,
            status: GreenStatus::ExactZero,
            exact: Some(LogCombination::zero()),
        }
    }

    fn exact(l: LogCombination, step: usize) -> Self {
        Self {
            value: l.to_f64(),
            error: 0.0,
            status: GreenStatus::EscapedAtStep(step),
            exact: Some(l),
        }
    }

    fn bounded(steps: usize, bound: f64) -> Self {
        Self {
            value: 0.0,
            error: bound.max(0.0),
            status: GreenStatus::BoundedUpTo(steps),
            exact: None,
        }
    }

    pub fn lower(&self) -> f64 {
        (self.value - self.error).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error
    }

    pub fn is_escaped(&self) -> bool {
        matches!(self.status, GreenStatus::EscapedAtStep(_))
    }
}

#[derive(Clone, Debug)]
pub struct GreenOptions {
    pub arch_steps: usize,
    pub nonarch_steps: usize,
    /// Size cap (numerator plus denominator bits) for exact orbit prefixes.
    pub exact_bits: u64,
    pub padic_start_cap: u32,
    pub padic_max_cap: u32,
}

impl Default for GreenOptions {
    fn default() -> Self {
        Self {
            arch_steps: 200,
            nonarch_steps: 10_000,
            exact_bits: 1 << 12,
            padic_start_cap: 64,
            padic_max_cap: 1024,
        }
    }
}

// ---------------------------------------------------------------------------
// Non-archimedean places.

/// Valuation data of `f` at one prime.
#[derive(Clone, Debug)]
pub(crate) struct NonarchData {
    p: BigUint,
    d: i64,
    /// `v(a_j)` for `j = 1..=d`, `None` for a zero coefficient.
    vals: Vec<Option<i64>>,
}

impl NonarchData {
    pub(crate) fn new(f: &NormalFormPoly<Rational>, p: &BigUint) -> Self {
        let vals = f.coeffs()[1..]
            .iter()
            .map(|a| (!a.is_zero()).then(|| valuation(a, p)))
            .collect();
        Self::from_vals(p.clone(), vals)
    }

    /// From the valuations of `a_1..a_d`. `p` only labels the logs, so
    /// any discrete valuation can use the escape and disk rules.
    pub(crate) fn from_vals(p: BigUint, vals: Vec<Option<i64>>) -> Self {
        Self {
            p,
            d: vals.len() as i64,
            vals,
        }
    }

    fn vd(&self) -> i64 {
        self.vals[self.vals.len() - 1].expect("leading coefficient is nonzero")
    }

    /// Whether `|z|_p = p^-vz` lies in the region where `|f(z)| = |a_d||z|^d`
    /// and `|f(z)| > |z|`; there the escape rate is read off directly.
    pub(crate) fn escapes(&self, vz: i64) -> bool {
        let d = self.d;
        let lead = self.vd() + d * vz;
        if self.vd() + (d - 1) * vz >= 0 {
            return false;
        }
        self.vals[..self.vals.len() - 1]
            .iter()
            .enumerate()
            .all(|(i, v)| v.map_or(true, |v| lead < v + (i as i64 + 1) * vz))
    }

    /// Smallest `k` with `f(D) ⊆ D` for the disk `D = {v(z) >= k}`, if any.
    ///
    /// `|f(z)| <= max_j |a_j| |z|^j`, so `D` is invariant once
    /// `v(a_j) + (j-1) k >= 0` for every `j`; this needs `|a_1| <= 1`.
    pub(crate) fn invariant_disk(&self) -> Option<i64> {
        if self.vals[0].is_some_and(|v| v < 0) {
            return None;
        }
        let k = self.vals[1..]
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| Integer::div_ceil(&-v, &(i as i64 + 1))))
            .max()
            .unwrap_or(0);
        Some(k)
    }

    /// `d^-n (-vz - v(a_d)/(d-1))`, the escape rate in units of `log p`.
    pub(crate) fn escape_units(&self, vz: i64, n: usize) -> Rational {
        let d = self.d;
        let num = -vz * (d - 1) - self.vd();
        let den = BigInt::from(d - 1) * num_traits::pow(BigInt::from(d), n);
        Rational::new(num.into(), den)
    }

    fn escape_value(&self, vz: i64, n: usize) -> LogCombination {
        LogCombination::log_prime(self.p.clone(), self.escape_units(vz, n))
    }

    /// `log R_v`: outside this radius the escape rule applies.
    fn log_radius(&self) -> Rational {
        let d = self.d;
        let vd = self.vd();
        let mut best = Rational::new(vd.into(), (d - 1).into());
        for (i, v) in self.vals[..self.vals.len() - 1].iter().enumerate() {
            if let Some(v) = v {
                let j = i as i64 + 1;
                let r = Rational::new((vd - v).into(), (d - j).into());
                if r > best {
                    best = r;
                }
            }
        }
        best
    }

    /// Upper bound for `G(w)` when `log |w|_p <= l` (in units of `log p`).
    fn sup_bound(&self, l: f64) -> f64 {
        let lr = self.log_radius().to_f64().unwrap_or(f64::INFINITY);
        let log_m = self
            .vals
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| -(v as f64) + (i as f64 + 1.0) * lr))
            .fold(f64::NEG_INFINITY, f64::max);
        let u = l.max(log_m) - self.vd() as f64 / (self.d - 1) as f64;
        u.max(0.0) * ln_biguint(&self.p)
    }
}

/// Escape rate at the prime `p`.
///
/// Escape values are exact multiples of `log p`. Orbits are followed
/// exactly while they stay small, then with capped p-adic precision.
pub fn green_nonarch(
    f: &NormalFormPoly<Rational>,
    z: &Rational,
    p: &BigUint,
    opts: &GreenOptions,
) -> GreenValue {
    let data = NonarchData::new(f, p);
    if z.is_zero() {
        return GreenValue::exact_zero();
    }
    let disk = data.invariant_disk();
    let mut seen = BTreeSet::new();
    let mut w = z.clone();
    let mut best = f64::INFINITY;
    let mut n = 0;
    loop {
        if w.is_zero() {
            return GreenValue::exact_zero();
        }
        let vw = valuation(&w, p);
        if disk.is_some_and(|k| vw >= k) {
            return GreenValue::exact_zero();
        }
        if data.escapes(vw) {
            return GreenValue::exact(data.escape_value(vw, n), n);
        }
        best = best.min(scaled(data.sup_bound(-(vw as f64)), data.d, n));
        if !seen.insert(w.clone()) {
            return GreenValue::exact_zero();
        }
        if n >= opts.nonarch_steps || bits(&w) > opts.exact_bits {
            break;
        }
        w = f.eval(&w);
        n += 1;
    }
    if n >= opts.nonarch_steps {
        return GreenValue::bounded(n, best);
    }
    padic_phase(f, &data, &w, n, best, opts)
}

fn padic_phase(
    f: &NormalFormPoly<Rational>,
    data: &NonarchData,
    start: &Rational,
    n0: usize,
    mut best: f64,
    opts: &GreenOptions,
) -> GreenValue {
    let disk = data.invariant_disk();
    let mut cap = opts.padic_start_cap;
    loop {
        let ctx = PadicCtx::new(&data.p, cap);
        let coeffs: Vec<Padic> = f.coeffs().iter().map(|a| ctx.from_rational(a)).collect();
        let mut w = ctx.from_rational(start);
        let mut n = n0;
        let mut lost = false;
        while n < opts.nonarch_steps {
            let mut acc = Padic::Small { abs: i64::MAX / 4 };
            for a in coeffs.iter().rev() {
                acc = ctx.add(&ctx.mul(&acc, &w), a);
            }
            w = acc;
            n += 1;
            match w.valuation() {
                Some(vw) => {
                    if disk.is_some_and(|k| vw >= k) {
                        return GreenValue::exact_zero();
                    }
                    if data.escapes(vw) {
                        return GreenValue::exact(data.escape_value(vw, n), n);
                    }
                    best = best.min(scaled(data.sup_bound(-(vw as f64)), data.d, n));
                }
                None if w.is_exact_zero() => return GreenValue::exact_zero(),
                None => {
                    let l = -(w.abs_prec() as f64);
                    best = best.min(scaled(data.sup_bound(l), data.d, n));
                    if disk.is_some_and(|k| w.abs_prec() >= k) {
                        return GreenValue::exact_zero();
                    }
                    lost = true;
                    break;
                }
            }
        }
        if !lost || cap >= opts.padic_max_cap {
            return GreenValue::bounded(n, best);
        }
        cap = cap.saturating_mul(2).min(opts.padic_max_cap);
    }
}

fn scaled(x: f64, d: i64, n: usize) -> f64 {
    x / libm::pow(d as f64, n as f64)
}

// ---------------------------------------------------------------------------
// The archimedean place.

/// Relative slack applied to floating logs.
const LOG_SLACK: f64 = 1e-13;
/// Extra steps taken after escape to shrink the tail.
const REFINE_STEPS: usize = 24;
const REFINE_TARGET: f64 = 1e-12;

/// Escape geometry of `f` at the archimedean place.
#[derive(Clone, Debug)]
pub(crate) struct ArchData {
    d: usize,
    /// `log |a_j|` for nonzero `a_j`, `j < d`.
    lower: Vec<(usize, f64)>,
    log_ad: f64,
    /// `log R`: for `|z| >= R`, `eta(|z|) <= 1/2` and `|f(z)| >= |z|`.
    pub(crate) log_r: f64,
    kappa_r: f64,
    log_m: f64,
}

impl ArchData {
    pub(crate) fn new(f: &NormalFormPoly<Rational>) -> Self {
        let d = f.degree();
        let coeffs = f.coeffs();
        let log_ad = ln_abs_rational(&coeffs[d]);
        let lower: Vec<(usize, f64)> = (1..d)
            .filter(|&j| !coeffs[j].is_zero())
            .map(|j| (j, ln_abs_rational(&coeffs[j])))
            .collect();
        let mut log_r = -log_ad / (d - 1) as f64;
        for &(j, la) in &lower {
            log_r = log_r.max((la - log_ad) / (d - j) as f64);
        }
        log_r = log_r.max(0.0) + core::f64::consts::LN_2;
        let mut me = Self {
            d,
            lower,
            log_ad,
            log_r,
            kappa_r: 0.0,
            log_m: 0.0,
        };
        loop {
            let eta = me.eta(me.log_r);
            let kappa = kappa_of(eta);
            if eta <= 0.5 && log_ad + (d - 1) as f64 * me.log_r - kappa >= 1e-9 {
                me.kappa_r = kappa;
                break;
            }
            me.log_r += core::f64::consts::LN_2;
        }
        // log sum_j |a_j| R^j, an upper bound for log |f| on the disk of radius R
        let terms = me
            .lower
            .iter()
            .map(|&(j, la)| la + j as f64 * me.log_r)
            .chain(core::iter::once(log_ad + d as f64 * me.log_r));
        me.log_m = log_sum_exp(terms) * (1.0 + LOG_SLACK) + LOG_SLACK;
        me
    }

    /// Upper bound for `sum_{j<d} |a_j/a_d| r^(j-d)` at `r = e^lr`.
    fn eta(&self, lr: f64) -> f64 {
        let s: f64 = self
            .lower
            .iter()
            .map(|&(j, la)| libm::exp(la - self.log_ad - (self.d - j) as f64 * lr))
            .sum();
        s * (1.0 + 1e-12) + 1e-300
    }

    /// `log |a_d| / (d-1)`.
    fn shift(&self) -> f64 {
        self.log_ad / (self.d - 1) as f64
    }

    /// `sum_k d^-(k+1) kappa_k` for an orbit starting at `|z| >= e^l0 >= R`.
    fn tail(&self, l0: f64) -> f64 {
        let d = self.d as f64;
        let mut lam = l0;
        let mut weight = 1.0 / d;
        let mut total = 0.0;
        for _ in 0..64 {
            let kappa = kappa_of(self.eta(lam));
            if kappa < 1e-18 || weight < 1e-30 {
                return (total + kappa * weight * d / (d - 1.0)) * (1.0 + 1e-12);
            }
            total += weight * kappa;
            weight /= d;
            lam = d * lam + self.log_ad - kappa - LOG_SLACK * (lam.abs() + 1.0);
        }
        let kappa = kappa_of(self.eta(lam));
        (total + kappa * weight * d / (d - 1.0)) * (1.0 + 1e-12)
    }

    /// Upper bound for `G(w)` when `log |w| <= l`.
    fn sup_bound(&self, l: f64) -> f64 {
        let u = l.max(self.log_m) + self.shift() + self.kappa_r / (self.d - 1) as f64;
        u.max(0.0) * (1.0 + LOG_SLACK) + LOG_SLACK
    }

    /// Value and error once `e^lo <= |f^n(z)| <= e^hi` with `lo >= log R`.
    fn escaped(&self, lo: f64, hi: f64, n: usize) -> GreenValue {
        let lo = lo - LOG_SLACK * (lo.abs() + 1.0);
        let hi = hi + LOG_SLACK * (hi.abs() + 1.0);
        let mid = 0.5 * (lo + hi) + self.shift();
        let half = 0.5 * (hi - lo);
        let scale = libm::pow(self.d as f64, n as f64);
        let err = (half + self.tail(lo) + LOG_SLACK * (mid.abs() + 1.0)) / scale;
        GreenValue {
            value: mid / scale,
            error: err + 1e-15 * (mid.abs() / scale),
            status: GreenStatus::EscapedAtStep(n),
            exact: None,
        }
    }
}

fn kappa_of(eta: f64) -> f64 {
    if eta >= 1.0 {
        f64::INFINITY
    } else {
        -libm::log1p(-eta) * (1.0 + 1e-12)
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + libm::log(v.iter().map(|x| libm::exp(x - m)).sum::<f64>())
}

/// Archimedean escape rate with a rigorous error radius.
///
/// The orbit is followed exactly while small enough (which also catches
/// preperiodic points), then in outward-rounded interval arithmetic.
pub fn green_arch(
    f: &NormalFormPoly<Rational>,
    z: &Rational,
    opts: &GreenOptions,
) -> Result<GreenValue> {
    let data = ArchData::new(f);
    green_arch_with(f, &data, z, opts)
}

pub(crate) fn green_arch_with(
    f: &NormalFormPoly<Rational>,
    data: &ArchData,
    z: &Rational,
    opts: &GreenOptions,
) -> Result<GreenValue> {
    let mut seen = BTreeSet::new();
    let mut w = z.clone();
    let mut best = f64::INFINITY;
    let mut n = 0;
    loop {
        if w.is_zero() || !seen.insert(w.clone()) {
            return Ok(GreenValue::exact_zero());
        }
        let lw = ln_abs_rational(&w);
        if lw - LOG_SLACK * (lw.abs() + 1.0) >= data.log_r {
            // keep iterating while cheap: the error shrinks like d^-n
            let mut out = data.escaped(lw, lw, n);
            for _ in 0..REFINE_STEPS {
                if out.error <= REFINE_TARGET * out.value.max(1.0) || bits(&w) > opts.exact_bits {
                    break;
                }
                w = f.eval(&w);
                n += 1;
                let lw = ln_abs_rational(&w);
                let next = data.escaped(lw, lw, n);
                if next.error < out.error {
                    out = next;
                }
            }
            return Ok(out);
        }
        best = best.min(data.sup_bound(lw + LOG_SLACK * (lw.abs() + 1.0)) / dpow(data.d, n));
        if n >= opts.arch_steps || bits(&w) > opts.exact_bits {
            break;
        }
        w = f.eval(&w);
        n += 1;
    }
    if n >= opts.arch_steps {
        return Ok(GreenValue::bounded(n, best));
    }
    let coeffs: Vec<Interval> = f.coeffs().iter().map(Interval::from_rational).collect();
    let mut x = Interval::from_rational(&w);
    if !x.is_finite() {
        return Err(Error::Numeric {
            step: n,
            what: "iterate does not fit a double".into(),
        });
    }
    let log_r_exp = libm::exp(data.log_r);
    while n < opts.arch_steps {
        let mut acc = Interval::point(0.0);
        for a in coeffs.iter().rev() {
            acc = acc * x + *a;
        }
        x = acc;
        n += 1;
        if !x.is_finite() {
            return Err(Error::Numeric {
                step: n,
                what: "interval iterate overflowed".into(),
            });
        }
        let (mig, mag) = (x.mig(), x.mag());
        if mig > 0.0 && libm::log(mig) - LOG_SLACK * (libm::log(mig).abs() + 1.0) >= data.log_r {
            let mut out = data.escaped(libm::log(mig), libm::log(mag), n);
            for k in 1..=REFINE_STEPS {
                if out.error <= REFINE_TARGET * out.value.max(1.0) {
                    break;
                }
                let mut acc = Interval::point(0.0);
                for a in coeffs.iter().rev() {
                    acc = acc * x + *a;
                }
                x = acc;
                if !x.is_finite() || x.mig() <= 0.0 {
                    break;
                }
                let next = data.escaped(libm::log(x.mig()), libm::log(x.mag()), n + k);
                if next.error < out.error {
                    out = next;
                }
            }
            return Ok(out);
        }
        let lm = if mag > 0.0 { libm::log(mag) } else { f64::NEG_INFINITY };
        best = best.min(data.sup_bound(lm + LOG_SLACK * (lm.abs() + 1.0)) / dpow(data.d, n));
        if mag >= log_r_exp * 4.0 {
            // straddles the escape radius: the enclosure is no longer useful
            break;
        }
    }
    Ok(GreenValue::bounded(n, best))
}

fn dpow(d: usize, n: usize) -> f64 {
    libm::pow(d as f64, n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::polydyn::CritVector;

    fn quad(c: i64) -> NormalFormPoly<Rational> {
        CritVector::new(alloc::vec![rat(c, 1)]).unwrap().poly()
    }

    fn big(p: u64) -> BigUint {
        BigUint::from(p)
    }

    #[test]
    fn nonarch_examples() {
        let f = quad(3);
        let o = GreenOptions::default();
        let g = green_nonarch(&f, &rat(1, 3), &big(3), &o);
        assert_eq!(g.exact, Some(LogCombination::log_int(3)));
        assert_eq!(g.status, GreenStatus::EscapedAtStep(0));
        let g = green_nonarch(&f, &rat(3, 1), &big(3), &o);
        assert_eq!(g.status, GreenStatus::ExactZero);
        let g = green_nonarch(&f, &rat(3, 1), &big(2), &o);
        assert_eq!(g.exact, Some(LogCombination::log_int(2)));
    }

    #[test]
    fn nonarch_escape_after_iteration() {
        // f = z^2/2 - 2z at p = 2: |f(1)|_2 = 2 and the orbit grows from there
        let f = quad(2);
        let o = GreenOptions::default();
        let g = green_nonarch(&f, &rat(1, 1), &big(2), &o);
        assert!(g.exact.is_some());
        let direct = {
            let mut w = rat(1, 1);
            for _ in 0..12 {
                w = f.eval(&w);
            }
            (-(valuation(&w, &big(2)) as f64) * core::f64::consts::LN_2) / 4096.0
        };
        assert!((g.value - direct).abs() < 1e-3, "{} vs {}", g.value, direct);
    }

    #[test]
    fn arch_examples() {
        let o = GreenOptions::default();
        let g = green_arch(&quad(3), &rat(0, 1), &o).unwrap();
        assert_eq!(g.status, GreenStatus::ExactZero);
        let g = green_arch(&quad(2), &rat(2, 1), &o).unwrap();
        assert_eq!(g.status, GreenStatus::ExactZero);
        let g = green_arch(&quad(3), &rat(100, 1), &o).unwrap();
        assert!(g.is_escaped());
        // G(z) = log|z| - log 2 + O(1/|z|) for z^2/2 - 3z
        assert!((g.value - libm::log(50.0)).abs() < 0.1);
        let mut w = rat(100, 1);
        let f = quad(3);
        for _ in 0..8 {
            w = f.eval(&w);
        }
        let oracle = (ln_abs_rational(&w) - core::f64::consts::LN_2) / 256.0;
        assert!((g.value - oracle).abs() <= g.error + 1e-9, "{g:?} vs {oracle}");
        assert!(g.error < 1e-3);
    }

    #[test]
    fn arch_bounded_orbit_is_flagged() {
        let f = quad(1);
        let g = green_arch(&f, &rat(1, 3), &GreenOptions::default()).unwrap();
        if let GreenStatus::BoundedUpTo(_) = g.status {
            assert_eq!(g.value, 0.0);
            assert!(g.error >= 0.0);
        }
    }
}
