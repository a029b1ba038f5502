use alloc::format;
use alloc::string::String;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for a small rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Total bit size of numerator and denominator.
pub fn bits(x: &Rational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// Exponent of the prime `p` in the nonzero integer `n`.
pub fn valuation_int(n: &BigInt, p: &BigUint) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from_biguint(Sign::Plus, p.clone());
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// The p-adic valuation `v_p(x)` of a nonzero rational.
pub fn valuation(x: &Rational, p: &BigUint) -> i64 {
    valuation_int(x.numer(), p) as i64 - valuation_int(x.denom(), p) as i64
}

/// Natural log of `|n|` for a nonzero integer, accurate to a few ulps even
/// when `n` does not fit in an `f64`.
pub fn ln_abs_bigint(n: &BigInt) -> f64 {
    let m = n.magnitude();
    ln_biguint_inner(m)
}

pub(crate) fn ln_biguint_inner(m: &BigUint) -> f64 {
    let b = m.bits();
    if b <= 1000 {
        return libm::log(m.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = b - 64;
    let top = (m >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    libm::log(top) + shift as f64 * core::f64::consts::LN_2
}

/// Natural log of `|x|` for a nonzero rational.
pub fn ln_abs_rational(x: &Rational) -> f64 {
    ln_abs_bigint(x.numer()) - ln_abs_bigint(x.denom())
}

/// Parses `"p/q"`, `"p"` or `"-p/q"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rational_abs_max<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational {
    xs.into_iter()
        .map(|x| x.abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}
