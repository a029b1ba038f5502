#![allow(dead_code)]

use critheight_core::arith::{Poly, RationalFunction};
use critheight_core::Rational;
use num_bigint::BigInt;
use proptest::prelude::*;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Nonzero `p/q` with `|p| <= num`, `1 <= q <= den`.
pub fn nonzero_rat(num: i64, den: i64) -> impl Strategy<Value = Rational> {
    (1..=num, 1..=den, any::<bool>()).prop_map(|(p, q, neg)| rat(if neg { -p } else { p }, q))
}

pub fn any_rat(num: i64, den: i64) -> impl Strategy<Value = Rational> {
    (-num..=num, 1..=den).prop_map(|(p, q)| rat(p, q))
}

pub fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-6i64..=6, 1..=max_deg + 1).prop_map(|cs| Poly::from_ints(&cs))
}

pub fn nonzero_rf() -> impl Strategy<Value = RationalFunction> {
    (small_poly(3), small_poly(3))
        .prop_filter_map("zero numerator or denominator", |(n, d)| {
            if n.is_zero() || d.is_zero() {
                None
            } else {
                RationalFunction::new(n, d).ok()
            }
        })
}

/// `r t^e`.
pub fn monomial(r: Rational, e: i32) -> RationalFunction {
    RationalFunction::monomial(r, e)
}
