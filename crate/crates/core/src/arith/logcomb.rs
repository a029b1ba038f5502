//! Exact rational combinations of logarithms of primes.
//!
//! Every local quantity over `Q` met in this crate is `sum_p q_p log p`
//! with rational `q_p`: p-adic absolute values are `-v_p(x) log p`, and the
//! archimedean `log|x|` of a rational is `sum_p e_p log p` by unique
//! factorization. Keeping the coefficients lets inequalities between such
//! quantities be decided exactly.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::factor::factor_rational;
use super::rational::{format_rational, ln_biguint_inner};
use super::Rational;
use crate::error::Result;

/// Natural log of a positive integer.
pub fn ln_biguint(n: &BigUint) -> f64 {
    ln_biguint_inner(n)
}

/// Bit budget for deciding signs by exponentiation.
const EXACT_SIGN_BITS: u64 = 1 << 22;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LogCombination {
    terms: BTreeMap<BigUint, Rational>,
}

impl LogCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `coeff * log p`.
    pub fn log_prime(p: BigUint, coeff: Rational) -> Self {
        let mut out = Self::zero();
        out.add_term(p, coeff);
        out
    }

    /// `log |x|` for nonzero rational `x`, expanded over the primes.
    pub fn log_abs_of(x: &Rational) -> Result<Self> {
        let mut out = Self::zero();
        for (p, e) in factor_rational(x)? {
            out.add_term(p, Rational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// `log n` for the integer `n >= 1`.
    pub fn log_int(n: u64) -> Self {
        Self::log_abs_of(&Rational::from_integer(BigInt::from(n)))
            .expect("u64 always factors")
    }

    pub fn add_term(&mut self, p: BigUint, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &BigUint) -> Rational {
        self.terms.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), c * k)).collect(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, c)| c.to_f64().unwrap_or(f64::NAN) * ln_biguint(p))
            .sum()
    }

    /// Exact sign, or `None` when the exponentiation would exceed the
    /// internal bit budget.
    pub fn exact_sign(&self) -> Option<Ordering> {
        if self.is_zero() {
            return Some(Ordering::Equal);
        }
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut cost: u64 = 0;
        let mut exps = alloc::vec::Vec::new();
        for (p, c) in &self.terms {
            let n = (c * Rational::from_integer(den.clone())).to_integer();
            let mag = n.abs().to_u64()?;
            cost = cost.checked_add(mag.checked_mul(p.bits())?)?;
            exps.push((p, n.is_positive(), mag));
        }
        if cost > EXACT_SIGN_BITS {
            return None;
        }
        let mut pos = BigUint::one();
        let mut neg = BigUint::one();
        for (p, positive, mag) in exps {
            let pw = p.pow(mag as u32);
            if positive {
                pos *= pw;
            } else {
                neg *= pw;
            }
        }
        Some(pos.cmp(&neg))
    }

    /// Exact comparison when affordable, otherwise a floating comparison
    /// with guard tolerance `tol` (ties within `tol` report `Equal`).
    pub fn cmp_with_tolerance(&self, other: &Self, tol: f64) -> Ordering {
        let diff = self.clone() - other.clone();
        match diff.exact_sign() {
            Some(o) => o,
            None => {
                let v = diff.to_f64();
                if v > tol {
                    Ordering::Greater
                } else if v < -tol {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    /// Larger of `self` and zero (exactly when affordable).
    pub fn positive_part(&self) -> Self {
        match self.cmp_with_tolerance(&Self::zero(), 0.0) {
            Ordering::Greater => self.clone(),
            _ => Self::zero(),
        }
    }

    pub fn to_display_string(&self) -> String {
        alloc::format!("{self}")
    }
}

impl fmt::Display for LogCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in &self.terms {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if mag.is_one() {
                write!(f, "log {p}")?;
            } else {
                write!(f, "{}*log {p}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl Add for LogCombination {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for LogCombination {
    fn add_assign(&mut self, rhs: Self) {
        for (p, c) in rhs.terms {
            self.add_term(p, c);
        }
    }
}

impl Sub for LogCombination {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl SubAssign for LogCombination {
    fn sub_assign(&mut self, rhs: Self) {
        for (p, c) in rhs.terms {
            self.add_term(p, -c);
        }
    }
}

impl Neg for LogCombination {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(&-Rational::one())
    }
}

impl core::iter::Sum for LogCombination {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn expansion_and_value() {
        let l = LogCombination::log_abs_of(&rat(-9, 2)).unwrap();
        assert_eq!(l.coefficient(&BigUint::from(3u32)), rat(2, 1));
        assert_eq!(l.coefficient(&BigUint::from(2u32)), rat(-1, 1));
        assert!((l.to_f64() - libm::log(4.5)).abs() < 1e-15);
        assert_eq!(alloc::format!("{l}"), "-log 2 + 2*log 3");
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = LogCombination::log_int(12);
        let b = LogCombination::log_int(4) + LogCombination::log_int(3);
        assert!((a - b).is_zero());
    }

    #[test]
    fn exact_signs() {
        // log 3 - (3/2) log 2 = log(3 / 2^1.5) > 0 since 9 > 8.
        let x = LogCombination::log_int(3)
            - LogCombination::log_prime(BigUint::from(2u32), rat(3, 2));
        assert_eq!(x.exact_sign(), Some(Ordering::Greater));
        assert_eq!((-x).exact_sign(), Some(Ordering::Less));
        assert_eq!(LogCombination::zero().exact_sign(), Some(Ordering::Equal));
    }
}
