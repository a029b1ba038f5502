//! Arithmetic building blocks shared by every dynamical module.

mod factor;
mod interval;
mod logcomb;
mod padic;
mod poly;
mod ratfunc;
mod rational;

pub use factor::{factor, factor_rational, is_probable_prime, small_primes_up_to};
pub use interval::Interval;
pub use logcomb::{ln_biguint, LogCombination};
pub use padic::{Padic, PadicCtx};
pub use poly::Poly;
pub use ratfunc::RationalFunction;
pub use rational::{
    bits, format_rational, rational_abs_max, ln_abs_bigint, ln_abs_rational, parse_rational, rat, valuation,
    valuation_int, Rational,
};

use core::ops::{Add, Mul, Neg, Sub};

/// Minimal field interface so orbit machinery can run over `Q` and `Q(t)`.
pub trait Field:
    Clone
    + Ord
    + core::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(q: Rational) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    /// Rough size in bits, used for iteration budgets.
    fn size_hint(&self) -> u64;
}

impl Field for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn from_rational(q: Rational) -> Self {
        q
    }
    fn inv(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn size_hint(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
}
