//! Real intervals with outward rounding.
//!
//! Every operation widens its floating result by one ulp on each side,
//! which encloses the exact result of round-to-nearest arithmetic.

use core::ops::{Add, Mul, Neg, Sub};

use num_traits::ToPrimitive;

use super::Rational;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan());
        Self { lo, hi }
    }

    /// Enclosure of a rational; two ulps of slack cover the conversion.
    pub fn from_rational(x: &Rational) -> Self {
        let v = x.to_f64().unwrap_or(f64::NAN);
        Self {
            lo: v.next_down().next_down(),
            hi: v.next_up().next_up(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(&self) -> f64 {
        if self.lo <= 0.0 && self.hi >= 0.0 {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn outward(lo: f64, hi: f64) -> Self {
        Self {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }
}

impl Add for Interval {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::outward(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::outward(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Neg for Interval {
    type Output = Self;
    fn neg(self) -> Self {
        Self { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::outward(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn encloses_thirds() {
        let third = Interval::from_rational(&rat(1, 3));
        let one = third + third + third;
        assert!(one.lo <= 1.0 && one.hi >= 1.0);
        let sq = third * third;
        assert!(sq.lo <= 1.0 / 9.0 && sq.hi >= 1.0 / 9.0);
    }

    #[test]
    fn magnitudes() {
        let i = Interval::new(-3.0, 2.0);
        assert_eq!(i.mag(), 3.0);
        assert_eq!(i.mig(), 0.0);
        assert_eq!(Interval::new(-3.0, -2.0).mig(), 2.0);
    }
}
