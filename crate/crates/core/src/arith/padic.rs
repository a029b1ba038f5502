//! Capped-relative-precision p-adic numbers.
//!
//! Orbits that stay p-adically bounded for many steps cannot be iterated as
//! exact rationals (digits grow like `d^n`). Tracking `x = p^val * unit`
//! with `unit` known modulo `p^rel` keeps each step polynomial-size, and the
//! valuation stays exact for as long as any relative precision survives.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::valuation_int;
use super::Rational;

/// Sentinel absolute precision for an exact zero.
const EXACT: i64 = i64::MAX / 4;

#[derive(Clone, Debug)]
pub struct PadicCtx {
    p: BigInt,
    p_nat: BigUint,
    cap: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Padic {
    /// `p^val * unit`, `unit` a p-adic unit known modulo `p^rel`, `rel >= 1`.
    Known { val: i64, unit: BigInt, rel: u32 },
    /// Congruent to zero modulo `p^abs`; nothing more is known.
    Small { abs: i64 },
}

impl PadicCtx {
    pub fn new(p: &BigUint, cap: u32) -> Self {
        Self {
            p: BigInt::from_biguint(Sign::Plus, p.clone()),
            p_nat: p.clone(),
            cap: cap.max(1),
        }
    }

    pub fn prime(&self) -> &BigUint {
        &self.p_nat
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn pow(&self, k: u32) -> BigInt {
        num_traits::pow(self.p.clone(), k as usize)
    }

    pub fn from_rational(&self, x: &Rational) -> Padic {
        if x.is_zero() {
            return Padic::Small { abs: EXACT };
        }
        let a = valuation_int(x.numer(), &self.p_nat);
        let b = valuation_int(x.denom(), &self.p_nat);
        let modulus = self.pow(self.cap);
        let num = x.numer() / self.pow(a as u32);
        let den = x.denom() / self.pow(b as u32);
        let inv = mod_inverse(&den, &modulus);
        Padic::Known {
            val: a as i64 - b as i64,
            unit: (num * inv).mod_floor(&modulus),
            rel: self.cap,
        }
    }

    pub fn mul(&self, a: &Padic, b: &Padic) -> Padic {
        match (a, b) {
            (
                Padic::Known { val: va, unit: ua, rel: ra },
                Padic::Known { val: vb, unit: ub, rel: rb },
            ) => {
                let rel = (*ra).min(*rb);
                Padic::Known {
                    val: va + vb,
                    unit: (ua * ub).mod_floor(&self.pow(rel)),
                    rel,
                }
            }
            (Padic::Known { val, .. }, Padic::Small { abs })
            | (Padic::Small { abs }, Padic::Known { val, .. }) => Padic::Small {
                abs: sat_add(*abs, *val),
            },
            (Padic::Small { abs: x }, Padic::Small { abs: y }) => Padic::Small {
                abs: sat_add(*x, *y),
            },
        }
    }

    pub fn add(&self, a: &Padic, b: &Padic) -> Padic {
        let abs = a.abs_prec().min(b.abs_prec());
        let base = [a, b]
            .iter()
            .filter_map(|x| match x {
                Padic::Known { val, .. } => Some(*val),
                Padic::Small { .. } => None,
            })
            .min();
        let Some(base) = base else {
            return Padic::Small { abs };
        };
        if abs <= base {
            return Padic::Small { abs };
        }
        let mut s = BigInt::zero();
        for x in [a, b] {
            if let Padic::Known { val, unit, .. } = x {
                s += unit * self.pow((val - base) as u32);
            }
        }
        let width = (abs - base) as u32;
        s = s.mod_floor(&self.pow(width));
        if s.is_zero() {
            return Padic::Small { abs };
        }
        let k = valuation_int(&s, &self.p_nat) as u32;
        let unit = s / self.pow(k);
        let val = base + k as i64;
        let rel = (abs - val) as u32;
        Padic::Known { val, unit, rel }
    }

    pub fn neg(&self, a: &Padic) -> Padic {
        match a {
            Padic::Known { val, unit, rel } => Padic::Known {
                val: *val,
                unit: (-unit).mod_floor(&self.pow(*rel)),
                rel: *rel,
            },
            s => s.clone(),
        }
    }
}

impl Padic {
    pub fn abs_prec(&self) -> i64 {
        match self {
            Padic::Known { val, rel, .. } => val + *rel as i64,
            Padic::Small { abs } => *abs,
        }
    }

    /// Exact valuation when it is determined.
    pub fn valuation(&self) -> Option<i64> {
        match self {
            Padic::Known { val, .. } => Some(*val),
            Padic::Small { .. } => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Padic::Small { abs } if *abs >= EXACT)
    }
}

fn sat_add(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        a + b
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.abs().is_one());
    g.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn arithmetic_matches_rationals() {
        let ctx = PadicCtx::new(&BigUint::from(3u32), 20);
        let a = rat(5, 9);
        let b = rat(-7, 3);
        let pa = ctx.from_rational(&a);
        let pb = ctx.from_rational(&b);
        assert_eq!(ctx.mul(&pa, &pb), ctx.from_rational(&(&a * &b)).truncate(20));
        let sum = ctx.add(&pa, &pb);
        assert_eq!(sum.valuation(), Some(-2));
        // 5/9 - 7/3 = -16/9; absolute precision is limited by 5/9.
        assert_eq!(sum.abs_prec(), 18);
    }

    #[test]
    fn cancellation_loses_precision() {
        let ctx = PadicCtx::new(&BigUint::from(2u32), 8);
        let a = ctx.from_rational(&rat(1, 1));
        let b = ctx.neg(&a);
        let z = ctx.add(&a, &b);
        assert_eq!(z, Padic::Small { abs: 8 });
        assert_eq!(z.valuation(), None);
    }

    impl Padic {
        fn truncate(self, rel_cap: u32) -> Padic {
            match self {
                Padic::Known { val, unit, rel } => Padic::Known { val, unit, rel: rel.min(rel_cap) },
                s => s,
            }
        }
    }
}
