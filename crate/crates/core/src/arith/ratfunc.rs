//! Elements of the function field `Q(t)`.

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::One;

use super::{Poly, Rational};
use crate::error::{domain, Result};

/// `num / den` with coprime parts and monic denominator; zero is `0/1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(domain("rational function with zero denominator"));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self { num, den: Poly::one() };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lc = den.lead().recip();
        Self {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Poly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The generator `t`.
    pub fn t() -> Self {
        Self::from_poly(Poly::var())
    }

    /// `c * t^e` for any integer `e`.
    pub fn monomial(c: Rational, e: i32) -> Self {
        if e >= 0 {
            Self::from_poly(Poly::monomial(c, e as usize))
        } else {
            Self::normalized(Poly::constant(c), Poly::monomial(Rational::one(), (-e) as usize))
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    /// `max(deg num, deg den)`, the degree of the induced map on the line.
    pub fn degree(&self) -> usize {
        self.num.deg0().max(self.den.deg0())
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.den.is_one() {
            self.num.to_string_in(var)
        } else {
            format!("({})/({})", self.num.to_string_in(var), self.den.to_string_in(var))
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("t"))
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

impl Add for RationalFunction {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        // a reduced fraction plus a polynomial stays reduced
        if o.den.is_one() {
            return Self { num: &self.num + &(&o.num * &self.den), den: self.den }.renorm_zero();
        }
        if self.den.is_one() {
            return Self { num: &o.num + &(&self.num * &o.den), den: o.den }.renorm_zero();
        }
        if self.den == o.den {
            return Self::normalized(&self.num + &o.num, self.den);
        }
        Self::normalized(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for RationalFunction {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for RationalFunction {
    type Output = Self;
    fn neg(self) -> Self {
        Self { num: -self.num, den: self.den }
    }
}

impl Mul for RationalFunction {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.is_constant() {
            let c = self.num.coeff(0);
            return Self { num: o.num.scale(&c), den: o.den }.renorm_zero();
        }
        if o.is_constant() {
            let c = o.num.coeff(0);
            return Self { num: self.num.scale(&c), den: self.den }.renorm_zero();
        }
        // cross-cancel so the gcds run on the smaller factors
        let (a, d) = cancel(self.num, o.den);
        let (c, b) = cancel(o.num, self.den);
        let den = &b * &d;
        let lc = den.lead().recip();
        Self { num: (&a * &c).scale(&lc), den: den.scale(&lc) }
    }
}

fn cancel(x: Poly, y: Poly) -> (Poly, Poly) {
    if y.is_constant() || x.is_constant() {
        return (x, y);
    }
    let g = Poly::gcd(&x, &y);
    if g.is_one() {
        (x, y)
    } else {
        (x.div_rem(&g).0, y.div_rem(&g).0)
    }
}

impl RationalFunction {
    fn renorm_zero(self) -> Self {
        if self.num.is_zero() {
            Self::from_poly(Poly::zero())
        } else {
            self
        }
    }
}

impl RationalFunction {
    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(Self::normalized(self.den.clone(), self.num.clone()))
        }
    }
}

impl super::Field for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn from_rational(q: Rational) -> Self {
        Self::constant(q)
    }
    fn inv(&self) -> Option<Self> {
        RationalFunction::inv(self)
    }
    fn size_hint(&self) -> u64 {
        self.degree() as u64
    }
}
