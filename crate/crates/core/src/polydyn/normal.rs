use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::arith::{Field, Rational};
use crate::error::{domain, Result};

/// Critical points `c_1..c_{d-1}` of a normal-form polynomial over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CritVector {
    d: usize,
    c: Vec<Rational>,
    lambda: Rational,
}

impl CritVector {
    /// The degree is `c.len() + 1`.
    pub fn new(c: Vec<Rational>) -> Result<Self> {
        if c.is_empty() {
            return Err(domain("need at least one critical point (d >= 2)"));
        }
        let d = c.len() + 1;
        let lambda = sign_pow(d - 1) * c.iter().fold(<Rational as One>::one(), |acc, x| acc * x);
        Ok(Self { d, c, lambda })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    /// The multiplier `(-1)^(d-1) c_1 ... c_{d-1}` of the fixed point 0.
    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn poly(&self) -> NormalFormPoly<Rational> {
        NormalFormPoly::from_critical_points(self.c.clone())
            .expect("a nonempty critical vector always gives a polynomial")
    }
}

fn sign_pow(k: usize) -> Rational {
    if k % 2 == 0 {
        <Rational as One>::one()
    } else {
        -<Rational as One>::one()
    }
}

/// `f(z) = integral_0^z prod (w - c_i) dw`, a monic-derivative polynomial
/// fixing 0, over any field of characteristic zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormPoly<F: Field> {
    /// `coeffs[j]` multiplies `z^j`; `coeffs[0]` is zero.
    coeffs: Vec<F>,
    crit: Vec<F>,
}

impl<F: Field> NormalFormPoly<F> {
    pub fn from_critical_points(crit: Vec<F>) -> Result<Self> {
        if crit.is_empty() {
            return Err(domain("need at least one critical point (d >= 2)"));
        }
        // prod (z - c_i), lowest degree first
        let mut deriv = vec![F::one()];
        for c in &crit {
            let mut next = vec![F::zero(); deriv.len() + 1];
            for (j, b) in deriv.iter().enumerate() {
                next[j + 1] = next[j + 1].clone() + b.clone();
                next[j] = next[j].clone() - c.clone() * b.clone();
            }
            deriv = next;
        }
        let mut coeffs = vec![F::zero()];
        for (j, b) in deriv.into_iter().enumerate() {
            let k = F::from_rational(Rational::new(One::one(), ((j + 1) as i64).into()));
            coeffs.push(b * k);
        }
        Ok(Self { coeffs, crit })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `a_0..a_d`, with `a_0 = 0` and `a_d = 1/d`.
    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn critical_points(&self) -> &[F] {
        &self.crit
    }

    pub fn eval(&self, z: &F) -> F {
        let mut acc = F::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc * z.clone() + a.clone();
        }
        acc
    }

    pub fn eval_derivative(&self, z: &F) -> F {
        let mut acc = F::zero();
        for (j, a) in self.coeffs.iter().enumerate().skip(1).rev() {
            let k = F::from_rational(Rational::from_integer((j as i64).into()));
            acc = acc * z.clone() + a.clone() * k;
        }
        acc
    }

    pub fn multiplier_at_zero(&self) -> F {
        self.coeffs[1].clone()
    }

    /// `f^n(z)`, or `None` once an iterate exceeds `size_budget` bits.
    pub fn iterate(&self, z: &F, n: usize, size_budget: u64) -> Option<F> {
        let mut w = z.clone();
        for _ in 0..n {
            w = self.eval(&w);
            if w.size_hint() > size_budget {
                return None;
            }
        }
        Some(w)
    }
}

impl NormalFormPoly<Rational> {
    pub fn from_crit(cv: &CritVector) -> Self {
        cv.poly()
    }
}

/// Convenience used by tests and examples.
pub fn coeffs_from_crit(cv: &CritVector) -> NormalFormPoly<Rational> {
    cv.poly()
}

pub fn multiplier_at_zero(cv: &CritVector) -> Rational {
    cv.lambda().clone()
}
