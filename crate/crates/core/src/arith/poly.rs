//! Dense univariate polynomials over `Q`, lowest degree first.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::factor::factor;
use super::rational::{format_rational, parse_rational};
use super::Rational;
use crate::error::{budget, Error, Result};

/// Cap on the number of candidate factors tried by Kronecker's method.
const KRONECKER_CANDIDATES: u64 = 2_000_000;

/// Primes used to certify coprimality before falling back to Euclid.
const COPRIME_PRIMES: [u64; 3] = [2_305_843_009_213_693_951, 1_000_000_007, 998_244_353];

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The variable itself.
    pub fn var() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn monomial(c: Rational, e: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); e + 1];
        coeffs[e] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::from_coeffs(cs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut coeffs = vec![Rational::zero()];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / Rational::from_integer(BigInt::from(i + 1)));
        }
        Self::from_coeffs(coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg0();
        let inv_lead = d.lead().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * &inv_lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * dc;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Exact quotient when `d` divides `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Multiplicity of zero as a root.
    fn low_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    fn shift_down(&self, k: usize) -> Self {
        Self::from_coeffs(self.coeffs[k..].to_vec())
    }

    fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(coeffs)
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Self::one();
        }
        // powers of the variable are common in denominators; split them off
        let (ka, kb) = (a.low_order(), b.low_order());
        if ka > 0 || kb > 0 {
            let k = ka.min(kb);
            let g = Self::gcd(&a.shift_down(ka), &b.shift_down(kb));
            return g.shift_up(k);
        }
        if certify_coprime(a, b) {
            return Self::one();
        }
        let (mut x, mut y) = (a.monic(), b.monic());
        while !y.is_zero() {
            let r = x.div_rem(&y).1.monic();
            x = y;
            y = r;
        }
        x
    }

    /// Integer primitive polynomial proportional to `self` with positive
    /// leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return ints;
        }
        let sign = if ints.last().is_some_and(|c| c.is_negative()) { -g } else { g };
        ints.into_iter().map(|c| c / &sign).collect()
    }

    pub fn is_squarefree(&self) -> bool {
        Self::gcd(self, &self.derivative()).is_constant()
    }

    /// Rational roots, each listed once.
    pub fn rational_roots(&self) -> Result<Vec<Rational>> {
        let mut out = Vec::new();
        if self.is_zero() {
            return Err(crate::error::domain("zero polynomial has every root"));
        }
        let mut p = self.clone();
        if p.coeff(0).is_zero() {
            out.push(Rational::zero());
            while p.coeff(0).is_zero() && !p.is_zero() {
                p = Self::from_coeffs(p.coeffs[1..].to_vec());
            }
        }
        if p.is_constant() {
            return Ok(out);
        }
        let ints = p.primitive_integer();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let num_divs = divisors(&a0)?;
        let den_divs = divisors(&an)?;
        for n in &num_divs {
            for d in &den_divs {
                for s in [1i32, -1] {
                    let r = Rational::new(n * BigInt::from(s), d.clone());
                    if r.denom() == d && p.eval(&r).is_zero() && !out.contains(&r) {
                        out.push(r);
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Irreducibility over `Q`: rational roots settle degrees up to three,
    /// Kronecker's interpolation search handles higher degrees.
    pub fn is_irreducible(&self) -> Result<bool> {
        let Some(n) = self.degree() else {
            return Ok(false);
        };
        match n {
            0 => Ok(false),
            1 => Ok(true),
            _ => {
                if !self.is_squarefree() {
                    return Ok(false);
                }
                if !self.rational_roots()?.is_empty() {
                    return Ok(false);
                }
                if n <= 3 {
                    return Ok(true);
                }
                for k in 2..=n / 2 {
                    if kronecker_factor(self, k)?.is_some() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let coef = format_rational(&mag);
            match (i, mag.is_one()) {
                (0, _) => s.push_str(&coef),
                (_, true) => {}
                (_, false) => {
                    s.push_str(&coef);
                    s.push('*');
                }
            }
            match i {
                0 => {}
                1 => s.push_str(var),
                _ => s.push_str(&format!("{var}^{i}")),
            }
        }
        s
    }

    /// Parses sums of terms such as `"3/2*t^2 - t + 1"` in any single-letter
    /// variable.
    pub fn parse(src: &str) -> Result<Self> {
        let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms: Vec<(bool, &str)> = Vec::new();
        let bytes = compact.as_bytes();
        let mut start = 0;
        let mut neg = false;
        if bytes[0] == b'-' || bytes[0] == b'+' {
            neg = bytes[0] == b'-';
            start = 1;
        }
        for i in start..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && i > start && bytes[i - 1] != b'^' {
                terms.push((neg, &compact[start..i]));
                neg = bytes[i] == b'-';
                start = i + 1;
            }
        }
        terms.push((neg, &compact[start..]));
        let mut out = Self::zero();
        for (neg, term) in terms {
            let (coef, e) = parse_term(term)?;
            let coef = if neg { -coef } else { coef };
            out = out + Self::monomial(coef, e);
        }
        Ok(out)
    }
}

fn parse_term(term: &str) -> Result<(Rational, usize)> {
    let bad = || Error::Parse(format!("bad polynomial term {term:?}"));
    let var_pos = term.find(|c: char| c.is_ascii_alphabetic());
    match var_pos {
        None => Ok((parse_rational(term)?, 0)),
        Some(pos) => {
            let coef_part = term[..pos].trim_end_matches('*');
            let coef = if coef_part.is_empty() {
                Rational::one()
            } else {
                parse_rational(coef_part)?
            };
            let rest = &term[pos + 1..];
            let e = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')
                    .ok_or_else(bad)?
                    .parse::<usize>()
                    .map_err(|_| bad())?
            };
            Ok((coef, e))
        }
    }
}

impl FromStr for Poly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut out = vec![BigInt::one()];
    if n.is_zero() {
        return Ok(out);
    }
    for (p, e) in factor(n.magnitude())? {
        let p = BigInt::from(p);
        let mut next = Vec::new();
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

fn to_mod(c: &Rational, p: u64) -> Option<u64> {
    let m = BigInt::from(p);
    let d = c.denom().mod_floor(&m);
    if d.is_zero() {
        return None;
    }
    let n = c.numer().mod_floor(&m).to_u64()?;
    let d = d.to_u64()?;
    Some(mulmod(n, powmod(d, p - 2, p), p))
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

fn reduce_mod(a: &Poly, p: u64) -> Option<Vec<u64>> {
    let v: Option<Vec<u64>> = a.coeffs.iter().map(|c| to_mod(c, p)).collect();
    let v = v?;
    // The leading coefficient must survive reduction.
    (*v.last()? != 0).then_some(v)
}

fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = powmod(*b.last().unwrap(), p - 2, p);
        while a.len() >= b.len() {
            let c = mulmod(*a.last().unwrap(), inv, p);
            let shift = a.len() - b.len();
            for (j, bc) in b.iter().enumerate() {
                let t = mulmod(c, *bc, p);
                a[shift + j] = (a[shift + j] + p - t) % p;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        core::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// True only if `a` and `b` are certainly coprime over `Q`: a common factor
/// over `Q` survives reduction modulo any prime not dividing the leading
/// coefficients or denominators.
fn certify_coprime(a: &Poly, b: &Poly) -> bool {
    COPRIME_PRIMES.iter().any(|&p| match (reduce_mod(a, p), reduce_mod(b, p)) {
        (Some(x), Some(y)) => gcd_degree_mod(x, y, p) == 0,
        _ => false,
    })
}

fn lagrange(xs: &[BigInt], ys: &[BigInt]) -> Poly {
    let mut out = Poly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = Poly::constant(Rational::from_integer(yi.clone()));
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                let lin = Poly::from_coeffs(vec![Rational::from_integer(-xj), Rational::one()]);
                basis = &basis * &lin;
                basis = basis.scale(&Rational::new(BigInt::one(), xi - xj));
            }
        }
        out = out + basis;
    }
    out
}

/// Searches for an integer factor of exact degree `k`.
fn kronecker_factor(f: &Poly, k: usize) -> Result<Option<Poly>> {
    let ints = f.primitive_integer();
    let fz = Poly::from_coeffs(ints.iter().cloned().map(Rational::from_integer).collect());
    let mut pts: Vec<(BigInt, Vec<BigInt>)> = Vec::new();
    let mut x: i64 = 0;
    while pts.len() < k + 1 + 4 {
        for cand in [x, -x] {
            if pts.iter().any(|(px, _)| *px == BigInt::from(cand)) {
                continue;
            }
            let xv = BigInt::from(cand);
            let v = fz.eval(&Rational::from_integer(xv.clone())).to_integer();
            if v.is_zero() {
                return Ok(Some(Poly::from_coeffs(vec![
                    Rational::from_integer(-xv),
                    Rational::one(),
                ])));
            }
            pts.push((xv, divisors(&v)?));
        }
        x += 1;
    }
    pts.sort_by_key(|(_, d)| d.len());
    pts.truncate(k + 1);
    let mut count: u64 = 1;
    for (i, (_, d)) in pts.iter().enumerate() {
        // The first value is taken positive; a factor is defined up to sign.
        let choices = if i == 0 { d.len() } else { 2 * d.len() } as u64;
        count = count.saturating_mul(choices);
    }
    if count > KRONECKER_CANDIDATES {
        return Err(budget("Kronecker factor search too large"));
    }
    let xs: Vec<BigInt> = pts.iter().map(|(x, _)| x.clone()).collect();
    let mut idx = vec![0usize; k + 1];
    loop {
        let ys: Vec<BigInt> = pts
            .iter()
            .enumerate()
            .map(|(i, (_, d))| {
                if i == 0 {
                    d[idx[0]].clone()
                } else {
                    let j = idx[i];
                    if j < d.len() {
                        d[j].clone()
                    } else {
                        -d[j - d.len()].clone()
                    }
                }
            })
            .collect();
        let g = lagrange(&xs, &ys);
        if g.degree() == Some(k)
            && g.coeffs.iter().all(|c| c.is_integer())
            && fz.div_exact(&g).is_some()
        {
            return Ok(Some(g));
        }
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos > k {
                return Ok(None);
            }
            let limit = if pos == 0 { pts[0].1.len() } else { 2 * pts[pos].1.len() };
            idx[pos] += 1;
            if idx[pos] < limit {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("t"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::arith::rat;

    #[test]
    fn division_and_gcd() {
        let a = Poly::from_ints(&[-1, 0, 1]); // t^2 - 1
        let b = Poly::from_ints(&[1, 1]); // t + 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, Poly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(Poly::gcd(&a, &Poly::from_ints(&[2, 2])), b);
        assert!(Poly::gcd(&a, &Poly::from_ints(&[1, 0, 1])).is_one());
    }

    #[test]
    fn integral_of_critical_factorization() {
        // (t-1)(t-2) integrates to t^3/3 - 3t^2/2 + 2t.
        let d = Poly::from_ints(&[2, -3, 1]);
        let f = d.integral();
        assert_eq!(f.coeffs(), &[rat(0, 1), rat(2, 1), rat(-3, 2), rat(1, 3)]);
        assert_eq!(f.derivative(), d);
    }

    #[test]
    fn irreducibility() {
        assert!(Poly::from_ints(&[1, 0, 1]).is_irreducible().unwrap());
        assert!(!Poly::from_ints(&[-1, 0, 1]).is_irreducible().unwrap());
        assert!(Poly::from_ints(&[-2, 0, 0, 1]).is_irreducible().unwrap());
        // t^4 + 4 = (t^2 + 2t + 2)(t^2 - 2t + 2), no rational roots.
        assert!(!Poly::from_ints(&[4, 0, 0, 0, 1]).is_irreducible().unwrap());
        // t^4 + 1 is irreducible.
        assert!(Poly::from_ints(&[1, 0, 0, 0, 1]).is_irreducible().unwrap());
        assert!(!Poly::from_ints(&[0, 0, 1]).is_irreducible().unwrap());
    }

    #[test]
    fn parse_and_print() {
        let p: Poly = "3/2*t^2 - t + 1".parse().unwrap();
        assert_eq!(p.coeffs(), &[rat(1, 1), rat(-1, 1), rat(3, 2)]);
        assert_eq!(p.to_string(), "3/2*t^2 - t + 1");
        assert_eq!("-t^3".parse::<Poly>().unwrap(), Poly::from_ints(&[0, 0, 0, -1]));
        assert_eq!("a^2 + 2a".parse::<Poly>().unwrap().to_string_in("a"), "a^2 + 2*a");
        assert!("t^".parse::<Poly>().is_err());
    }

    #[test]
    fn rational_roots_found() {
        let p = Poly::from_ints(&[1, 2, -3]); // 1 + 2z - 3z^2, roots 1 and -1/3
        assert_eq!(p.rational_roots().unwrap(), vec![rat(-1, 3), rat(1, 1)]);
    }
}
