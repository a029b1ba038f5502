//! Integer factorization for the supports of rationals.
//!
//! Trial division by primes below 2^16, then Miller-Rabin and Brent's
//! variant of Pollard rho on whatever is left. The inputs handled here are
//! coefficients and sampled parameters, so the rho stage rarely runs.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rational;
use crate::error::{budget, Result};

const TRIAL_LIMIT: u32 = 1 << 16;
const RHO_ITERATIONS: u64 = 1 << 22;

/// All primes `<= n`, by sieve.
pub fn small_primes_up_to(n: u32) -> Vec<u32> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = alloc::vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

const PRIMES_BELOW_256: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Miller-Rabin with the first twenty prime bases. Deterministic below
/// 3.3e24 and overwhelmingly reliable above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &p in &PRIMES_BELOW_256[..20] {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &PRIMES_BELOW_256[..20] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn brent_rho(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let mut x;
    let mut ys;
    let m: u64 = 64;
    let mut spent: u64 = 0;
    loop {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        loop {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            let g = q.gcd(n);
            k += m;
            spent += m;
            if !g.is_one() {
                if &g == n {
                    // Backtrack one step at a time.
                    loop {
                        ys = f(&ys);
                        let diff = if x > ys { &x - &ys } else { &ys - &x };
                        let g = diff.gcd(n);
                        if !g.is_one() {
                            return if &g == n { None } else { Some(g) };
                        }
                    }
                }
                return Some(g);
            }
            if k >= r || spent > RHO_ITERATIONS {
                break;
            }
        }
        if spent > RHO_ITERATIONS {
            return None;
        }
        r *= 2;
    }
}

fn split_large(n: BigUint, out: &mut BTreeMap<BigUint, u32>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_probable_prime(&n) {
        *out.entry(n).or_insert(0) += 1;
        return Ok(());
    }
    for c in 1..8u64 {
        if let Some(g) = brent_rho(&n, c) {
            let rest = &n / &g;
            split_large(g, out)?;
            split_large(rest, out)?;
            return Ok(());
        }
    }
    Err(budget("integer factorization did not finish"))
}

/// Prime factorization of a positive integer, primes ascending.
pub fn factor(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    let mut out: BTreeMap<BigUint, u32> = BTreeMap::new();
    if n.is_zero() {
        return Err(crate::error::domain("cannot factor zero"));
    }
    let mut m = n.clone();
    for &p in &PRIMES_BELOW_256 {
        let bp = BigUint::from(p);
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.insert(bp, e);
        }
    }
    if !m.is_one() {
        let mut p = 257u32;
        while p < TRIAL_LIMIT && BigUint::from(p) * BigUint::from(p) <= m {
            let bp = BigUint::from(p);
            let mut e = 0;
            while (&m % &bp).is_zero() {
                m /= &bp;
                e += 1;
            }
            if e > 0 {
                out.insert(bp, e);
            }
            p += 2;
        }
        if !m.is_one() {
            if m < BigUint::from(TRIAL_LIMIT) * BigUint::from(TRIAL_LIMIT) {
                *out.entry(m).or_insert(0) += 1;
            } else {
                split_large(m, &mut out)?;
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Factorization of a nonzero rational as `(prime, exponent)` pairs with
/// signed exponents.
pub fn factor_rational(x: &Rational) -> Result<Vec<(BigUint, i64)>> {
    let mut out: BTreeMap<BigUint, i64> = BTreeMap::new();
    for (p, e) in factor(x.numer().magnitude())? {
        *out.entry(p).or_insert(0) += e as i64;
    }
    for (p, e) in factor(x.denom().magnitude())? {
        *out.entry(p).or_insert(0) -= e as i64;
    }
    Ok(out.into_iter().filter(|(_, e)| *e != 0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn product(fs: &[(BigUint, u32)]) -> BigUint {
        fs.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    #[test]
    fn small_numbers() {
        let f = factor(&BigUint::from(12u32)).unwrap();
        assert_eq!(f, alloc::vec![(BigUint::from(2u32), 2), (BigUint::from(3u32), 1)]);
        assert!(factor(&BigUint::one()).unwrap().is_empty());
        assert!(factor(&BigUint::zero()).is_err());
    }

    #[test]
    fn needs_rho() {
        // 1000003 * 1000033 * 2^61-1
        let n = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64)
            * BigUint::from((1u64 << 61) - 1);
        let f = factor(&n).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(product(&f), n);
        assert!(f.iter().all(|(p, _)| is_probable_prime(p)));
    }

    #[test]
    fn rational_signed_exponents() {
        let f = factor_rational(&rat(-9, 2)).unwrap();
        assert_eq!(f, alloc::vec![(BigUint::from(2u32), -1), (BigUint::from(3u32), 2)]);
    }

    #[test]
    fn sieve() {
        assert_eq!(small_primes_up_to(20), alloc::vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
