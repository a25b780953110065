//! Integer number theory shared by the closed-form computations.
//!
//! Inputs are small (dimensions up to ~10^4), so factorization is plain
//! trial division. Anything that can grow with the number of qudits is
//! returned as a [`BigUint`].

use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::One;

use crate::error::{invalid, Result};

/// Prime factorization `d = ∏ p_i^{ℓ_i}` with strictly increasing primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFactorization {
    base: u64,
    factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    pub fn base(&self) -> u64 {
        self.base
    }

    /// `(p_i, ℓ_i)` pairs in increasing order of `p_i`.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    pub fn totient(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, l)| (p - 1) * p.pow(l - 1))
            .product()
    }
}

/// Exponents of `gcd(x, d)` over the primes of `d`.
///
/// Indices with `k_i < ℓ_i` form `J1`, those with `k_i = ℓ_i` form `J2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdProfile {
    base: PrimeFactorization,
    value: u64,
    exponents: Vec<u32>,
}

impl GcdProfile {
    pub fn new(base: &PrimeFactorization, x: u64) -> Self {
        let g = gcd(x, base.base);
        let exponents = base
            .factors
            .iter()
            .map(|&(p, l)| {
                let mut k = 0;
                let mut rest = g;
                while k < l && rest.is_multiple_of(p) {
                    rest /= p;
                    k += 1;
                }
                k
            })
            .collect();
        Self {
            base: base.clone(),
            value: x,
            exponents,
        }
    }

    pub fn base(&self) -> &PrimeFactorization {
        &self.base
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// `k_i`, aligned with [`PrimeFactorization::factors`].
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Iterates `(p_i, ℓ_i, k_i)`.
    pub fn triples(&self) -> impl Iterator<Item = (u64, u32, u32)> + '_ {
        self.base
            .factors
            .iter()
            .zip(&self.exponents)
            .map(|(&(p, l), &k)| (p, l, k))
    }

    pub fn j1(&self) -> Vec<usize> {
        self.triples()
            .enumerate()
            .filter(|(_, (_, l, k))| k < l)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn j2(&self) -> Vec<usize> {
        self.triples()
            .enumerate()
            .filter(|(_, (_, l, k))| k == l)
            .map(|(i, _)| i)
            .collect()
    }

    /// `∏ p_i^{k_i}`, which equals `gcd(x, d)`.
    pub fn gcd(&self) -> u64 {
        self.triples().map(|(p, _, k)| p.pow(k)).product()
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn factorize(d: u64) -> Result<PrimeFactorization> {
    if d < 2 {
        return invalid(format!("cannot factorize {d}: need d >= 2"));
    }
    let mut factors = Vec::new();
    let mut rest = d;
    let mut p = 2;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut l = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                l += 1;
            }
            factors.push((p, l));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(PrimeFactorization { base: d, factors })
}

pub fn is_prime(d: u64) -> bool {
    factorize(d).map(|f| f.is_prime()).unwrap_or(false)
}

pub fn totient(d: u64) -> Result<u64> {
    match d {
        0 => invalid("totient of 0 is undefined"),
        1 => Ok(1),
        _ => Ok(factorize(d)?.totient()),
    }
}

/// Least prime factor.
pub fn lpf(d: u64) -> Result<u64> {
    Ok(factorize(d)?.factors[0].0)
}

/// Exact binomial coefficient, zero when `b > a`.
pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::ZERO;
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Divisors of `d` in increasing order.
pub fn divisors(d: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= d {
        if d.is_multiple_of(i) {
            small.push(i);
            if i * i != d {
                large.push(d / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `ω^k` with `ω = e^{2πi/d}`; `k` is reduced mod `d` first so every call
/// lands on one of the `d` exact angles.
pub fn root_of_unity(d: u64, k: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (k % d) as f64 / d as f64)
}

/// Smallest `q` in `0..d` with `b + q·a ≡ 0 (mod d)`, if any.
pub fn solve_linear_congruence(a: u64, b: u64, d: u64) -> Option<u64> {
    if d < 2 {
        return None;
    }
    let (a, b) = (a % d, b % d);
    let g = gcd(a, d);
    if b % g != 0 {
        return None;
    }
    // q·(a/g) ≡ -(b/g)  (mod d/g)
    let modulus = d / g;
    if modulus == 1 {
        return Some(0);
    }
    let inv = mod_inverse(a / g, modulus)?;
    let target = (modulus - (b / g) % modulus) % modulus;
    Some(((target as u128 * inv as u128) % modulus as u128) as u64)
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = extended_gcd(a as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = extended_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(7).unwrap().factors(), &[(7, 1)]);
        assert_eq!(factorize(10).unwrap().factors(), &[(2, 1), (5, 1)]);
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert!(factorize(1).is_err());
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorization_invariants() {
        for d in 2..2000u64 {
            let f = factorize(d).unwrap();
            let prod: u64 = f.factors().iter().map(|&(p, l)| p.pow(l)).product();
            assert_eq!(prod, d);
            for w in f.factors().windows(2) {
                assert!(w[0].0 < w[1].0);
            }
            for p in f.primes() {
                assert!((2..p).take_while(|i| i * i <= p).all(|i| p % i != 0));
            }
        }
    }

    #[test]
    fn totient_examples() {
        assert_eq!(totient(1).unwrap(), 1);
        assert_eq!(totient(4).unwrap(), 2);
        assert_eq!(totient(10).unwrap(), 4);
        assert!(totient(0).is_err());
        for d in 1..300u64 {
            let count = (1..=d).filter(|&r| gcd(r, d) == 1).count() as u64;
            assert_eq!(totient(d).unwrap(), count, "d = {d}");
        }
    }

    #[test]
    fn totient_divisor_sum() {
        for d in 2..200u64 {
            let s: u64 = divisors(d).iter().map(|m| totient(d / m).unwrap()).sum();
            assert_eq!(s, d);
        }
    }

    #[test]
    fn gcd_values_hit_each_divisor_totient_times() {
        for d in 2..=60u64 {
            let divs = divisors(d);
            for &m in &divs {
                let hits = (1..=d).filter(|&r| gcd(r, d) == m).count() as u64;
                assert_eq!(hits, totient(d / m).unwrap(), "d = {d}, m = {m}");
            }
            assert!((1..=d).all(|r| divs.contains(&gcd(r, d))));
        }
    }

    #[test]
    fn lpf_examples() {
        assert_eq!(lpf(10).unwrap(), 2);
        assert_eq!(lpf(9).unwrap(), 3);
        assert_eq!(lpf(7).unwrap(), 7);
        assert!(lpf(1).is_err());
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(9, 0), BigUint::one());
        assert_eq!(binomial(3, 5), BigUint::ZERO);
        assert_eq!(binomial(0, 0), BigUint::one());
        // Pascal's rule
        for a in 1..40u64 {
            for b in 1..=a {
                assert_eq!(binomial(a, b), binomial(a - 1, b - 1) + binomial(a - 1, b));
            }
        }
    }

    #[test]
    fn congruence_examples() {
        assert_eq!(solve_linear_congruence(2, 3, 5), Some(1));
        assert_eq!(solve_linear_congruence(2, 3, 6), None);
        assert_eq!(solve_linear_congruence(1, 0, 4), Some(0));
        assert_eq!(solve_linear_congruence(0, 0, 4), Some(0));
        assert_eq!(solve_linear_congruence(0, 1, 4), None);
    }

    #[test]
    fn congruence_matches_scan() {
        for d in 2..=30u64 {
            for a in 0..d {
                for b in 0..d {
                    let scan = (0..d).find(|q| (b + q * a) % d == 0);
                    assert_eq!(solve_linear_congruence(a, b, d), scan, "a={a} b={b} d={d}");
                }
            }
        }
    }

    #[test]
    fn gcd_profile_partitions_indices() {
        let f = factorize(360).unwrap();
        for x in 0..360u64 {
            let prof = GcdProfile::new(&f, x);
            assert_eq!(prof.gcd(), gcd(x, 360));
            let mut all = prof.j1();
            all.extend(prof.j2());
            all.sort();
            assert_eq!(all, (0..f.factors().len()).collect::<Vec<_>>());
            assert!(prof.j1().iter().all(|i| !prof.j2().contains(i)));
        }
        let zero = GcdProfile::new(&f, 0);
        assert!(zero.j1().is_empty());
    }
}
