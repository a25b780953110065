//! Cardinalities of string-sets `ζ_x(n)`: the length-`n` strings over `Z_d`
//! whose entries multiply to `x (mod d)`.
//!
//! Three independent routes are provided (closed product formula, divisor
//! recursion, brute-force enumeration) together with the root-of-unity
//! identities the entanglement formulas are built on. The closed form passes
//! through exact rationals and asserts that the result is an integer.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::modarith::{binomial, divisors, factorize, gcd, root_of_unity, totient, GcdProfile};

/// Default bound on `d^n` for [`cardinality_bruteforce`].
pub const DEFAULT_BRUTE_CAP: u64 = 10_000_000;

/// Absolute tolerance for the complex identity checks.
pub const IDENTITY_TOL: f64 = 1e-9;

/// A string-set query with the residue stored as its representative in `0..d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StringSetQuery {
    d: u64,
    n: u32,
    x: u64,
}

impl StringSetQuery {
    pub fn new(d: u64, n: u32, x: u64) -> Result<Self> {
        if d < 2 {
            return invalid(format!("dimension must be >= 2, got {d}"));
        }
        if n < 1 {
            return invalid("string length must be >= 1");
        }
        Ok(Self { d, n, x: x % d })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn x(&self) -> u64 {
        self.x
    }
}

/// A length-`n` string over `Z_d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NString {
    d: u64,
    entries: Vec<u64>,
}

impl NString {
    pub fn new(d: u64, entries: Vec<u64>) -> Result<Self> {
        if d < 2 {
            return invalid(format!("dimension must be >= 2, got {d}"));
        }
        if entries.is_empty() {
            return invalid("an n-string needs at least one entry");
        }
        if let Some(bad) = entries.iter().find(|&&q| q >= d) {
            return invalid(format!("entry {bad} is not in Z_{d}"));
        }
        Ok(Self { d, entries })
    }

    /// The string whose base-`d` digits (most significant first) spell `index`.
    pub fn from_index(d: u64, n: u32, mut index: u64) -> Self {
        let mut entries = vec![0; n as usize];
        for slot in entries.iter_mut().rev() {
            *slot = index % d;
            index /= d;
        }
        Self { d, entries }
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// `P(s) mod d`.
    pub fn product(&self) -> u64 {
        self.entries
            .iter()
            .fold(1 % self.d, |acc, &q| acc * q % self.d)
    }
}

fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn big(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `|ζ_x(n)|` from the product-of-binomials closed form.
pub fn cardinality_closed(q: &StringSetQuery) -> BigUint {
    let n = q.n as u64;
    let f = factorize(q.d).expect("query dimension validated");
    let profile = GcdProfile::new(&f, q.x);
    let mut acc = big(BigUint::from(f.totient()).pow(q.n - 1));
    for (p, l, k) in profile.triples() {
        let l = l as u64;
        let k = k as u64;
        if k < l {
            acc *= big(binomial(n + k - 1, k));
        } else {
            // Σ_j C(n+ℓ-2-j, ℓ-1) (1 - 1/p)^{-j}
            let inv_ratio = rational(p, p - 1);
            let mut power = BigRational::one();
            let mut sum = BigRational::zero();
            for j in 0..n {
                sum += big(binomial(n + l - 2 - j, l - 1)) * &power;
                power *= &inv_ratio;
            }
            acc *= sum;
        }
    }
    assert!(
        acc.is_integer(),
        "closed-form cardinality for {q:?} is not an integer: {acc}"
    );
    acc.to_integer()
        .to_biguint()
        .expect("cardinalities are non-negative")
}

/// Counts of `P(s) mod d` over all of `S(n)`; index `x` holds `|ζ_x(n)|`.
pub fn product_histogram(d: u64, n: u32, cap: u64) -> Result<Vec<u64>> {
    if d < 2 || n < 1 {
        return invalid(format!("bad histogram request d={d}, n={n}"));
    }
    let total = d
        .checked_pow(n)
        .filter(|&t| t <= cap)
        .ok_or(Error::CapExceeded {
            what: "string-set enumeration",
            needed: (d as u128).saturating_pow(n),
            cap: cap as u128,
        })?;
    let hist = (0..total)
        .into_par_iter()
        .fold(
            || vec![0u64; d as usize],
            |mut h, index| {
                let mut rest = index;
                let mut prod = 1 % d;
                for _ in 0..n {
                    prod = prod * (rest % d) % d;
                    rest /= d;
                }
                h[prod as usize] += 1;
                h
            },
        )
        .reduce(
            || vec![0u64; d as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(hist)
}

/// `|ζ_x(n)|` by direct enumeration of `S(n)`; refuses when `d^n > cap`.
pub fn cardinality_bruteforce(q: &StringSetQuery, cap: u64) -> Result<BigUint> {
    let hist = product_histogram(q.d, q.n, cap)?;
    Ok(BigUint::from(hist[q.x as usize]))
}

/// `|ζ_x(n)|` from the divisor recursion
/// `|ζ_x(n)| = Σ_{r | gcd(x,d)} |ζ_r(n-1)| · r · φ(d/r)`.
pub fn cardinality_recursive(q: &StringSetQuery) -> BigUint {
    let mut memo = HashMap::new();
    recursive_inner(q.d, q.n, q.x, &divisors(q.d), &mut memo)
}

fn recursive_inner(
    d: u64,
    n: u32,
    x: u64,
    divs: &[u64],
    memo: &mut HashMap<(u64, u32), BigUint>,
) -> BigUint {
    if n == 1 {
        return BigUint::one();
    }
    if let Some(v) = memo.get(&(x, n)) {
        return v.clone();
    }
    let mut acc = BigUint::zero();
    // x = 0 stands for x = d, so every divisor of d is a common divisor.
    for &r in divs.iter().filter(|&&r| x.is_multiple_of(r)) {
        let weight = r * totient(d / r).expect("d / r >= 1");
        acc += recursive_inner(d, n - 1, r % d, divs, memo) * weight;
    }
    memo.insert((x, n), acc.clone());
    acc
}

/// Checks `|ζ_x(n)| = |ζ_{gcd(x,d)}(n)|` with the closed form.
pub fn gcd_reduction_check(d: u64, n: u32, x: u64) -> Result<bool> {
    let q = StringSetQuery::new(d, n, x)?;
    let g = StringSetQuery::new(d, n, gcd(q.x, d))?;
    Ok(cardinality_closed(&q) == cardinality_closed(&g))
}

/// `|ζ_1(n)| ∏_i |ζ_{p_i^{k_i}}(n)| / |ζ_1(n)|` for the gcd exponents of `x`.
pub fn cardinality_factorized(q: &StringSetQuery) -> BigRational {
    let f = factorize(q.d).expect("query dimension validated");
    let profile = GcdProfile::new(&f, q.x);
    let unit = big(cardinality_closed(&StringSetQuery { x: 1, ..*q }));
    let mut acc = unit.clone();
    for (p, _, k) in profile.triples() {
        let part = StringSetQuery {
            x: p.pow(k) % q.d,
            ..*q
        };
        acc *= big(cardinality_closed(&part)) / &unit;
    }
    acc
}

/// Every `|ζ_x(n)|` for `x` in `0..d`, closed form.
pub fn cardinalities(d: u64, n: u32) -> Result<Vec<BigUint>> {
    (0..d)
        .map(|x| StringSetQuery::new(d, n, x).map(|q| cardinality_closed(&q)))
        .collect()
}

fn eval_classes(d: u64, classes: &[BigUint]) -> Complex64 {
    classes
        .iter()
        .enumerate()
        .map(|(c, w)| root_of_unity(d, c as u64) * w.to_f64().unwrap_or(f64::INFINITY))
        .sum()
}

/// `Σ_r ω^{α r} |ζ_r(n)|` evaluated exactly.
///
/// Splitting off one entry of the string collapses the character sum to
/// `d·|ζ_0(n-1)| + d·Σ_{y≠0, αy≡0} |ζ_y(n-1)|`, so the value is a
/// non-negative integer in `[d·|ζ_0(n-1)|, d^n]`.
pub fn weighted_root_sum(d: u64, n: u32, alpha: u64) -> Result<BigUint> {
    if n < 2 {
        return invalid(format!("weighted root sum needs n >= 2, got {n}"));
    }
    let prev = cardinalities(d, n - 1)?;
    let alpha = alpha % d;
    let kept: BigUint = (0..d)
        .filter(|y| (alpha * y).is_multiple_of(d))
        .map(|y| &prev[y as usize])
        .sum();
    Ok(kept * d)
}

/// `Σ_r ω^{α r} |ζ_r(n)|` by direct complex summation.
pub fn weighted_root_sum_direct(d: u64, n: u32, alpha: u64) -> Result<Complex64> {
    let card = cardinalities(d, n)?;
    let mut classes = vec![BigUint::zero(); d as usize];
    for (r, c) in card.iter().enumerate() {
        classes[((alpha % d) * r as u64 % d) as usize] += c;
    }
    Ok(eval_classes(d, &classes))
}

/// Both sides of the split identity
/// `Σ_r ω^{αr}|ζ_r(n)| = Σ_{x,y} ω^{αxy}|ζ_x(k)||ζ_y(n-k)|`.
pub fn split_identity_sides(d: u64, n: u32, k: u32, alpha: u64) -> Result<(Complex64, Complex64)> {
    if k == 0 || k >= n {
        return invalid(format!("split point k={k} must satisfy 0 < k < n={n}"));
    }
    let alpha = alpha % d;
    let lhs = weighted_root_sum_direct(d, n, alpha)?;
    let left = cardinalities(d, k)?;
    let right = cardinalities(d, n - k)?;
    let mut classes = vec![BigUint::zero(); d as usize];
    for (x, cx) in left.iter().enumerate() {
        for (y, cy) in right.iter().enumerate() {
            let c = alpha * (x as u64) % d * (y as u64) % d;
            classes[c as usize] += cx * cy;
        }
    }
    Ok((lhs, eval_classes(d, &classes)))
}

pub fn split_identity_check(d: u64, n: u32, k: u32, alpha: u64) -> Result<bool> {
    let (lhs, rhs) = split_identity_sides(d, n, k, alpha)?;
    Ok((lhs - rhs).norm() < IDENTITY_TOL)
}

/// The product
/// `∏_i [1 - (1-δ_{k_i,ℓ_i}) (1-1/p_i)^n Σ_{j<ℓ_i-k_i} p_i^{-j} C(n+j-1, j)]`
/// for the gcd exponents `k_i` of `m`.
///
/// It equals `(1/d^{n+1}) Σ_{y,t} ω^{m t y} |ζ_y(n)|`; see
/// [`overlap_sum_exact`] and [`overlap_character_sum`].
pub fn overlap_product_identity(d: u64, n: u32, m: u64) -> Result<BigRational> {
    if n < 1 {
        return invalid("overlap product needs n >= 1");
    }
    let f = factorize(d)?;
    let profile = GcdProfile::new(&f, m % d);
    let n = n as u64;
    let mut acc = BigRational::one();
    for (p, l, k) in profile.triples() {
        if k == l {
            continue;
        }
        let mut tail = BigRational::zero();
        let mut p_pow = BigRational::one();
        let inv_p = rational(1, p);
        for j in 0..(l - k) as u64 {
            tail += big(binomial(n + j - 1, j)) * &p_pow;
            p_pow *= &inv_p;
        }
        let shrink = rational(p - 1, p).pow(n as i32);
        acc *= BigRational::one() - shrink * tail;
    }
    Ok(acc)
}

/// `(1/d^n) Σ_{y : m y ≡ 0} |ζ_y(n)|`, the root-of-unity sum after the `t`
/// summation has been carried out exactly.
pub fn overlap_sum_exact(d: u64, n: u32, m: u64) -> Result<BigRational> {
    let card = cardinalities(d, n)?;
    let m = m % d;
    let kept: BigUint = (0..d)
        .filter(|y| (m * y).is_multiple_of(d))
        .map(|y| &card[y as usize])
        .sum();
    Ok(big(kept) / big(BigUint::from(d).pow(n)))
}

/// `(1/d^{n+1}) Σ_{y,t} ω^{m t y} |ζ_y(n)|` in complex arithmetic.
pub fn overlap_character_sum(d: u64, n: u32, m: u64) -> Result<Complex64> {
    let card = cardinalities(d, n)?;
    let m = m % d;
    let mut classes = vec![BigUint::zero(); d as usize];
    for (y, c) in card.iter().enumerate() {
        for t in 0..d {
            classes[(m * t % d * y as u64 % d) as usize] += c;
        }
    }
    let scale = (d as f64).powi(n as i32 + 1);
    Ok(eval_classes(d, &classes) / scale)
}

/// Both sides of the tail-sum identity
/// `p^{-ℓ} Σ_{j<n} C(n+ℓ-2-j, ℓ-1)(1-1/p)^{-(j+1)} = (1-1/p)^{-n} - Σ_{j<ℓ} C(n+j-1, j) p^{-j}`.
pub fn tail_identity_sides(p: u64, l: u32, n: u32) -> Result<(BigRational, BigRational)> {
    if p < 2 || l < 1 || n < 1 {
        return invalid(format!(
            "tail identity needs p > 1, ℓ >= 1, n >= 1 (p={p}, ℓ={l}, n={n})"
        ));
    }
    let (l, n64) = (l as u64, n as u64);
    let inv_ratio = rational(p, p - 1);
    let mut lhs = BigRational::zero();
    let mut power = inv_ratio.clone();
    for j in 0..n64 {
        lhs += big(binomial(n64 + l - 2 - j, l - 1)) * &power;
        power *= &inv_ratio;
    }
    lhs /= big(BigUint::from(p).pow(l as u32));

    let mut rhs = inv_ratio.pow(n as i32);
    let mut p_pow = BigRational::one();
    for j in 0..l {
        rhs -= big(binomial(n64 + j - 1, j)) * &p_pow;
        p_pow /= big(BigUint::from(p));
    }
    Ok((lhs, rhs))
}
