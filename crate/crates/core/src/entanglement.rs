//! Closed-form entanglement of elementary states and the lower bounds it
//! induces for connected hypergraph states.
//!
//! Everything here is exact; conversion to floating point is left to callers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::hypergraph::MultiHypergraph;
use crate::modarith::{binomial, factorize, gcd, lpf, GcdProfile};

/// A single hyperedge of cardinality `n` with multiplicity `m`, on `Z_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementarySpec {
    d: u64,
    n: u32,
    m: u64,
    profile: GcdProfile,
}

impl ElementarySpec {
    pub fn new(d: u64, n: u32, m: u64) -> Result<Self> {
        if d < 2 {
            return invalid(format!("dimension must be at least 2, got {d}"));
        }
        if n < 2 {
            return invalid(format!(
                "an elementary state needs at least 2 qudits, got {n}"
            ));
        }
        if m.is_multiple_of(d) {
            return invalid(format!("multiplicity {m} is 0 mod {d}: no edge"));
        }
        let f = factorize(d)?;
        let profile = GcdProfile::new(&f, m % d);
        Ok(Self {
            d,
            n,
            m: m % d,
            profile,
        })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn profile(&self) -> &GcdProfile {
        &self.profile
    }
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// `α = ∏_i [1 − (1−δ_{k_i ℓ_i}) (1−1/p_i)^{n−1} Σ_{j<ℓ_i−k_i} p_i^{−j} C(n+j−2, j)]`.
pub fn alpha_elementary(spec: &ElementarySpec) -> BigRational {
    let n = spec.n as u64;
    let mut alpha = BigRational::one();
    for (p, l, k) in spec.profile.triples() {
        if k == l {
            continue;
        }
        let mut sum = BigRational::zero();
        for j in 0..(l - k) as u64 {
            let term = BigRational::from_integer(binomial(n + j - 2, j).into());
            sum += term / BigRational::from_integer(BigInt::from(p).pow(j as u32));
        }
        let decay = ratio(p - 1, p).pow((n - 1) as i32);
        alpha *= BigRational::one() - decay * sum;
    }
    alpha
}

/// `E = 1 − α`.
pub fn entanglement_elementary(spec: &ElementarySpec) -> BigRational {
    BigRational::one() - alpha_elementary(spec)
}

/// Convenience wrapper validating `(d, n, m)` on the way in.
pub fn entanglement_of(d: u64, n: u32, m: u64) -> Result<BigRational> {
    Ok(entanglement_elementary(&ElementarySpec::new(d, n, m)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extremes {
    /// Least entangled multiplicity, `d / lpf(d)`.
    pub min_m: u64,
    /// Most entangled multiplicity (any unit; 1 is reported).
    pub max_m: u64,
    pub e_min: BigRational,
    pub e_max: BigRational,
}

/// Extremal multiplicities for `G_n^m` over `m ∈ 1..d`. The sandwich
/// `E_min ≤ E(m) ≤ E_max` is checked for every `m` and reported as an error
/// if it ever fails.
pub fn extremal_multiplicities(d: u64, n: u32) -> Result<Extremes> {
    let min_m = d / lpf(d)?;
    let e_min = entanglement_of(d, n, min_m)?;
    let e_max = entanglement_of(d, n, 1)?;
    for m in 1..d {
        let e = entanglement_of(d, n, m)?;
        if e < e_min || e > e_max {
            return invalid(format!(
                "E(d={d}, n={n}, m={m}) = {e} escapes [{e_min}, {e_max}]"
            ));
        }
    }
    Ok(Extremes {
        min_m,
        max_m: 1,
        e_min,
        e_max,
    })
}

/// `E(G_{k_max}^{d/lpf(d)})`, the bound for any connected state whose
/// largest edge has `k_max` vertices.
pub fn lower_bound(d: u64, k_max: u32) -> Result<BigRational> {
    if k_max < 2 {
        return invalid(format!("lower bound needs k_max >= 2, got {k_max}"));
    }
    entanglement_of(d, k_max, d / lpf(d)?)
}

/// Inputs for the bound on states whose multiplicities share the factor `m*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundSpec {
    d: u64,
    k_max: u32,
    m_star: u64,
}

impl BoundSpec {
    pub fn new(d: u64, k_max: u32, m_star: u64) -> Result<Self> {
        if d < 2 {
            return invalid(format!("dimension must be at least 2, got {d}"));
        }
        if k_max < 2 {
            return invalid(format!("bound needs k_max >= 2, got {k_max}"));
        }
        if m_star == 0 || !d.is_multiple_of(m_star) {
            return invalid(format!("m* = {m_star} does not divide d = {d}"));
        }
        if m_star == d {
            return invalid("m* = d leaves every edge with multiplicity 0");
        }
        Ok(Self { d, k_max, m_star })
    }

    /// Uses the common divisor of `h`'s multiplicities and its largest edge.
    pub fn for_hypergraph(h: &MultiHypergraph) -> Result<Self> {
        Self::new(h.d(), h.k_max() as u32, max_common_divisor(h)?)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn m_star(&self) -> u64 {
        self.m_star
    }
}

/// `E(G_{k_max}^{d/lpf(d/m*)})`.
pub fn tighter_lower_bound(b: &BoundSpec) -> Result<BigRational> {
    let reduced = b.d / b.m_star;
    entanglement_of(b.d, b.k_max, b.d / lpf(reduced)?)
}

/// `gcd(d, m_e for every edge)`.
pub fn max_common_divisor(h: &MultiHypergraph) -> Result<u64> {
    if h.edge_count() == 0 {
        return invalid("no edges, so no common divisor");
    }
    Ok(h.edges().fold(h.d(), |g, (_, m)| gcd(g, m)))
}

/// Multiplicities `β·m*` (`β = 1..d/m* − 1`) sorted by ascending entanglement,
/// ties broken by multiplicity.
pub fn multiples_by_entanglement(d: u64, n: u32, m_star: u64) -> Result<Vec<(u64, BigRational)>> {
    BoundSpec::new(d, n.max(2), m_star)?;
    let mut rows: Vec<(u64, BigRational)> = (1..d / m_star)
        .map(|beta| {
            let m = beta * m_star;
            entanglement_of(d, n, m).map(|e| (m, e))
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::{divisors, is_prime};
    use crate::stringsets::{overlap_product_identity, overlap_sum_exact};

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn worked_examples() {
        assert_eq!(entanglement_of(10, 4, 5).unwrap(), r(1, 8));
        assert_eq!(entanglement_of(10, 4, 2).unwrap(), r(64, 125));
        assert_eq!(
            alpha_elementary(&ElementarySpec::new(10, 4, 5).unwrap()),
            r(7, 8)
        );
        assert_eq!(
            alpha_elementary(&ElementarySpec::new(10, 4, 2).unwrap()),
            r(61, 125)
        );
        assert_eq!(entanglement_of(2, 2, 1).unwrap(), r(1, 2));
        assert_eq!(entanglement_of(7, 3, 4).unwrap(), r(36, 49));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ElementarySpec::new(4, 1, 1).is_err());
        assert!(ElementarySpec::new(4, 3, 0).is_err());
        assert!(ElementarySpec::new(4, 3, 8).is_err());
        assert!(ElementarySpec::new(1, 3, 1).is_err());
        assert_eq!(ElementarySpec::new(4, 3, 6).unwrap().m(), 2);
    }

    #[test]
    fn prime_dimension_formula() {
        for d in (2..=13u64).filter(|&d| is_prime(d)) {
            for n in 2..=10u32 {
                let want = r(d as i64 - 1, d as i64).pow(n as i32 - 1);
                for m in 1..d {
                    assert_eq!(entanglement_of(d, n, m).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn alpha_matches_string_set_sums() {
        for d in 2..=12u64 {
            for n in 2..=7u32 {
                for m in 1..d {
                    let a = alpha_elementary(&ElementarySpec::new(d, n, m).unwrap());
                    assert_eq!(a, overlap_product_identity(d, n - 1, m).unwrap());
                    assert_eq!(
                        a,
                        overlap_sum_exact(d, n - 1, m).unwrap(),
                        "d={d} n={n} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn gcd_equivalence() {
        for d in 2..=12u64 {
            for n in 2..=8u32 {
                for m in 1..d {
                    for m2 in 1..d {
                        if gcd(m, d) == gcd(m2, d) {
                            assert_eq!(
                                entanglement_of(d, n, m).unwrap(),
                                entanglement_of(d, n, m2).unwrap()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn strictly_decreasing_in_n() {
        for d in 2..=12u64 {
            for n in 2..=9u32 {
                for m in 1..d {
                    assert!(
                        entanglement_of(d, n + 1, m).unwrap() < entanglement_of(d, n, m).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn values_lie_in_unit_interval() {
        for d in 2..=16u64 {
            for n in 2..=12u32 {
                for m in 1..d {
                    let e = entanglement_of(d, n, m).unwrap();
                    assert!(e > BigRational::zero() && e < BigRational::one());
                }
            }
        }
    }

    #[test]
    fn extremes() {
        let x = extremal_multiplicities(10, 4).unwrap();
        assert_eq!((x.min_m, x.max_m), (5, 1));
        assert_eq!(x.e_min, r(1, 8));
        assert_eq!(extremal_multiplicities(9, 3).unwrap().min_m, 3);
        let p = extremal_multiplicities(7, 5).unwrap();
        assert_eq!(p.e_min, p.e_max);
        for d in 2..=16 {
            for n in 2..=9 {
                extremal_multiplicities(d, n).unwrap();
            }
        }
    }

    #[test]
    fn minimality_among_multiples() {
        for d in 2..=12u64 {
            for m_star in divisors(d).into_iter().filter(|&m| m < d) {
                let want = d / lpf(d / m_star).unwrap();
                for n in 2..=9u32 {
                    let rows = multiples_by_entanglement(d, n, m_star).unwrap();
                    let least = &rows[0].1;
                    assert_eq!(
                        entanglement_of(d, n, want).unwrap(),
                        *least,
                        "d={d} m*={m_star} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn bounds() {
        assert_eq!(lower_bound(10, 4).unwrap(), r(1, 8));
        assert_eq!(lower_bound(2, 2).unwrap(), r(1, 2));
        assert_eq!(lower_bound(5, 3).unwrap(), r(16, 25));
        assert!(lower_bound(4, 1).is_err());

        assert_eq!(
            tighter_lower_bound(&BoundSpec::new(10, 4, 2).unwrap()).unwrap(),
            r(64, 125)
        );
        for d in 2..=12u64 {
            for k in 2..=8u32 {
                let base = lower_bound(d, k).unwrap();
                assert_eq!(
                    tighter_lower_bound(&BoundSpec::new(d, k, 1).unwrap()).unwrap(),
                    base
                );
                for m_star in divisors(d).into_iter().filter(|&m| m < d) {
                    let t = tighter_lower_bound(&BoundSpec::new(d, k, m_star).unwrap()).unwrap();
                    assert!(t >= base);
                }
            }
        }
        assert!(BoundSpec::new(10, 4, 3).is_err());
        assert!(BoundSpec::new(10, 4, 10).is_err());
    }

    #[test]
    fn common_divisor() {
        let h = MultiHypergraph::from_edges(
            10,
            6,
            [
                (vec![1, 2, 3, 4], 8),
                (vec![3, 4, 5], 2),
                (vec![4, 5, 6], 6),
                (vec![1, 6], 4),
            ],
        )
        .unwrap();
        assert_eq!(max_common_divisor(&h).unwrap(), 2);
        let b = BoundSpec::for_hypergraph(&h).unwrap();
        assert_eq!((b.k_max(), b.m_star()), (4, 2));
        assert_eq!(tighter_lower_bound(&b).unwrap(), r(64, 125));

        let ones = MultiHypergraph::from_edges(3, 3, [(vec![1, 2], 1), (vec![2, 3], 2)]).unwrap();
        assert_eq!(max_common_divisor(&ones).unwrap(), 1);
        let six = MultiHypergraph::elementary(9, 2, 6).unwrap();
        assert_eq!(max_common_divisor(&six).unwrap(), 3);
        assert!(max_common_divisor(&MultiHypergraph::new(3, 2).unwrap()).is_err());
    }
}
