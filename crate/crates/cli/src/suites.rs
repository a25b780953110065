//! Property sweeps behind `quhyper verify --suite ...`.
//!
//! Each suite returns a list of named checks with counts; a check fails if
//! any of its cases fails. Cases run in parallel and are tallied in a fixed
//! order, so reports are reproducible for a given seed.

use std::fmt;

use clap::ValueEnum;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use quhyper::entanglement::{
    entanglement_of, extremal_multiplicities, lower_bound, max_common_divisor, tighter_lower_bound,
    BoundSpec,
};
use quhyper::hypergraph::{enumerate_connected, Bipartition, MultiHypergraph};
use quhyper::modarith::{divisors, gcd, lpf};
use quhyper::reduction::{
    reduce, reduce_all_outcomes, sample_bound_checks, verify_trace_monotone, OutcomePolicy,
    DEFAULT_BRANCH_CAP, MONOTONE_TOL,
};
use quhyper::statevec::{
    all_bipartitions, bipartite_entanglement, build_state, multipartite_entanglement,
    schmidt_spectrum, Caps,
};
use quhyper::stringsets::{
    cardinality_closed, cardinality_factorized, cardinality_recursive, gcd_reduction_check,
    overlap_character_sum, overlap_product_identity, overlap_sum_exact, product_histogram,
    split_identity_check, tail_identity_sides, weighted_root_sum, weighted_root_sum_direct,
    StringSetQuery, IDENTITY_TOL,
};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Stringsets,
    Identities,
    Elementary,
    Bounds,
    Reduction,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub trials: usize,
    /// Largest dimension swept; each suite has its own default.
    pub d_max: Option<u64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            trials: 100,
            d_max: None,
        }
    }
}

/// Outcome of one case: `Err` carries a short description of the failure.
type Case = Result<(), String>;

fn case(ok: bool, detail: impl FnOnce() -> String) -> Case {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    /// First few failures.
    pub examples: Vec<String>,
}

impl Check {
    fn from_cases(name: &str, cases: Vec<Case>) -> Self {
        let failures: Vec<String> = cases.iter().filter_map(|c| c.clone().err()).collect();
        Self {
            name: name.to_string(),
            checked: cases.len(),
            failed: failures.len(),
            examples: failures.into_iter().take(3).collect(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            if c.passed() {
                out.push_str(&format!("PASS {} ({} cases)\n", c.name, c.checked));
            } else {
                out.push_str(&format!(
                    "FAIL {} ({} of {} cases failed)\n",
                    c.name, c.failed, c.checked
                ));
                for e in &c.examples {
                    out.push_str(&format!("     {e}\n"));
                }
            }
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict} suite {}\n", self.suite));
        out
    }
}

pub fn run(suite: Suite, opts: &SuiteOptions, caps: &Caps) -> quhyper::Result<SuiteReport> {
    let checks = match suite {
        Suite::Stringsets => stringsets(opts.d_max.unwrap_or(8))?,
        Suite::Identities => identities(opts.d_max.unwrap_or(8))?,
        Suite::Elementary => elementary(opts.d_max.unwrap_or(6), caps)?,
        Suite::Bounds => bounds(opts.d_max.unwrap_or(4), opts.trials, opts.seed, caps)?,
        Suite::Reduction => reduction(opts.d_max.unwrap_or(4), caps)?,
    };
    Ok(SuiteReport { suite, checks })
}

/// Largest `n` with `d^n ≤ limit`.
pub fn max_qudits(d: u64, limit: u64) -> u32 {
    let mut n = 0;
    let mut size = 1u64;
    while size.saturating_mul(d) <= limit {
        size *= d;
        n += 1;
    }
    n
}

fn stringsets(d_max: u64) -> quhyper::Result<Vec<Check>> {
    let cells: Vec<(u64, u32)> = (2..=d_max)
        .flat_map(|d| (1..=max_qudits(d, 1_000_000)).map(move |n| (d, n)))
        .collect();
    let oracle: Vec<Vec<Case>> = cells
        .par_iter()
        .map(|&(d, n)| {
            let hist = product_histogram(d, n, 1_000_000)?;
            (0..d)
                .map(|x| {
                    let q = StringSetQuery::new(d, n, x)?;
                    let closed = cardinality_closed(&q);
                    let rec = cardinality_recursive(&q);
                    let brute = BigUint::from(hist[x as usize]);
                    Ok(case(closed == rec && rec == brute, || {
                        format!(
                            "d={d} n={n} x={x}: closed {closed}, recursive {rec}, brute {brute}"
                        )
                    }))
                })
                .collect()
        })
        .collect::<quhyper::Result<_>>()?;

    let mut partition = Vec::new();
    let mut gcd_cases = Vec::new();
    for d in 2..=d_max.min(10) {
        for n in 1..=10u32 {
            let total: BigUint = (0..d)
                .map(|x| StringSetQuery::new(d, n, x).map(|q| cardinality_closed(&q)))
                .sum::<quhyper::Result<BigUint>>()?;
            partition.push(case(total == BigUint::from(d).pow(n), || {
                format!("d={d} n={n}: sum {total}")
            }));
            for x in 0..d {
                gcd_cases.push(case(gcd_reduction_check(d, n, x)?, || {
                    format!("d={d} n={n} x={x}")
                }));
            }
        }
    }

    let mut factorized = Vec::new();
    for d in [4u64, 6, 8, 9, 10, 12] {
        for n in 1..=6u32 {
            for x in 0..d {
                let q = StringSetQuery::new(d, n, x)?;
                let closed = BigRational::from_integer(cardinality_closed(&q).into());
                factorized.push(case(cardinality_factorized(&q) == closed, || {
                    format!("d={d} n={n} x={x}")
                }));
            }
        }
    }

    Ok(vec![
        Check::from_cases(
            "closed = recursive = brute force",
            oracle.into_iter().flatten().collect(),
        ),
        Check::from_cases("cardinalities partition d^n", partition),
        Check::from_cases("cardinality depends only on gcd(x, d)", gcd_cases),
        Check::from_cases("prime-power factorization", factorized),
    ])
}

fn identities(d_max: u64) -> quhyper::Result<Vec<Check>> {
    let cells: Vec<(u64, u32)> = (2..=d_max)
        .flat_map(|d| (2..=6u32).map(move |n| (d, n)))
        .collect();
    let per_cell: Vec<(Vec<Case>, Vec<Case>)> = cells
        .par_iter()
        .map(|&(d, n)| {
            let mut split = Vec::new();
            let mut root = Vec::new();
            for alpha in 0..d {
                for k in 1..n {
                    split.push(case(split_identity_check(d, n, k, alpha)?, || {
                        format!("d={d} n={n} k={k} alpha={alpha}")
                    }));
                }
                let exact = weighted_root_sum(d, n, alpha)?;
                let direct = weighted_root_sum_direct(d, n, alpha)?;
                let zero = StringSetQuery::new(d, n - 1, 0)?;
                let low = cardinality_closed(&zero) * d;
                let high = BigUint::from(d).pow(n);
                let exact_f = exact.to_f64().unwrap_or(f64::NAN);
                root.push(case(
                    direct.im.abs() < IDENTITY_TOL
                        && (direct.re - exact_f).abs() < IDENTITY_TOL
                        && low <= exact
                        && exact <= high,
                    || format!("d={d} n={n} alpha={alpha}: exact {exact}, direct {direct}"),
                ));
            }
            Ok((split, root))
        })
        .collect::<quhyper::Result<_>>()?;

    let mut overlap = Vec::new();
    for d in 2..=d_max {
        for n in 1..=6u32 {
            for m in 0..d {
                let product = overlap_product_identity(d, n, m)?;
                let direct = overlap_character_sum(d, n, m)?;
                let p = product.to_f64().unwrap_or(f64::NAN);
                overlap.push(case(
                    (direct.re - p).abs() < IDENTITY_TOL
                        && direct.im.abs() < IDENTITY_TOL
                        && product == overlap_sum_exact(d, n, m)?,
                    || format!("d={d} n={n} m={m}: product {product}, direct {direct}"),
                ));
            }
        }
    }

    let mut tail = Vec::new();
    for p in [2u64, 3, 5] {
        for l in 1..=4u32 {
            for n in 1..=8u32 {
                let (lhs, rhs) = tail_identity_sides(p, l, n)?;
                tail.push(case(lhs == rhs, || {
                    format!("p={p} l={l} n={n}: {lhs} vs {rhs}")
                }));
            }
        }
    }

    let (split, root): (Vec<_>, Vec<_>) = per_cell.into_iter().unzip();
    Ok(vec![
        Check::from_cases("split identity", split.into_iter().flatten().collect()),
        Check::from_cases(
            "weighted root sum is real and bounded",
            root.into_iter().flatten().collect(),
        ),
        Check::from_cases("overlap product = character sum", overlap),
        Check::from_cases("tail-sum identity", tail),
    ])
}

fn elementary(d_max: u64, caps: &Caps) -> quhyper::Result<Vec<Check>> {
    let specs: Vec<(u64, u32, u64)> = (2..=d_max)
        .flat_map(|d| (2..=max_qudits(d, 4096)).flat_map(move |n| (1..d).map(move |m| (d, n, m))))
        .collect();
    let numeric: Vec<(Case, Case)> = specs
        .par_iter()
        .map(|&(d, n, m)| {
            let h = MultiHypergraph::elementary(d, n as usize, m)?;
            let psi = build_state(&h, caps)?;
            let closed = entanglement_of(d, n, m)?.to_f64().unwrap_or(f64::NAN);
            let e = multipartite_entanglement(&psi, caps)?.entanglement();
            let split = Bipartition::new(n as usize, 1..n as usize)?;
            let rank = schmidt_spectrum(&psi, &split, caps)?.rank() as u64;
            Ok((
                case((e - closed).abs() < 1e-8, || {
                    format!("d={d} n={n} m={m}: closed {closed}, numeric {e}")
                }),
                case(rank == d / gcd(m, d), || {
                    format!("d={d} n={n} m={m}: rank {rank}")
                }),
            ))
        })
        .collect::<quhyper::Result<_>>()?;

    let mut monotone = Vec::new();
    let mut gcd_eq = Vec::new();
    let mut minimal = Vec::new();
    for d in 2..=12u64 {
        for n in 2..=9u32 {
            let es: Vec<BigRational> = (1..d)
                .map(|m| entanglement_of(d, n, m))
                .collect::<quhyper::Result<_>>()?;
            for m in 1..d {
                let next = entanglement_of(d, n + 1, m)?;
                let here = &es[(m - 1) as usize];
                monotone.push(case(next < *here, || format!("d={d} n={n} m={m}")));
                if n <= 8 {
                    for m2 in 1..d {
                        if gcd(m, d) == gcd(m2, d) {
                            gcd_eq.push(case(*here == es[(m2 - 1) as usize], || {
                                format!("d={d} n={n} m={m} m'={m2}")
                            }));
                        }
                    }
                }
            }
            for m_star in divisors(d).into_iter().filter(|&s| s < d) {
                let target = d / lpf(d / m_star)?;
                let least = (1..d / m_star)
                    .map(|beta| &es[(beta * m_star - 1) as usize])
                    .min()
                    .expect("at least one multiple");
                minimal.push(case(es[(target - 1) as usize] == *least, || {
                    format!("d={d} n={n} m*={m_star}: minimum not at {target}")
                }));
            }
        }
    }

    let mut sandwich = Vec::new();
    for d in 2..=16u64 {
        for n in 2..=12u32 {
            let ok = extremal_multiplicities(d, n).map(|x| x.min_m == d / lpf(d).unwrap_or(d));
            sandwich.push(case(matches!(ok, Ok(true)), || {
                format!("d={d} n={n}: {ok:?}")
            }));
        }
    }

    let (numeric, rank): (Vec<_>, Vec<_>) = numeric.into_iter().unzip();
    Ok(vec![
        Check::from_cases("closed form = state-vector entanglement", numeric),
        Check::from_cases("Schmidt rank d/gcd(m,d)", rank),
        Check::from_cases("strictly decreasing in n", monotone),
        Check::from_cases("equal entanglement for equal gcd", gcd_eq),
        Check::from_cases("minimum among multiples at d/lpf(d/m*)", minimal),
        Check::from_cases("E(d/lpf(d)) <= E(m) <= E(1)", sandwich),
    ])
}

fn bounds(d_max: u64, trials: usize, seed: u64, caps: &Caps) -> quhyper::Result<Vec<Check>> {
    let mut lower = Vec::new();
    let mut tighter = Vec::new();
    for d in 2..=d_max {
        let n_max = max_qudits(d, 4096) as usize;
        if n_max < 2 {
            continue;
        }
        let report = sample_bound_checks(d, 2..=n_max, trials, seed.wrapping_add(d), caps)?;
        for c in &report.checks {
            let describe = || format!("E = {} for {}", c.entanglement, c.hypergraph);
            lower.push(case(
                c.entanglement >= c.lower_bound - MONOTONE_TOL,
                describe,
            ));
            if let Some(t) = c.tighter_bound {
                tighter.push(case(c.entanglement >= t - MONOTONE_TOL, describe));
            }
        }
    }

    // The six-qudit d=10 example is far beyond the state-vector cap, so only
    // its closed-form side is checked.
    let example = MultiHypergraph::from_edges(
        10,
        6,
        [
            (vec![1, 2, 3, 4], 8),
            (vec![3, 4, 5], 2),
            (vec![4, 5, 6], 6),
            (vec![1, 6], 4),
        ],
    )?;
    let m_star = max_common_divisor(&example)?;
    let base = lower_bound(10, example.k_max() as u32)?;
    let tight = tighter_lower_bound(&BoundSpec::for_hypergraph(&example)?)?;
    let closed = vec![case(
        m_star == 2
            && base == BigRational::new(1.into(), 8.into())
            && tight == BigRational::new(64.into(), 125.into()),
        || format!("m* = {m_star}, bound {base}, tighter {tight}"),
    )];

    Ok(vec![
        Check::from_cases("E >= E(G_kmax^(d/lpf(d)))", lower),
        Check::from_cases("E >= E(G_kmax^(d/lpf(d/m*))) when m* > 1", tighter),
        Check::from_cases("d=10 example bounds", closed),
    ])
}

/// `(d, n, smallest edge)` for the exhaustive reduction sweep: loops are
/// enumerated for three qudits or fewer.
pub const REDUCTION_CASES: [(u64, usize, usize); 7] = [
    (2, 2, 1),
    (2, 3, 1),
    (2, 4, 2),
    (3, 2, 1),
    (3, 3, 1),
    (4, 2, 1),
    (4, 3, 1),
];

/// Per-branch results for every (hypergraph, bipartition, outcome sequence).
#[derive(Clone, Debug, Default)]
pub struct ReductionSweep {
    pub elementary: Vec<Case>,
    pub rewrites: Vec<Case>,
    pub probabilities: Vec<Case>,
    pub final_value: Vec<Case>,
    pub monotone: Vec<Case>,
    /// One case per (hypergraph, bipartition).
    pub averaged: Vec<Case>,
}

impl ReductionSweep {
    fn merge(mut self, other: Self) -> Self {
        self.elementary.extend(other.elementary);
        self.rewrites.extend(other.rewrites);
        self.probabilities.extend(other.probabilities);
        self.final_value.extend(other.final_value);
        self.monotone.extend(other.monotone);
        self.averaged.extend(other.averaged);
        self
    }
}

/// Reduces `h` across `b` on every outcome branch and checks each trace.
pub fn sweep_one(
    h: &MultiHypergraph,
    b: &Bipartition,
    caps: &Caps,
) -> quhyper::Result<ReductionSweep> {
    let mut out = ReductionSweep::default();
    let label = || format!("{h} across {b}");
    let start = bipartite_entanglement(&build_state(h, caps)?, b, caps)?;
    let mut mean = 0.0;
    for branch in reduce_all_outcomes(h, b, DEFAULT_BRANCH_CAP)? {
        let t = &branch.trace;
        let last = t.final_hypergraph();
        let ok = last.edge_count() == 1
            && last
                .sole_edge()
                .is_some_and(|(e, _)| b.crosses(e) && e.len() >= 2 && e.len() <= h.k_max());
        out.elementary
            .push(case(ok, || format!("{}: ended in {last}", label())));
        let r = verify_trace_monotone(t, caps)?;
        let outcomes = &branch.outcomes;
        out.rewrites.push(case(r.rewrite_mismatches.is_empty(), || {
            format!("{} outcomes {outcomes:?}", label())
        }));
        out.probabilities
            .push(case(r.probability_defects.is_empty(), || {
                format!("{} outcomes {outcomes:?}", label())
            }));
        out.final_value.push(case(r.final_matches(), || {
            format!("{} outcomes {outcomes:?}", label())
        }));
        out.monotone.push(case(r.is_monotone(), || {
            let v = &r.violations[0];
            format!(
                "{} outcomes {outcomes:?}: step {} ({}) raises E^AB {} -> {}",
                label(),
                v.step + 1,
                v.kind.as_str(),
                v.before,
                v.after
            )
        }));
        mean += branch.probability.to_f64().unwrap_or(f64::NAN)
            * r.values.last().copied().unwrap_or(f64::NAN);
    }
    out.averaged.push(case(mean <= start + MONOTONE_TOL, || {
        format!("{}: mean final {mean} > {start}", label())
    }));
    Ok(out)
}

/// Runs [`sweep_one`] over every connected hypergraph and bipartition of the
/// given `(d, n, smallest edge)` classes.
pub fn reduction_sweep(
    classes: &[(u64, usize, usize)],
    caps: &Caps,
) -> quhyper::Result<ReductionSweep> {
    let mut pairs = Vec::new();
    for &(d, n, min_edge) in classes {
        for h in enumerate_connected(d, n, min_edge, 1 << 24)? {
            for b in all_bipartitions(n) {
                pairs.push((h.clone(), b));
            }
        }
    }
    let parts: Vec<ReductionSweep> = pairs
        .par_iter()
        .map(|(h, b)| sweep_one(h, b, caps))
        .collect::<quhyper::Result<_>>()?;
    Ok(parts
        .into_iter()
        .fold(ReductionSweep::default(), ReductionSweep::merge))
}

pub fn reduction_example() -> (MultiHypergraph, Bipartition) {
    let h = MultiHypergraph::from_edges(
        4,
        5,
        [
            (vec![2, 3, 4, 5], 1),
            (vec![3, 4, 5], 2),
            (vec![1, 2], 2),
            (vec![3, 4], 1),
        ],
    )
    .expect("valid example");
    (h, Bipartition::new(5, [1, 2, 3]).expect("valid split"))
}

fn reduction(d_max: u64, caps: &Caps) -> quhyper::Result<Vec<Check>> {
    let (h, b) = reduction_example();
    let t = reduce(&h, &b, OutcomePolicy::default())?;
    let r = verify_trace_monotone(&t, caps)?;
    let example = vec![case(
        r.passed() && t.final_hypergraph().edge_count() == 1,
        || format!("values {:?}", r.values),
    )];

    let classes: Vec<_> = REDUCTION_CASES
        .iter()
        .copied()
        .filter(|c| c.0 <= d_max)
        .collect();
    let s = reduction_sweep(&classes, caps)?;
    Ok(vec![
        Check::from_cases(
            "example reduces monotonically to an elementary state",
            example,
        ),
        Check::from_cases("every branch ends elementary and crossing", s.elementary),
        Check::from_cases("rewrites agree with the state vector", s.rewrites),
        Check::from_cases("every outcome has probability 1/d", s.probabilities),
        Check::from_cases("final E^AB equals that of G_kappa^mu", s.final_value),
        Check::from_cases("E^AB non-increasing on every branch", s.monotone),
        Check::from_cases("E^AB non-increasing on average over branches", s.averaged),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qudit_limits() {
        assert_eq!(max_qudits(2, 4096), 12);
        assert_eq!(max_qudits(3, 4096), 7);
        assert_eq!(max_qudits(4, 4096), 6);
        assert_eq!(max_qudits(10, 1_000_000), 6);
    }

    #[test]
    fn small_suites_pass() {
        let caps = Caps::default();
        let opts = SuiteOptions {
            d_max: Some(4),
            trials: 5,
            ..SuiteOptions::default()
        };
        for suite in [
            Suite::Stringsets,
            Suite::Identities,
            Suite::Elementary,
            Suite::Bounds,
        ] {
            let report = run(suite, &opts, &caps).unwrap();
            assert!(report.passed(), "{}", report.render());
        }
    }

    #[test]
    fn sweep_of_qutrit_pairs() {
        let s = reduction_sweep(&[(3, 2, 1)], &Caps::default()).unwrap();
        assert!(!s.elementary.is_empty());
        assert!(s.elementary.iter().all(Result::is_ok));
        assert!(s.monotone.iter().all(Result::is_ok));
    }

    #[test]
    fn check_without_cases_fails() {
        assert!(!Check::from_cases("empty", vec![]).passed());
    }
}
