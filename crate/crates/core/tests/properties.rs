//! Randomized invariants checked against the state-vector oracle.

use num_bigint::BigUint;
use proptest::prelude::*;
use quhyper::entanglement::{alpha_elementary, ElementarySpec};
use quhyper::hypergraph::{random_connected, Edge, MultiHypergraph, RandomHypergraphOptions};
use quhyper::modarith::{gcd, solve_linear_congruence};
use quhyper::statevec::{
    all_bipartitions, bipartite_entanglement, build_state, multipartite_entanglement, Caps,
    AMPLITUDE_TOL,
};
use quhyper::stringsets::{cardinality_closed, cardinality_recursive, StringSetQuery};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hypergraph(d: u64, n: usize, seed: u64) -> MultiHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_connected(d, n, &mut rng, &RandomHypergraphOptions::default()).expect("valid sample")
}

fn small() -> impl Strategy<Value = (u64, usize, u64)> {
    (2u64..=4, 2usize..=4, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn x_dagger_rewrite_matches_state((d, n, seed) in small(), k in 1usize..=4, t in 1u64..4) {
        let k = (k - 1) % n + 1;
        let h = hypergraph(d, n, seed);
        let caps = Caps::default();
        let rewritten = build_state(&h.apply_x_dagger(k, t).unwrap(), &caps).unwrap();
        let applied = build_state(&h, &caps).unwrap().apply_x_dagger(k, t).unwrap();
        prop_assert!(rewritten.approx_eq_up_to_phase(&applied, AMPLITUDE_TOL));
    }

    #[test]
    fn controlled_z_matches_state((d, n, seed) in small(), mask in 1u32..16, t in 1u64..4) {
        let vertices: Vec<usize> = (1..=n).filter(|v| mask >> (v - 1) & 1 == 1).collect();
        prop_assume!(!vertices.is_empty());
        let h = hypergraph(d, n, seed);
        let caps = Caps::default();
        let e = Edge::new(vertices.clone()).unwrap();
        let rewritten = build_state(&h.apply_controlled_z(&e, t).unwrap(), &caps).unwrap();
        let applied = build_state(&h, &caps).unwrap().apply_controlled_phase(&vertices, t).unwrap();
        prop_assert!(rewritten.approx_eq_up_to_phase(&applied, AMPLITUDE_TOL));
    }

    #[test]
    fn measurement_matches_conditioning((d, n, seed) in small(), k in 1usize..=4, q in 0u64..4) {
        let k = (k - 1) % n + 1;
        let q = q % d;
        let h = hypergraph(d, n, seed);
        let caps = Caps::default();
        let (record, rest) = h.measure_z(k, q).unwrap();
        prop_assert_eq!(record.qudit, k);
        let (p, conditioned) = build_state(&h, &caps).unwrap().condition(k, q).unwrap();
        prop_assert!((p - 1.0 / d as f64).abs() < AMPLITUDE_TOL);
        let conditioned = conditioned.unwrap();
        prop_assert!(build_state(&rest, &caps).unwrap().approx_eq_up_to_phase(&conditioned, AMPLITUDE_TOL));
    }

    #[test]
    fn json_round_trip((d, n, seed) in small()) {
        let h = hypergraph(d, n, seed);
        prop_assert_eq!(MultiHypergraph::from_json(&h.to_json()).unwrap(), h);
    }

    #[test]
    fn entanglement_is_minimum_over_splits((d, n, seed) in small()) {
        let h = hypergraph(d, n, seed);
        let caps = Caps::default();
        let psi = build_state(&h, &caps).unwrap();
        let e = multipartite_entanglement(&psi, &caps).unwrap().entanglement();
        let splits: Vec<f64> = all_bipartitions(n)
            .iter()
            .map(|b| bipartite_entanglement(&psi, b, &caps).unwrap())
            .collect();
        let least = splits.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!((e - least).abs() < 1e-9);
        prop_assert!((-1e-12..1.0).contains(&e));
    }

    #[test]
    fn local_x_leaves_entanglement_unchanged((d, n, seed) in small(), k in 1usize..=4) {
        let k = (k - 1) % n + 1;
        let h = hypergraph(d, n, seed);
        let caps = Caps::default();
        let before = multipartite_entanglement(&build_state(&h, &caps).unwrap(), &caps).unwrap().entanglement();
        let moved = h.apply_x_dagger(k, 1).unwrap();
        let after = multipartite_entanglement(&build_state(&moved, &caps).unwrap(), &caps).unwrap().entanglement();
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn cardinalities_partition_all_strings(d in 2u64..=30, n in 1u32..=8) {
        let mut total = BigUint::from(0u32);
        for x in 0..d {
            let q = StringSetQuery::new(d, n, x).unwrap();
            let closed = cardinality_closed(&q);
            prop_assert_eq!(&closed, &cardinality_recursive(&q));
            total += closed;
        }
        prop_assert_eq!(total, BigUint::from(d).pow(n));
    }

    #[test]
    fn alpha_depends_on_gcd_only(d in 2u64..=24, n in 2u32..=8, a in 1u64..24, b in 1u64..24) {
        prop_assume!(a % d != 0 && b % d != 0 && gcd(a, d) == gcd(b, d));
        let alpha = |m| alpha_elementary(&ElementarySpec::new(d, n, m).unwrap());
        prop_assert_eq!(alpha(a), alpha(b));
    }

    #[test]
    fn congruence_solutions_check(a in 0u64..200, b in 0u64..200, d in 2u64..200) {
        let solves = |q: u64| (b + q * a).is_multiple_of(d);
        match solve_linear_congruence(a, b, d) {
            Some(q) => prop_assert!(q < d && solves(q) && (0..q).all(|r| !solves(r))),
            None => prop_assert!((0..d).all(|r| !solves(r))),
        }
    }
}
