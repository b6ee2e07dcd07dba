mod common;

use std::cmp::Ordering;

use common::{connected_graph, floyd_warshall, naive_decay, scaled_difference, scaled_difference_over};
use decay_core::centrality::{
    centrality_table, compare_decay, dc_difference_coeffs, dc_difference_factored,
    dc_difference_factored_eps, decay_centrality, higher_order_farness, horner,
};
use decay_core::graph::{all_profiles, distance_profile};
use decay_core::ordering::{
    check_farness_dominance, check_high_decay_conditions, check_low_decay_conditions,
    check_profile_dominance, lex_compare, lex_compare_closeness, ud_compare,
};
use decay_core::{DeltaGrid, Relation};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn binomial(l: u64, k: u64) -> BigInt {
    if k > l {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..k {
        num *= l - t;
        den *= t + 1;
    }
    num / den
}

proptest! {
    #[test]
    fn bfs_matches_floyd_warshall(g in connected_graph(1, 12)) {
        let fw = floyd_warshall(&g);
        for i in 0..g.node_count() {
            prop_assert_eq!(g.bfs_distances(i).unwrap(), fw[i].clone());
        }
    }

    #[test]
    fn distances_are_symmetric(g in connected_graph(2, 64)) {
        let d: Vec<_> = (0..g.node_count()).map(|i| g.bfs_distances(i).unwrap()).collect();
        for i in 0..g.node_count() {
            for j in 0..g.node_count() {
                prop_assert_eq!(d[i][j], d[j][i]);
            }
        }
    }

    #[test]
    fn profiles_sum_to_n_minus_one(g in connected_graph(2, 40)) {
        let n = g.node_count();
        for p in all_profiles(&g).unwrap() {
            prop_assert_eq!(p.len(), n - 1);
            prop_assert_eq!(p.counts.iter().map(|&c| c as usize).sum::<usize>(), n - 1);
            prop_assert_eq!(p.degree() as usize, g.degree(p.node));
        }
    }

    #[test]
    fn farness_vector_matches_binomial_sums(g in connected_graph(2, 14)) {
        let table = centrality_table(&g).unwrap();
        for node in &table.nodes {
            let counts = &node.profile.counts;
            for k in 1..=counts.len() {
                let mut s = BigInt::zero();
                for (idx, &c) in counts.iter().enumerate() {
                    s += binomial(idx as u64 + 1, k as u64) * c;
                }
                if k % 2 == 0 {
                    s = -s;
                }
                prop_assert_eq!(&node.fvec[k - 1], &s);
            }
            prop_assert_eq!(&node.fvec[0], &BigInt::from(node.farness));
            prop_assert_eq!(node.cvec[0], node.closeness.value());
        }
    }

    #[test]
    fn horner_matches_pairwise_sum(g in connected_graph(2, 12), delta in 0.001f64..0.999) {
        let fw = floyd_warshall(&g);
        for i in 0..g.node_count() {
            let p = distance_profile(&g, i).unwrap();
            let naive = naive_decay(&fw, i, delta);
            let fast = decay_centrality(&p, delta).unwrap();
            prop_assert!((fast - naive).abs() <= 1e-12 * naive.abs().max(1.0));
        }
    }

    #[test]
    fn decay_is_increasing_with_limits(g in connected_graph(2, 20)) {
        let n = g.node_count() as f64;
        let grid = DeltaGrid::default();
        for p in all_profiles(&g).unwrap() {
            let curve: Vec<f64> = grid.iter().map(|d| horner(&p.counts, d)).collect();
            prop_assert!(curve.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(horner(&p.counts, 1e-9) < 1e-6);
            prop_assert!((horner(&p.counts, 1.0 - 1e-9) - (n - 1.0)).abs() < 1e-6);
        }
    }

    #[test]
    fn factored_differences_match_direct(g in connected_graph(3, 20)) {
        let profiles = all_profiles(&g).unwrap();
        let grid = DeltaGrid::default();
        for pi in &profiles {
            for pj in &profiles {
                let diff = dc_difference_coeffs(pi, pj).unwrap();
                prop_assert_eq!(diff.a.iter().sum::<i64>(), 0);
                prop_assert!(diff.b.iter().sum::<BigInt>().is_zero());
                for d in grid.iter() {
                    let direct = horner(&pi.counts, d) - horner(&pj.counts, d);
                    let fa = dc_difference_factored(&diff.a, d).unwrap();
                    let fb = dc_difference_factored_eps(&diff.b, d).unwrap();
                    prop_assert!((fa - direct).abs() <= 1e-10);
                    prop_assert!((fb - direct).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn closeness_order_reverses_farness_order(g in connected_graph(2, 14)) {
        let table = centrality_table(&g).unwrap();
        for x in &table.nodes {
            for y in &table.nodes {
                let by_c = lex_compare_closeness(&x.fvec, &y.fvec).unwrap().relation;
                let by_f = lex_compare(&x.fvec, &y.fvec).unwrap().relation;
                prop_assert_eq!(by_c, by_f.reverse());
                let floats = match x.cvec.partial_cmp(&y.cvec).unwrap() {
                    Ordering::Greater => Relation::Greater,
                    Ordering::Less => Relation::Less,
                    Ordering::Equal => Relation::Equal,
                };
                if x.fvec != y.fvec {
                    prop_assert_eq!(by_c, floats);
                }
            }
        }
    }

    #[test]
    fn unsorted_dominance_is_a_strict_partial_order(
        a in proptest::collection::vec(-3i64..4, 5),
        b in proptest::collection::vec(-3i64..4, 5),
        c in proptest::collection::vec(-3i64..4, 5),
    ) {
        let gt = |x: &[i64], y: &[i64]| ud_compare(x, y).unwrap().relation == Relation::Greater;
        prop_assert!(!gt(&a, &a));
        prop_assert!(!(gt(&a, &b) && gt(&b, &a)));
        if gt(&a, &b) && gt(&b, &c) {
            prop_assert!(gt(&a, &c));
        }
        prop_assert_eq!(
            ud_compare(&a, &b).unwrap().relation,
            ud_compare(&b, &a).unwrap().relation.reverse()
        );
    }

    #[test]
    fn fired_checkers_imply_strict_order(g in connected_graph(5, 10)) {
        let table = centrality_table(&g).unwrap();
        for x in &table.nodes {
            for y in &table.nodes {
                let a: Vec<i64> = x.profile.counts.iter().zip(&y.profile.counts)
                    .map(|(&u, &v)| u as i64 - v as i64).collect();
                let everywhere = check_profile_dominance(&x.profile, &y.profile).unwrap().relation
                    == Relation::Greater
                    || check_farness_dominance(&x.fvec, &y.fvec).unwrap().relation
                        == Relation::Greater;
                let low = check_low_decay_conditions(&x.profile, &y.profile).unwrap().fired();
                let high = check_high_decay_conditions(&x.fvec, &y.fvec).unwrap().fired();
                for k in 1..1000i128 {
                    let positive = scaled_difference(&a, k) > 0;
                    if everywhere || (low && k <= 500) || (high && k >= 500) {
                        prop_assert!(positive, "nodes {} {} at {}/1000", x.node, y.node, k);
                    }
                }
            }
        }
    }

    #[test]
    fn exact_comparison_agrees_with_integer_sign(g in connected_graph(2, 12), k in 1i128..1024) {
        let delta = k as f64 / 1024.0;
        let profiles = all_profiles(&g).unwrap();
        for pi in &profiles {
            for pj in &profiles {
                let a: Vec<i64> = pi.counts.iter().zip(&pj.counts)
                    .map(|(&u, &v)| u as i64 - v as i64).collect();
                let expect = scaled_difference_over(&a, k, 1024).cmp(&0);
                let dci = horner(&pi.counts, delta);
                let dcj = horner(&pj.counts, delta);
                prop_assert_eq!(compare_decay(&pi.counts, dci, &pj.counts, dcj, delta), expect);
            }
        }
    }
}

#[test]
fn farness_vector_of_long_path_needs_big_integers() {
    let n = 300;
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    let g = decay_core::Graph::new(n, &edges).unwrap();
    let p = distance_profile(&g, 0).unwrap();
    let f = higher_order_farness(&p);
    // One node at each distance 1..n-1: F^k = ±C(n, k+1).
    for k in [1usize, 2, 150, 299] {
        let expect = binomial(n as u64, k as u64 + 1);
        let expect = if k % 2 == 0 { -expect } else { expect };
        assert_eq!(f[k - 1], expect);
    }
}
