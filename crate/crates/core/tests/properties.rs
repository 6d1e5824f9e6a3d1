use homscope::canon::canonical_form;
use homscope::divergence::{omega, wasserstein1_exact, EmpiricalSample};
use homscope::graph::{cycle, disjoint_union};
use homscope::hom::{
    count_aut, count_hom, count_hom_with, count_inj, count_onto, count_sub, spasm, sub_via_spasm,
    CountOptions, HomCount,
};
use homscope::matrix::exact_rank;
use homscope::Graph;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut it = bits.into_iter();
            for u in 0..n {
                for v in u + 1..n {
                    if it.next().unwrap() {
                        edges.push((u, v));
                    }
                }
            }
            Graph::new(n, edges).unwrap()
        })
    })
}

fn graph_with_perm(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

/// Trace of `A^k` by repeated dense multiplication.
fn trace_power(g: &Graph, k: u32) -> u64 {
    let n = g.n();
    let a: Vec<Vec<u64>> = (0..n)
        .map(|u| (0..n).map(|v| u64::from(g.has_edge(u, v))).collect())
        .collect();
    let mut p = a.clone();
    for _ in 1..k {
        p = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|l| p[i][l] * a[l][j]).sum())
                    .collect()
            })
            .collect();
    }
    (0..n).map(|i| p[i][i]).sum()
}

/// Rank over the rationals by plain Gaussian elimination.
fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let factor = m[r][c].clone() / pivot.clone();
                for j in c..cols {
                    let sub = factor.clone() * m[rank][j].clone();
                    m[r][j] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gluing_is_multiplicative(f1 in graph(4), f2 in graph(4), g in graph(7)) {
        let raw = CountOptions { split_components: false, ..CountOptions::default() };
        let glued = count_hom_with(&disjoint_union(&f1, &f2), &g, &raw).unwrap();
        let product = count_hom(&f1, &g).unwrap().into_inner() * count_hom(&f2, &g).unwrap().into_inner();
        prop_assert_eq!(glued.into_inner(), product);
    }

    #[test]
    fn hom_decomposes_over_images(f in graph(5), g in graph(6)) {
        let mut total = BigRational::zero();
        for member in &spasm(&f).unwrap().members {
            let onto = count_onto(&f, &member.graph).unwrap().into_inner();
            let inj = count_inj(&member.graph, &g).unwrap().into_inner();
            let aut = count_aut(&member.graph).unwrap().into_inner();
            total += BigRational::new(BigInt::from(onto * inj), BigInt::from(aut));
        }
        let hom = BigInt::from(count_hom(&f, &g).unwrap().into_inner());
        prop_assert_eq!(total, BigRational::from_integer(hom));
    }

    #[test]
    fn spasm_inversion_matches_subgraph_count(f in graph(5), g in graph(8)) {
        prop_assert_eq!(sub_via_spasm(&f, &g).unwrap(), count_sub(&f, &g).unwrap());
    }

    #[test]
    fn spasm_members_have_fewer_homs(f in graph(5), g in graph(7)) {
        let top = count_hom(&f, &g).unwrap();
        for member in &spasm(&f).unwrap().members {
            prop_assert!(count_hom(&member.graph, &g).unwrap().value() <= top.value());
        }
    }

    #[test]
    fn cycle_counts_are_traces(g in graph(8), k in 3u32..=5) {
        prop_assert_eq!(count_hom(&cycle(k as usize), &g).unwrap(), HomCount::from(trace_power(&g, k)));
    }

    #[test]
    fn counts_are_isomorphism_invariant((g, perm) in graph_with_perm(8), f in graph(4)) {
        let h = g.permute(&perm);
        prop_assert_eq!(count_hom(&f, &g).unwrap(), count_hom(&f, &h).unwrap());
        prop_assert_eq!(count_inj(&f, &g).unwrap(), count_inj(&f, &h).unwrap());
        prop_assert_eq!(canonical_form(&g).unwrap(), canonical_form(&h).unwrap());
    }

    #[test]
    fn rank_agrees_with_rational_elimination(
        rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 1..=5),
        seed in any::<u64>(),
    ) {
        let as_big = |rs: &[Vec<i64>]| -> Vec<Vec<BigInt>> {
            rs.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
        };
        let rank = exact_rank(&as_big(&rows));
        prop_assert_eq!(rank, rational_rank(&rows));
        let mut shuffled = rows.clone();
        shuffled.rotate_left(seed as usize % rows.len());
        for r in &mut shuffled {
            r.rotate_right((seed >> 8) as usize % 4);
        }
        prop_assert_eq!(exact_rank(&as_big(&shuffled)), rank);
    }

    #[test]
    fn wasserstein_is_a_metric(
        pts in proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 2), 9),
    ) {
        let sample = |r: &[Vec<f64>]| EmpiricalSample::new(r.to_vec()).unwrap();
        let (a, b, c) = (sample(&pts[0..3]), sample(&pts[3..6]), sample(&pts[6..9]));
        let ab = wasserstein1_exact(&a, &b).unwrap();
        prop_assert!((ab - wasserstein1_exact(&b, &a).unwrap()).abs() < 1e-12);
        let ac = wasserstein1_exact(&a, &c).unwrap();
        let cb = wasserstein1_exact(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12);
        prop_assert!(wasserstein1_exact(&a, &a).unwrap().abs() < 1e-12);
    }

    #[test]
    fn omega_is_monotone_and_bounded(a in 0.0f64..50.0, b in 0.0f64..50.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(omega(lo) <= omega(hi));
        prop_assert!(omega(hi) <= 1.0);
        if lo <= 1.0 {
            // v/2 ≤ 1 − e^{−v} on [0, 1]
            prop_assert_eq!(omega(lo), (lo / 2.0).sqrt());
        }
    }
}

#[test]
fn aut_is_one_for_trivial_pattern() {
    assert!(count_aut(&Graph::empty(1)).unwrap().value().is_one());
}
