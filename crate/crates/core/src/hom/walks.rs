//! Walk counts from adjacency-matrix powers, used as an independent
//! cross-check for path and cycle homomorphism counts.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::HomCount;
use crate::graph::Graph;

fn step(g: &Graph, v: &[BigUint]) -> Vec<BigUint> {
    (0..g.n())
        .map(|u| g.neighbors(u).iter().map(|&w| &v[w]).sum())
        .collect()
}

/// `hom(C_k, g) = trace(A^k)`.
pub fn closed_walks(g: &Graph, k: usize) -> HomCount {
    let mut total = BigUint::zero();
    for s in 0..g.n() {
        let mut v = vec![BigUint::zero(); g.n()];
        v[s] = BigUint::one();
        for _ in 0..k {
            v = step(g, &v);
        }
        total += &v[s];
    }
    HomCount(total)
}

/// `hom(P_{len+1}, g)`: walks with `len` edges, `1^T A^len 1`.
pub fn walks(g: &Graph, len: usize) -> HomCount {
    let mut v = vec![BigUint::one(); g.n()];
    for _ in 0..len {
        v = step(g, &v);
    }
    HomCount(v.into_iter().sum())
}
