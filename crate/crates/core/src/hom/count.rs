//! Backtracking homomorphism search.
//!
//! Pattern vertices are visited in a connected, degree-descending order so
//! that every vertex after the first is constrained by an already-mapped
//! neighbour. Candidates are the intersection of the host neighbourhoods of
//! the images of earlier neighbours. Once the unvisited suffix of the order
//! is an independent set, the remaining choices are independent and the
//! count is a product of candidate-set sizes.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use super::bitset::BitSet;
use super::{CountOptions, HomCount};
use crate::error::{Error, Result};
use crate::graph::{Graph, RootedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Hom,
    Inj,
    Surj,
}

pub fn count_hom(f: &Graph, g: &Graph) -> Result<HomCount> {
    count_hom_with(f, g, &CountOptions::default())
}

pub fn count_hom_with(f: &Graph, g: &Graph, opts: &CountOptions) -> Result<HomCount> {
    if f.n() == 0 {
        return Err(Error::Precondition(
            "pattern must have at least one vertex".into(),
        ));
    }
    let mut budget = Budget::new(opts.budget);
    hom_split(f, None, g, None, opts.split_components, &mut budget).map(HomCount)
}

/// Homomorphisms sending `f.root` to `g.root`.
pub fn count_hom_rooted(f: &RootedGraph, g: &RootedGraph) -> Result<HomCount> {
    count_hom_rooted_with(f, g, &CountOptions::default())
}

pub fn count_hom_rooted_with(
    f: &RootedGraph,
    g: &RootedGraph,
    opts: &CountOptions,
) -> Result<HomCount> {
    let mut budget = Budget::new(opts.budget);
    hom_split(
        &f.graph,
        Some(f.root),
        &g.graph,
        Some(g.root),
        opts.split_components,
        &mut budget,
    )
    .map(HomCount)
}

/// Rooted counts `hom(f^root, g^v)` for every host vertex `v` at once.
pub fn count_hom_rooted_all(
    f: &RootedGraph,
    g: &Graph,
    opts: &CountOptions,
) -> Result<Vec<HomCount>> {
    let mut budget = Budget::new(opts.budget);
    (0..g.n())
        .map(|v| {
            hom_split(
                &f.graph,
                Some(f.root),
                g,
                Some(v),
                opts.split_components,
                &mut budget,
            )
            .map(HomCount)
        })
        .collect()
}

/// Vertex-injective homomorphisms.
pub fn count_inj(f: &Graph, g: &Graph) -> Result<HomCount> {
    count_inj_with(f, g, &CountOptions::default())
}

pub fn count_inj_with(f: &Graph, g: &Graph, opts: &CountOptions) -> Result<HomCount> {
    if f.n() > g.n() {
        return Ok(HomCount::zero());
    }
    let mut budget = Budget::new(opts.budget);
    search(f, None, g, None, Mode::Inj, &mut budget).map(HomCount)
}

/// Vertex-surjective homomorphisms; zero whenever `f.n() < g.n()`.
pub fn count_surj(f: &Graph, g: &Graph) -> Result<HomCount> {
    count_surj_with(f, g, &CountOptions::default())
}

pub fn count_surj_with(f: &Graph, g: &Graph, opts: &CountOptions) -> Result<HomCount> {
    if f.n() < g.n() || f.n() == 0 {
        return Ok(HomCount::zero());
    }
    let mut budget = Budget::new(opts.budget);
    search(f, None, g, None, Mode::Surj, &mut budget).map(HomCount)
}

/// Homomorphisms onto `g`: surjective on vertices and on edges, so the
/// image of `f` is exactly `g`. Inclusion–exclusion over edge subsets of
/// `g`; exponential in `g.edge_count()`, intended for small images.
pub fn count_onto(f: &Graph, g: &Graph) -> Result<HomCount> {
    count_onto_with(f, g, &CountOptions::default())
}

pub fn count_onto_with(f: &Graph, g: &Graph, opts: &CountOptions) -> Result<HomCount> {
    let edges = g.edges();
    if edges.len() > 24 {
        return Err(Error::InvalidArgument(format!(
            "onto counting enumerates edge subsets; {} edges is too many",
            edges.len()
        )));
    }
    if f.edge_count() < edges.len() {
        return Ok(HomCount::zero());
    }
    let mut total = BigInt::zero();
    for mask in 0u32..(1u32 << edges.len()) {
        let kept = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e);
        let sub = Graph::from_edges_dedup(g.n(), kept);
        let c = BigInt::from(count_surj_with(f, &sub, opts)?.into_inner());
        if (edges.len() - mask.count_ones() as usize).is_multiple_of(2) {
            total += c;
        } else {
            total -= c;
        }
    }
    total
        .to_biguint()
        .map(HomCount)
        .ok_or_else(|| Error::Invariant("negative onto count".into()))
}

pub fn count_aut(f: &Graph) -> Result<HomCount> {
    count_inj(f, f)
}

/// Number of (not necessarily induced) copies of `f` in `g`: `inj / aut`.
pub fn count_sub(f: &Graph, g: &Graph) -> Result<HomCount> {
    let inj = count_inj(f, g)?;
    let aut = count_aut(f)?;
    inj.checked_div(&aut)
}

struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    #[inline]
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::WorkLimit { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

fn hom_split(
    f: &Graph,
    f_root: Option<usize>,
    g: &Graph,
    g_root: Option<usize>,
    split: bool,
    budget: &mut Budget,
) -> Result<BigUint> {
    if !split {
        return search(f, f_root, g, g_root, Mode::Hom, budget);
    }
    let components = f.components();
    if components.len() == 1 {
        return search(f, f_root, g, g_root, Mode::Hom, budget);
    }
    let mut total = BigUint::from(1u32);
    for comp in components {
        let sub = f.induced(&comp);
        let root = f_root.and_then(|r| comp.iter().position(|&v| v == r));
        let (fr, gr) = match root {
            Some(r) => (Some(r), g_root),
            None => (None, None),
        };
        total *= search(&sub, fr, g, gr, Mode::Hom, budget)?;
        if total.is_zero() {
            break;
        }
    }
    Ok(total)
}

/// Visiting order: root (if any) or a maximum-degree vertex first, then
/// repeatedly the vertex with most already-placed neighbours, ties broken
/// by degree and then by index.
fn visit_order(f: &Graph, root: Option<usize>) -> Vec<usize> {
    let n = f.n();
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for step in 0..n {
        let next = match (step, root) {
            (0, Some(r)) => r,
            _ => (0..n)
                .filter(|&v| !placed[v])
                .max_by_key(|&v| (links[v], f.degree(v), std::cmp::Reverse(v)))
                .unwrap(),
        };
        placed[next] = true;
        order.push(next);
        for &w in f.neighbors(next) {
            links[w] += 1;
        }
    }
    order
}

struct Plan {
    /// For each position, the positions of earlier neighbours.
    back: Vec<Vec<usize>>,
    /// First position from which the remaining vertices are pairwise
    /// non-adjacent.
    independent_tail: usize,
}

impl Plan {
    fn new(f: &Graph, order: &[usize]) -> Self {
        let k = order.len();
        let mut pos = vec![0; k];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let back: Vec<Vec<usize>> = order
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                f.neighbors(v)
                    .iter()
                    .map(|&w| pos[w])
                    .filter(|&p| p < i)
                    .collect()
            })
            .collect();
        let mut independent_tail = k;
        while independent_tail > 0 {
            let i = independent_tail - 1;
            let v = order[i];
            if f.neighbors(v).iter().any(|&w| pos[w] > i) {
                break;
            }
            independent_tail = i;
        }
        Plan {
            back,
            independent_tail,
        }
    }
}

/// Exact accumulator: machine words until they overflow.
struct Acc {
    small: u128,
    big: BigUint,
}

impl Acc {
    fn add(&mut self, x: u128) {
        match self.small.checked_add(x) {
            Some(s) => self.small = s,
            None => {
                self.big += self.small;
                self.small = x;
            }
        }
    }

    fn add_big(&mut self, x: BigUint) {
        self.big += x;
    }

    fn finish(self) -> BigUint {
        self.big + self.small
    }
}

struct Search<'a> {
    k: usize,
    host_n: usize,
    host: Vec<BitSet>,
    plan: Plan,
    mode: Mode,
    /// Host vertex forced for position 0, if rooted.
    fixed_first: Option<usize>,
    image: Vec<usize>,
    cands: Vec<BitSet>,
    used: BitSet,
    cover: Vec<u32>,
    uncovered: usize,
    acc: Acc,
    budget: &'a mut Budget,
}

fn search(
    f: &Graph,
    f_root: Option<usize>,
    g: &Graph,
    g_root: Option<usize>,
    mode: Mode,
    budget: &mut Budget,
) -> Result<BigUint> {
    let k = f.n();
    if k == 0 {
        return Ok(BigUint::from(1u32));
    }
    if g.n() == 0 {
        return Ok(BigUint::zero());
    }
    let order = visit_order(f, f_root);
    let plan = Plan::new(f, &order);
    let host = (0..g.n())
        .map(|v| {
            let mut s = BitSet::empty(g.n());
            for &w in g.neighbors(v) {
                s.insert(w);
            }
            s
        })
        .collect();
    let mut s = Search {
        k,
        host_n: g.n(),
        host,
        plan,
        mode,
        fixed_first: if f_root.is_some() { g_root } else { None },
        image: vec![usize::MAX; k],
        cands: (0..k).map(|_| BitSet::empty(g.n())).collect(),
        used: BitSet::empty(g.n()),
        cover: vec![0; g.n()],
        uncovered: g.n(),
        acc: Acc {
            small: 0,
            big: BigUint::zero(),
        },
        budget,
    };
    s.go(0)?;
    Ok(s.acc.finish())
}

impl Search<'_> {
    /// Fills `self.cands[i]` from the images of earlier neighbours.
    fn candidates(&mut self, i: usize) {
        let out = &mut self.cands[i];
        match (i, self.fixed_first) {
            (0, Some(r)) => {
                *out = BitSet::empty(self.host_n);
                out.insert(r);
            }
            _ => *out = BitSet::full(self.host_n),
        }
        for &p in &self.plan.back[i] {
            out.intersect_with(&self.host[self.image[p]]);
        }
    }

    fn go(&mut self, i: usize) -> Result<()> {
        self.budget.tick()?;
        if i == self.k {
            if self.mode != Mode::Surj || self.uncovered == 0 {
                self.acc.add(1);
            }
            return Ok(());
        }
        if self.mode == Mode::Hom && i >= self.plan.independent_tail {
            let mut prod: u128 = 1;
            let mut big: Option<BigUint> = None;
            for j in i..self.k {
                self.candidates(j);
                let c = self.cands[j].len() as u128;
                if c == 0 {
                    return Ok(());
                }
                match big.as_mut() {
                    Some(b) => *b *= c,
                    None => match prod.checked_mul(c) {
                        Some(p) => prod = p,
                        None => big = Some(BigUint::from(prod) * c),
                    },
                }
            }
            match big {
                Some(b) => self.acc.add_big(b),
                None => self.acc.add(prod),
            }
            return Ok(());
        }
        self.candidates(i);
        if self.mode == Mode::Inj {
            let used = self.used.clone();
            self.cands[i].difference_with(&used);
        }
        let remaining_after = self.k - i - 1;
        if remaining_after == 0 {
            let c = &self.cands[i];
            let n = match self.mode {
                Mode::Hom | Mode::Inj => c.len(),
                Mode::Surj => match self.uncovered {
                    0 => c.len(),
                    1 => {
                        let missing = (0..self.host_n).find(|&v| self.cover[v] == 0).unwrap();
                        usize::from(c.contains(missing))
                    }
                    _ => 0,
                },
            };
            self.acc.add(n as u128);
            return Ok(());
        }
        let cand = self.cands[i].iter().collect::<Vec<_>>();
        for x in cand {
            self.image[i] = x;
            match self.mode {
                Mode::Hom => self.go(i + 1)?,
                Mode::Inj => {
                    self.used.insert(x);
                    self.go(i + 1)?;
                    self.used.remove(x);
                }
                Mode::Surj => {
                    self.cover[x] += 1;
                    if self.cover[x] == 1 {
                        self.uncovered -= 1;
                    }
                    if self.uncovered <= remaining_after {
                        self.go(i + 1)?;
                    }
                    self.cover[x] -= 1;
                    if self.cover[x] == 0 {
                        self.uncovered += 1;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{clique, cycle, path, paw, star};

    /// Enumerates all `g.n()^f.n()` maps.
    fn brute(f: &Graph, g: &Graph) -> (u64, u64, u64) {
        let (k, n) = (f.n(), g.n());
        let mut map = vec![0usize; k];
        let (mut hom, mut inj, mut surj) = (0, 0, 0);
        if n == 0 {
            return (0, 0, 0);
        }
        loop {
            if f.edges().iter().all(|&(u, v)| g.has_edge(map[u], map[v])) {
                hom += 1;
                let mut seen = vec![false; n];
                map.iter().for_each(|&x| seen[x] = true);
                let distinct = seen.iter().filter(|&&s| s).count();
                inj += u64::from(distinct == k);
                surj += u64::from(distinct == n);
            }
            let mut i = 0;
            while i < k {
                map[i] += 1;
                if map[i] < n {
                    break;
                }
                map[i] = 0;
                i += 1;
            }
            if i == k {
                return (hom, inj, surj);
            }
        }
    }

    #[test]
    fn spec_examples() {
        assert_eq!(count_hom(&path(2), &path(3)).unwrap(), 4);
        assert_eq!(count_hom(&cycle(4), &clique(3)).unwrap(), 18);
        assert_eq!(count_hom(&Graph::empty(1), &paw()).unwrap(), 4);
        assert_eq!(count_hom(&clique(3), &cycle(4)).unwrap(), 0);
        assert_eq!(count_hom(&cycle(4), &cycle(4)).unwrap(), 32);
        assert_eq!(count_aut(&cycle(4)).unwrap(), 8);
        assert_eq!(count_aut(&clique(3)).unwrap(), 6);
        assert_eq!(count_inj(&path(2), &clique(3)).unwrap(), 6);
        assert_eq!(count_surj(&path(3), &path(2)).unwrap(), 2);
        assert_eq!(count_onto(&path(4), &clique(3)).unwrap(), 6);
        assert_eq!(count_surj(&path(4), &clique(3)).unwrap(), 18);
        assert_eq!(count_onto(&path(4), &path(3)).unwrap(), 4);
        assert_eq!(count_onto(&cycle(4), &cycle(4)).unwrap(), 8);
        assert_eq!(count_sub(&clique(3), &clique(3)).unwrap(), 1);
        assert_eq!(count_sub(&path(2), &cycle(4)).unwrap(), 4);
        assert_eq!(count_sub(&path(3), &clique(3)).unwrap(), 3);
    }

    #[test]
    fn rooted_examples() {
        let p2 = RootedGraph::new(path(2), 0).unwrap();
        for v in 0..4 {
            let c4 = RootedGraph::new(cycle(4), v).unwrap();
            assert_eq!(count_hom_rooted(&p2, &c4).unwrap(), 2);
        }
        let g = RootedGraph::new(paw(), 3).unwrap();
        assert_eq!(count_hom_rooted(&RootedGraph::vertex(), &g).unwrap(), 1);
        let per_root = count_hom_rooted_all(&p2, &path(3), &CountOptions::default()).unwrap();
        let per_root: Vec<u64> = per_root.iter().map(|c| c.to_u64().unwrap()).collect();
        assert_eq!(per_root, vec![1, 2, 1]);
    }

    #[test]
    fn matches_brute_force_on_small_pairs() {
        let pats = [
            path(2),
            path(3),
            clique(3),
            cycle(4),
            paw(),
            star(3),
            Graph::empty(2),
            path(4),
        ];
        let hosts = [
            path(3),
            clique(3),
            cycle(4),
            cycle(5),
            paw(),
            clique(4),
            star(3),
            Graph::new(5, [(0, 1), (2, 3)]).unwrap(),
        ];
        for f in &pats {
            for g in &hosts {
                let (hom, inj, surj) = brute(f, g);
                assert_eq!(count_hom(f, g).unwrap(), hom, "hom {f:?} -> {g:?}");
                let unsplit = CountOptions {
                    split_components: false,
                    ..Default::default()
                };
                assert_eq!(count_hom_with(f, g, &unsplit).unwrap(), hom);
                assert_eq!(count_inj(f, g).unwrap(), inj, "inj {f:?} -> {g:?}");
                assert_eq!(count_surj(f, g).unwrap(), surj, "surj {f:?} -> {g:?}");
            }
        }
    }

    #[test]
    fn budget_is_a_resource_error() {
        let opts = CountOptions {
            budget: 10,
            ..Default::default()
        };
        let err = count_hom_with(&cycle(5), &clique(6), &opts).unwrap_err();
        assert!(matches!(err, Error::WorkLimit { budget: 10 }));
    }

    #[test]
    fn large_counts_do_not_overflow() {
        // 12 isolated pattern vertices into 3000 host vertices: 3000^12 > 2^128
        let f = Graph::empty(12);
        let g = Graph::empty(3000);
        let opts = CountOptions {
            split_components: false,
            ..Default::default()
        };
        let c = count_hom_with(&f, &g, &opts).unwrap();
        assert_eq!(c.value(), &BigUint::from(3000u32).pow(12));
    }

    #[test]
    fn empty_pattern_rejected() {
        assert!(count_hom(&Graph::empty(0), &path(2)).is_err());
    }
}
