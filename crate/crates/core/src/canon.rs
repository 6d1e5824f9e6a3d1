//! Canonical labels for small graphs.
//!
//! Colour refinement produces an isomorphism-invariant ordered partition;
//! an individualise-and-refine search then explores every way of breaking
//! the remaining ties and keeps the smallest adjacency encoding. Twin
//! vertices (same neighbourhood up to each other) are interchangeable by an
//! automorphism, so only one of them is individualised per cell.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Graph, RootedGraph};

/// Default vertex cap for exhaustive canonical labelling.
pub const DEFAULT_CANON_CAP: usize = 10;

/// Opaque byte string; equal labels iff isomorphic inputs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalLabel(Vec<u8>);

impl CanonicalLabel {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for CanonicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

pub fn canonical_form(g: &Graph) -> Result<CanonicalLabel> {
    canonical_form_with_cap(g, DEFAULT_CANON_CAP)
}

pub fn canonical_form_with_cap(g: &Graph, cap: usize) -> Result<CanonicalLabel> {
    canonical_form_colored(g, &vec![0; g.n()], cap)
}

/// Canonical label of a rooted graph: the root is a distinguished colour.
pub fn rooted_canonical_form(g: &RootedGraph, cap: usize) -> Result<CanonicalLabel> {
    let mut colors = vec![0; g.n()];
    colors[g.root] = 1;
    canonical_form_colored(&g.graph, &colors, cap)
}

pub fn is_isomorphic(a: &Graph, b: &Graph) -> Result<bool> {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let cap = a.n().max(DEFAULT_CANON_CAP);
    Ok(canonical_form_with_cap(a, cap)? == canonical_form_with_cap(b, cap)?)
}

/// Canonical label of a vertex-coloured graph. Colours are compared by value
/// and must themselves be isomorphism-invariant.
pub fn canonical_form_colored(g: &Graph, colors: &[u32], cap: usize) -> Result<CanonicalLabel> {
    let n = g.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    assert_eq!(colors.len(), n);
    let start = refine(g, &rank(colors));
    let mut search = Search {
        g,
        colors,
        best: None,
    };
    search.descend(start);
    Ok(search
        .best
        .unwrap_or_else(|| CanonicalLabel(encode_header(n, colors, &[]))))
}

struct Search<'a> {
    g: &'a Graph,
    colors: &'a [u32],
    best: Option<CanonicalLabel>,
}

impl Search<'_> {
    fn descend(&mut self, part: Vec<u32>) {
        let n = self.g.n();
        let mut sizes = vec![0usize; n];
        for &c in &part {
            sizes[c as usize] += 1;
        }
        let Some(target) = (0..n).find(|&c| sizes[c] > 1) else {
            let label = self.leaf_label(&part);
            if self.best.as_ref().is_none_or(|b| label < *b) {
                self.best = Some(label);
            }
            return;
        };
        let cell: Vec<usize> = (0..n).filter(|&v| part[v] as usize == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if tried.iter().any(|&w| self.twins(v, w)) {
                continue;
            }
            tried.push(v);
            let mut next: Vec<u32> = part.iter().map(|&c| 2 * c).collect();
            next[v] += 1;
            self.descend(refine(self.g, &rank(&next)));
        }
    }

    fn twins(&self, u: usize, w: usize) -> bool {
        let nu = self.g.neighbors(u).iter().filter(|&&x| x != w);
        let nw = self.g.neighbors(w).iter().filter(|&&x| x != u);
        nu.eq(nw)
    }

    fn leaf_label(&self, part: &[u32]) -> CanonicalLabel {
        let n = self.g.n();
        let mut vertex_at = vec![0; n];
        for (v, &c) in part.iter().enumerate() {
            vertex_at[c as usize] = v;
        }
        let ordered_colors: Vec<u32> = vertex_at.iter().map(|&v| self.colors[v]).collect();
        let mut bits = vec![0u8; (n * n.saturating_sub(1) / 2).div_ceil(8)];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.g.has_edge(vertex_at[i], vertex_at[j]) {
                    bits[k / 8] |= 0x80 >> (k % 8);
                }
                k += 1;
            }
        }
        CanonicalLabel(encode_header(n, &ordered_colors, &bits))
    }
}

fn encode_header(n: usize, colors: &[u32], bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 4 * colors.len() + bits.len());
    out.extend_from_slice(&(n as u32).to_be_bytes());
    for c in colors {
        out.extend_from_slice(&c.to_be_bytes());
    }
    out.extend_from_slice(bits);
    out
}

/// Replaces each value by its rank among the distinct values.
fn rank(values: &[u32]) -> Vec<u32> {
    let mut distinct = values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    values
        .iter()
        .map(|v| distinct.binary_search(v).unwrap() as u32)
        .collect()
}

/// Isomorphism-invariant colour refinement to the coarsest equitable
/// partition refining `colors`. Output colours are dense ranks.
pub(crate) fn refine(g: &Graph, colors: &[u32]) -> Vec<u32> {
    let n = g.n();
    let mut current = colors.to_vec();
    let mut classes = count_classes(&current);
    loop {
        let sigs: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = g.neighbors(v).iter().map(|&w| current[w]).collect();
                nb.sort_unstable();
                (current[v], nb)
            })
            .collect();
        let mut distinct: Vec<&(u32, Vec<u32>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let next: Vec<u32> = sigs
            .iter()
            .map(|s| distinct.binary_search(&s).unwrap() as u32)
            .collect();
        let next_classes = distinct.len();
        current = next;
        if next_classes == classes {
            return current;
        }
        classes = next_classes;
    }
}

fn count_classes(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{clique, cycle, path, paw, star};

    fn all_graphs(n: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        (0u32..1 << pairs.len())
            .map(|mask| {
                let edges = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e);
                Graph::new(n, edges).unwrap()
            })
            .collect()
    }

    #[test]
    fn relabelled_path_matches() {
        let p3 = path(3);
        let q = Graph::new(3, [(0, 2), (2, 1)]).unwrap();
        assert_eq!(canonical_form(&p3).unwrap(), canonical_form(&q).unwrap());
        assert_ne!(
            canonical_form(&clique(3)).unwrap(),
            canonical_form(&p3).unwrap()
        );
    }

    #[test]
    fn eleven_graphs_on_four_vertices() {
        let mut labels: Vec<_> = all_graphs(4)
            .iter()
            .map(|g| canonical_form(g).unwrap())
            .collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 11);
    }

    #[test]
    fn thirty_four_graphs_on_five_vertices() {
        let mut labels: Vec<_> = all_graphs(5)
            .iter()
            .map(|g| canonical_form(g).unwrap())
            .collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 34);
    }

    #[test]
    fn rooted_forms_distinguish_roots() {
        let p3 = path(3);
        let end = rooted_canonical_form(&RootedGraph::new(p3.clone(), 0).unwrap(), 10).unwrap();
        let other_end =
            rooted_canonical_form(&RootedGraph::new(p3.clone(), 2).unwrap(), 10).unwrap();
        let mid = rooted_canonical_form(&RootedGraph::new(p3, 1).unwrap(), 10).unwrap();
        assert_eq!(end, other_end);
        assert_ne!(end, mid);
    }

    #[test]
    fn symmetric_graphs_at_the_cap() {
        assert!(is_isomorphic(&clique(10), &clique(10)).unwrap());
        assert!(is_isomorphic(
            &cycle(10),
            &cycle(10).permute(&[3, 1, 4, 0, 5, 9, 2, 6, 8, 7])
        )
        .unwrap());
        assert!(!is_isomorphic(
            &cycle(6),
            &crate::graph::disjoint_union(&clique(3), &clique(3))
        )
        .unwrap());
        assert!(matches!(
            canonical_form(&Graph::empty(11)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn paw_and_star() {
        assert!(!is_isomorphic(&paw(), &star(3)).unwrap());
        let p = paw().permute(&[3, 2, 1, 0]);
        assert!(is_isomorphic(&paw(), &p).unwrap());
    }
}
