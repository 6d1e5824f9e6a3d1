//! Simple undirected graphs, rooted graphs and the composition operations
//! used to build patterns (disjoint union, rooted join, ego-graphs).

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

/// A simple undirected graph on the vertices `0..n`.
///
/// Adjacency lists are kept sorted; the edge list stores each edge once as
/// `(u, v)` with `u < v`, in lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.n, raw.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and endpoints
    /// outside `0..n`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Invariant(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::Invariant(format!("self-loop on vertex {u}")));
            }
            if adj[u].contains(&v) {
                return Err(Error::Invariant(format!("duplicate edge {{{u}, {v}}}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Self::from_adjacency(adj))
    }

    /// Builds a graph from an edge list that may contain repeated pairs in
    /// either orientation; repeats collapse into one edge.
    pub(crate) fn from_edges_dedup(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            debug_assert!(u < n && v < n && u != v);
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_adjacency(adj)
    }

    fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        let mut edges = Vec::new();
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            edges.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        Graph {
            n: adj.len(),
            adj,
            edges,
        }
    }

    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n, "permutation length must equal n");
        Graph::from_edges_dedup(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Subgraph induced by `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Graph::from_edges_dedup(vertices.len(), edges)
    }

    /// Breadth-first distances from `source`; unreachable vertices get `None`.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Largest eccentricity over all vertices; `None` if disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for v in 0..self.n {
            for d in self.distances_from(v) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// Serializes to the edge-list text format read by [`parse_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// A graph with a distinguished root vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootedGraph {
    pub graph: Graph,
    pub root: usize,
}

impl RootedGraph {
    pub fn new(graph: Graph, root: usize) -> Result<Self> {
        if root >= graph.n() {
            return Err(Error::Invariant(format!(
                "root {root} out of range for n = {}",
                graph.n()
            )));
        }
        Ok(RootedGraph { graph, root })
    }

    /// The single rooted vertex, the identity for [`join_rooted`].
    pub fn vertex() -> Self {
        RootedGraph {
            graph: Graph::empty(1),
            root: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Largest distance from the root; `None` if some vertex is unreachable.
    pub fn depth(&self) -> Option<usize> {
        self.graph
            .distances_from(self.root)
            .into_iter()
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternKind {
    Path,
    Cycle,
    Clique,
}

/// `P_n`, `C_n` or `K_n`. Paths are counted in vertices, so `path(2)` is a
/// single edge.
pub fn make_named_pattern(kind: PatternKind, n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "pattern needs at least one vertex".into(),
        ));
    }
    let edges: Vec<(usize, usize)> = match kind {
        PatternKind::Path => (1..n).map(|i| (i - 1, i)).collect(),
        PatternKind::Cycle => {
            if n < 3 {
                return Err(Error::InvalidArgument(format!(
                    "cycle needs n >= 3, got {n}"
                )));
            }
            (0..n).map(|i| (i, (i + 1) % n)).collect()
        }
        PatternKind::Clique => (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect(),
    };
    Graph::new(n, edges)
}

pub fn path(n: usize) -> Graph {
    make_named_pattern(PatternKind::Path, n).expect("path with n >= 1")
}

pub fn cycle(n: usize) -> Graph {
    make_named_pattern(PatternKind::Cycle, n).expect("cycle with n >= 3")
}

pub fn clique(n: usize) -> Graph {
    make_named_pattern(PatternKind::Clique, n).expect("clique with n >= 1")
}

/// Triangle `{0,1,2}` with a pendant vertex `3` attached to `2`.
pub fn paw() -> Graph {
    Graph::new(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap()
}

/// Star with `leaves` leaves; the centre is vertex 0.
pub fn star(leaves: usize) -> Graph {
    Graph::new(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
}

/// Resolves names such as `P3`, `C4`, `K3`, `S2`, `PAW`, `vertex`, `E2`
/// (edgeless on two vertices).
pub fn pattern_by_name(name: &str) -> Result<Graph> {
    let upper = name.trim().to_ascii_uppercase();
    match upper.as_str() {
        "VERTEX" | "V" | "K1" | "P1" => return Ok(Graph::empty(1)),
        "PAW" => return Ok(paw()),
        "EDGE" => return Ok(path(2)),
        _ => {}
    }
    let bad = || Error::InvalidArgument(format!("unknown pattern name '{name}'"));
    let (prefix, digits) = upper.split_at(1);
    let size: usize = digits.parse().map_err(|_| bad())?;
    match prefix {
        "P" => make_named_pattern(PatternKind::Path, size),
        "C" => make_named_pattern(PatternKind::Cycle, size),
        "K" => make_named_pattern(PatternKind::Clique, size),
        "S" => Ok(star(size)),
        "E" if size >= 1 => Ok(Graph::empty(size)),
        _ => Err(bad()),
    }
}

/// Gluing product: `b`'s vertices are shifted by `a.n()`.
pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let shift = a.n();
    let edges = a
        .edges()
        .iter()
        .copied()
        .chain(b.edges().iter().map(|&(u, v)| (u + shift, v + shift)));
    Graph::from_edges_dedup(a.n() + b.n(), edges)
}

/// Joins `b` into `a` by identifying `b.root` with vertex `at` of `a`.
///
/// `b`'s other vertices are appended after `a`'s, in their original order.
pub fn join_at(a: &Graph, at: usize, b: &RootedGraph) -> Graph {
    let mut map = vec![0; b.n()];
    let mut next = a.n();
    for (v, slot) in map.iter_mut().enumerate() {
        if v == b.root {
            *slot = at;
        } else {
            *slot = next;
            next += 1;
        }
    }
    let edges = a
        .edges()
        .iter()
        .copied()
        .chain(b.graph.edges().iter().map(|&(u, v)| (map[u], map[v])));
    Graph::from_edges_dedup(next, edges)
}

/// Rooted join: disjoint union with `b.root` merged into `a.root`, which
/// stays the root.
pub fn join_rooted(a: &RootedGraph, b: &RootedGraph) -> RootedGraph {
    RootedGraph {
        graph: join_at(&a.graph, a.root, b),
        root: a.root,
    }
}

/// Induced subgraph on the vertices within `radius` hops of `v`, rooted at
/// the image of `v` (always vertex 0).
pub fn ego_graph(g: &Graph, v: usize, radius: usize) -> RootedGraph {
    let dist = g.distances_from(v);
    let mut vertices: Vec<usize> = (0..g.n())
        .filter(|&u| matches!(dist[u], Some(d) if d <= radius))
        .collect();
    // the root first, remaining vertices by (distance, id)
    vertices.sort_by_key(|&u| (dist[u], u));
    RootedGraph {
        graph: g.induced(&vertices),
        root: 0,
    }
}

/// Parses the edge-list format: first significant line is `n`, each further
/// non-empty line is `u v`. Lines starting with `#` are comments.
pub fn parse_edge_list(text: &str) -> std::result::Result<Graph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (first, header) = lines.next().ok_or(ParseError::Syntax {
        line: 1,
        msg: "missing vertex count".into(),
    })?;
    let n: usize = header.parse().map_err(|_| ParseError::Syntax {
        line: first,
        msg: format!("expected vertex count, found '{header}'"),
    })?;
    let mut adj = vec![Vec::new(); n];
    for (line, l) in lines {
        let mut parts = l.split_whitespace();
        let mut endpoint = || -> std::result::Result<usize, ParseError> {
            let tok = parts.next().ok_or(ParseError::Syntax {
                line,
                msg: "expected two endpoints".into(),
            })?;
            let v: usize = tok.parse().map_err(|_| ParseError::Syntax {
                line,
                msg: format!("bad vertex '{tok}'"),
            })?;
            if v >= n {
                return Err(ParseError::VertexOutOfRange { line, v, n });
            }
            Ok(v)
        };
        let u = endpoint()?;
        let v = endpoint()?;
        if parts.next().is_some() {
            return Err(ParseError::Syntax {
                line,
                msg: "trailing tokens".into(),
            });
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, v });
        }
        if adj[u].contains(&v) {
            return Err(ParseError::DuplicateEdge { line, u, v });
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    Ok(Graph::from_adjacency(adj))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_patterns() {
        let p2 = make_named_pattern(PatternKind::Path, 2).unwrap();
        assert_eq!((p2.n(), p2.edge_count()), (2, 1));
        let c4 = make_named_pattern(PatternKind::Cycle, 4).unwrap();
        assert_eq!((c4.n(), c4.edge_count()), (4, 4));
        assert!((0..4).all(|v| c4.degree(v) == 2));
        let k3 = make_named_pattern(PatternKind::Clique, 3).unwrap();
        assert_eq!(k3.edge_count(), 3);
        assert!(matches!(
            make_named_pattern(PatternKind::Cycle, 2),
            Err(Error::InvalidArgument(_))
        ));
        assert_eq!(pattern_by_name("paw").unwrap(), paw());
        assert_eq!(pattern_by_name("vertex").unwrap().n(), 1);
        assert!(pattern_by_name("Q7").is_err());
    }

    #[test]
    fn union_examples() {
        let u = disjoint_union(&path(2), &path(2));
        assert_eq!((u.n(), u.edge_count(), u.components().len()), (4, 2, 2));
        let u = disjoint_union(&path(3), &path(2));
        assert_eq!((u.n(), u.edge_count()), (5, 3));
        let u = disjoint_union(&clique(3), &Graph::empty(1));
        assert_eq!((u.n(), u.edge_count()), (4, 3));
    }

    #[test]
    fn join_examples() {
        let k3 = RootedGraph::new(clique(3), 0).unwrap();
        let cherry = RootedGraph::new(star(2), 0).unwrap();
        let j = join_rooted(&k3, &cherry);
        assert_eq!((j.n(), j.graph.edge_count(), j.root), (5, 5, 0));
        assert_eq!(j.graph.degree(0), 4);

        let j = join_rooted(&RootedGraph::vertex(), &k3);
        assert_eq!(j.graph, k3.graph);

        let p2 = RootedGraph::new(path(2), 0).unwrap();
        let j = join_rooted(&p2, &p2);
        assert_eq!(j.graph.edges(), &[(0, 1), (0, 2)]);
        assert_eq!(j.root, 0);
    }

    #[test]
    fn ego_examples() {
        let c4 = cycle(4);
        let e = ego_graph(&c4, 2, 0);
        assert_eq!((e.n(), e.root), (1, 0));
        let e = ego_graph(&c4, 0, 1);
        assert_eq!(e.n(), 3);
        assert_eq!(e.graph.edge_count(), 2);
        assert_eq!(e.graph.degree(e.root), 2);
        let e = ego_graph(&clique(3), 1, 1);
        assert_eq!(e.graph, clique(3));
    }

    #[test]
    fn edge_list_parsing() {
        let g = parse_edge_list("3\n0 1\n1 2\n").unwrap();
        assert_eq!(g, path(3));
        assert!(matches!(
            parse_edge_list("2\n0 1\n0 1\n"),
            Err(ParseError::DuplicateEdge { line: 3, .. })
        ));
        assert!(matches!(
            parse_edge_list("2\n0 0\n"),
            Err(ParseError::SelfLoop { .. })
        ));
        assert!(matches!(
            parse_edge_list("2\n0 5\n"),
            Err(ParseError::VertexOutOfRange { .. })
        ));
        let g = parse_edge_list("# comment\n4\n\n0 1\n# more\n2 1\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn isolated_vertices_survive_round_trip() {
        let g = Graph::new(5, [(0, 3)]).unwrap();
        assert_eq!(parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn graph_json_shape() {
        let json = serde_json::to_string(&path(3)).unwrap();
        assert_eq!(json, r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        let bad: std::result::Result<Graph, _> = serde_json::from_str(r#"{"n":2,"edges":[[0,0]]}"#);
        assert!(bad.is_err());
    }
}
