//! Pattern-seeded colour refinement (F-WL).
//!
//! Every node starts with the vector of rooted homomorphism counts
//! `(hom(F_1^r, G^v), …, hom(F_k^r, G^v))`; each round then recolours a
//! node by its previous colour and the multiset of its neighbours' colours.
//! Signatures are interned in a [`ColorDictionary`] shared by every graph of
//! a run. Before features are emitted the dictionary is canonicalised (ids
//! re-assigned in lexicographic signature order) so coordinates do not
//! depend on the order in which graphs were processed.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::GraphDataset;
use crate::error::{Error, Result};
use crate::graph::{ego_graph, Graph};
use crate::hom::{count_hom_rooted_all, CountOptions};
use crate::pattern::PatternSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Signature {
    Initial(Vec<BigUint>),
    Refined(u32, Vec<u32>),
}

/// Injective map from colour signatures to ids, one table per iteration.
#[derive(Clone, Debug, Default)]
pub struct ColorDictionary {
    ids: Vec<HashMap<Signature, u32>>,
    signatures: Vec<Vec<Signature>>,
}

impl ColorDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, level: usize, sig: Signature) -> u32 {
        while self.ids.len() <= level {
            self.ids.push(HashMap::new());
            self.signatures.push(Vec::new());
        }
        let next = self.signatures[level].len() as u32;
        *self.ids[level].entry(sig.clone()).or_insert_with(|| {
            self.signatures[level].push(sig);
            next
        })
    }

    pub fn levels(&self) -> usize {
        self.signatures.len()
    }

    /// Number of distinct colours seen at `level`.
    pub fn level_size(&self, level: usize) -> usize {
        self.signatures.get(level).map_or(0, Vec::len)
    }

    /// For each level, the map from raw id to canonical id. Canonical ids
    /// order signatures lexicographically, with refined signatures compared
    /// after translating their components to canonical ids.
    pub fn canonical_map(&self) -> Vec<Vec<u32>> {
        let mut maps: Vec<Vec<u32>> = Vec::with_capacity(self.levels());
        for (level, sigs) in self.signatures.iter().enumerate() {
            let keys: Vec<(Vec<BigUint>, u32, Vec<u32>)> = sigs
                .iter()
                .map(|s| match s {
                    Signature::Initial(v) => (v.clone(), 0, Vec::new()),
                    Signature::Refined(prev, nb) => {
                        let below = &maps[level - 1];
                        let mut nb: Vec<u32> = nb.iter().map(|&c| below[c as usize]).collect();
                        nb.sort_unstable();
                        (Vec::new(), below[*prev as usize], nb)
                    }
                })
                .collect();
            let mut order: Vec<usize> = (0..sigs.len()).collect();
            order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
            let mut map = vec![0u32; sigs.len()];
            for (canon, &raw) in order.iter().enumerate() {
                map[raw] = canon as u32;
            }
            maps.push(map);
        }
        maps
    }
}

/// Raw colours of one graph, one vector per iteration `0..=depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub levels: Vec<Vec<u32>>,
}

/// Rooted homomorphism count vectors, one per node.
pub fn hom_signatures(
    g: &Graph,
    patterns: &PatternSet,
    opts: &CountOptions,
) -> Result<Vec<Vec<BigUint>>> {
    let mut sig = vec![Vec::with_capacity(patterns.len()); g.n()];
    for p in patterns.patterns() {
        let counts = count_hom_rooted_all(&p.as_rooted(), g, opts)?;
        for (v, c) in counts.into_iter().enumerate() {
            sig[v].push(c.into_inner());
        }
    }
    Ok(sig)
}

/// Iteration-0 colours: the rooted hom-count vector of each node, interned.
pub fn initial_colors(
    g: &Graph,
    patterns: &PatternSet,
    dict: &mut ColorDictionary,
) -> Result<Vec<u32>> {
    let sigs = hom_signatures(g, patterns, &CountOptions::default())?;
    Ok(intern_initial(sigs, dict))
}

fn intern_initial(sigs: Vec<Vec<BigUint>>, dict: &mut ColorDictionary) -> Vec<u32> {
    sigs.into_iter()
        .map(|s| dict.intern(0, Signature::Initial(s)))
        .collect()
}

/// One refinement round producing the colours of iteration `level`.
pub fn refine(g: &Graph, colors: &[u32], dict: &mut ColorDictionary, level: usize) -> Vec<u32> {
    (0..g.n())
        .map(|v| {
            let mut nb: Vec<u32> = g.neighbors(v).iter().map(|&w| colors[w]).collect();
            nb.sort_unstable();
            dict.intern(level, Signature::Refined(colors[v], nb))
        })
        .collect()
}

fn refine_from(g: &Graph, initial: Vec<u32>, depth: usize, dict: &mut ColorDictionary) -> Coloring {
    let mut levels = vec![initial];
    for level in 1..=depth {
        let next = refine(g, &levels[level - 1], dict, level);
        levels.push(next);
    }
    Coloring { levels }
}

pub fn color_graph(
    g: &Graph,
    patterns: &PatternSet,
    depth: usize,
    dict: &mut ColorDictionary,
) -> Result<Coloring> {
    let initial = initial_colors(g, patterns, dict)?;
    Ok(refine_from(g, initial, depth, dict))
}

/// Per-iteration colour counts over canonical colour ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorHistogram {
    /// `blocks[t]` lists `(colour, count)` pairs of iteration `t`, sorted by
    /// colour.
    pub blocks: Vec<Vec<(u32, u64)>>,
    /// Dictionary size of each iteration; fixes the dense layout.
    pub dims: Vec<usize>,
}

impl ColorHistogram {
    pub fn dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Iterations concatenated into one count vector.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        let mut offset = 0;
        for (block, &d) in self.blocks.iter().zip(&self.dims) {
            for &(c, k) in block {
                out[offset + c as usize] = k as f64;
            }
            offset += d;
        }
        out
    }
}

fn histogram(coloring: &Coloring, canon: &[Vec<u32>], dims: &[usize]) -> ColorHistogram {
    let blocks = coloring
        .levels
        .iter()
        .zip(canon)
        .map(|(colors, map)| {
            let mut counts: HashMap<u32, u64> = HashMap::new();
            for &c in colors {
                *counts.entry(map[c as usize]).or_default() += 1;
            }
            let mut block: Vec<(u32, u64)> = counts.into_iter().collect();
            block.sort_unstable();
            block
        })
        .collect();
    ColorHistogram {
        blocks,
        dims: dims.to_vec(),
    }
}

/// Per-node representation: for each iteration, the counts of the node's
/// neighbours' colours, concatenated.
fn neighbor_histograms(
    g: &Graph,
    coloring: &Coloring,
    canon: &[Vec<u32>],
    dims: &[usize],
) -> Vec<Vec<f64>> {
    let total: usize = dims.iter().sum();
    (0..g.n())
        .map(|v| {
            let mut row = vec![0.0; total];
            let mut offset = 0;
            for ((colors, map), &d) in coloring.levels.iter().zip(canon).zip(dims) {
                for &w in g.neighbors(v) {
                    row[offset + map[colors[w] as usize] as usize] += 1.0;
                }
                offset += d;
            }
            row
        })
        .collect()
}

/// A set of graphs coloured with one shared dictionary.
pub struct FwlRun {
    pub depth: usize,
    pub dict: ColorDictionary,
    pub colorings: Vec<Coloring>,
}

impl FwlRun {
    /// Colours all `graphs`. Rooted counts are computed in parallel; ids are
    /// interned in input order.
    pub fn new(
        graphs: &[&Graph],
        patterns: &PatternSet,
        depth: usize,
        opts: &CountOptions,
    ) -> Result<Self> {
        let sigs: Vec<Vec<Vec<BigUint>>> = graphs
            .par_iter()
            .map(|g| hom_signatures(g, patterns, opts))
            .collect::<Result<_>>()?;
        let mut dict = ColorDictionary::new();
        dict.intern_level_placeholder(depth);
        let colorings = graphs
            .iter()
            .zip(sigs)
            .map(|(g, s)| {
                let initial = intern_initial(s, &mut dict);
                refine_from(g, initial, depth, &mut dict)
            })
            .collect();
        Ok(FwlRun {
            depth,
            dict,
            colorings,
        })
    }

    fn dims(&self) -> Vec<usize> {
        (0..=self.depth).map(|t| self.dict.level_size(t)).collect()
    }

    pub fn histograms(&self) -> Vec<ColorHistogram> {
        let canon = self.dict.canonical_map();
        let dims = self.dims();
        self.colorings
            .iter()
            .map(|c| histogram(c, &canon, &dims))
            .collect()
    }

    /// Canonical colour ids of every node, per iteration.
    pub fn canonical_colorings(&self) -> Vec<Coloring> {
        let canon = self.dict.canonical_map();
        self.colorings
            .iter()
            .map(|c| Coloring {
                levels: c
                    .levels
                    .iter()
                    .zip(&canon)
                    .map(|(colors, map)| colors.iter().map(|&x| map[x as usize]).collect())
                    .collect(),
            })
            .collect()
    }

    pub fn node_representations(&self, graphs: &[&Graph]) -> Vec<Vec<Vec<f64>>> {
        let canon = self.dict.canonical_map();
        let dims = self.dims();
        graphs
            .iter()
            .zip(&self.colorings)
            .map(|(g, c)| neighbor_histograms(g, c, &canon, &dims))
            .collect()
    }
}

impl ColorDictionary {
    /// Makes sure tables for iterations `0..=depth` exist even when no
    /// graph reaches them (empty datasets).
    fn intern_level_placeholder(&mut self, depth: usize) {
        while self.ids.len() <= depth {
            self.ids.push(HashMap::new());
            self.signatures.push(Vec::new());
        }
    }
}

/// Histogram of a single graph with its own dictionary.
pub fn fwl_histograms(g: &Graph, patterns: &PatternSet, depth: usize) -> Result<ColorHistogram> {
    Ok(
        FwlRun::new(&[g], patterns, depth, &CountOptions::default())?
            .histograms()
            .remove(0),
    )
}

/// Per-node representations of a single graph with its own dictionary.
pub fn node_representations(
    g: &Graph,
    patterns: &PatternSet,
    depth: usize,
) -> Result<Vec<Vec<f64>>> {
    Ok(
        FwlRun::new(&[g], patterns, depth, &CountOptions::default())?
            .node_representations(&[g])
            .remove(0),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Graph,
    Node,
}

/// Where a feature row came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RowOrigin {
    pub graph: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureMatrix {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Option<usize>>,
    pub origin: Vec<RowOrigin>,
}

impl FeatureMatrix {
    /// Dense CSV: `graph,node,label,f0,f1,…`; empty cells for missing node
    /// or label.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("graph,node,label");
        for i in 0..self.dim {
            let _ = write!(out, ",f{i}");
        }
        out.push('\n');
        for ((row, label), o) in self.rows.iter().zip(&self.labels).zip(&self.origin) {
            let _ = write!(out, "{},", o.graph);
            if let Some(n) = o.node {
                let _ = write!(out, "{n}");
            }
            out.push(',');
            if let Some(l) = label {
                let _ = write!(out, "{l}");
            }
            for x in row {
                let _ = write!(out, ",{x}");
            }
            out.push('\n');
        }
        out
    }

    /// Sparse JSON: `{"dim":d,"rows":[{"idx":[…],"val":[…]},…]}` plus
    /// labels.
    pub fn to_sparse_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let (idx, val): (Vec<usize>, Vec<f64>) = r
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0.0)
                    .map(|(i, &x)| (i, x))
                    .unzip();
                serde_json::json!({ "idx": idx, "val": val })
            })
            .collect();
        serde_json::json!({ "dim": self.dim, "rows": rows, "labels": self.labels, "origin": self.origin })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FeaturizeOptions {
    pub depth: usize,
    pub level: Level,
    /// Node level only: refine each node's depth-hop ego-graph instead of
    /// the whole graph.
    pub ego: bool,
}

/// Feature rows for the graphs `indices` of `ds` (graph level), or for
/// every node of those graphs (node level). One dictionary is shared by
/// all rows.
pub fn featurize(
    ds: &GraphDataset,
    indices: &[usize],
    patterns: &PatternSet,
    opts: FeaturizeOptions,
) -> Result<FeatureMatrix> {
    let count = CountOptions::default();
    for &i in indices {
        if i >= ds.len() {
            return Err(Error::InvalidArgument(format!(
                "graph index {i} out of range"
            )));
        }
    }
    match (opts.level, opts.ego) {
        (Level::Graph, _) => {
            let graphs: Vec<&Graph> = indices.iter().map(|&i| &ds.graphs[i].graph).collect();
            let run = FwlRun::new(&graphs, patterns, opts.depth, &count)?;
            let rows: Vec<Vec<f64>> = run
                .histograms()
                .iter()
                .map(ColorHistogram::to_dense)
                .collect();
            Ok(FeatureMatrix {
                dim: run.dims().iter().sum(),
                labels: indices.iter().map(|&i| ds.graphs[i].label).collect(),
                origin: indices
                    .iter()
                    .map(|&i| RowOrigin {
                        graph: i,
                        node: None,
                    })
                    .collect(),
                rows,
            })
        }
        (Level::Node, false) => {
            let graphs: Vec<&Graph> = indices.iter().map(|&i| &ds.graphs[i].graph).collect();
            let run = FwlRun::new(&graphs, patterns, opts.depth, &count)?;
            let reps = run.node_representations(&graphs);
            let mut m = FeatureMatrix {
                dim: run.dims().iter().sum(),
                rows: vec![],
                labels: vec![],
                origin: vec![],
            };
            for (&i, node_rows) in indices.iter().zip(reps) {
                for (v, row) in node_rows.into_iter().enumerate() {
                    m.rows.push(row);
                    m.labels
                        .push(ds.graphs[i].node_labels.as_ref().map(|l| l[v]));
                    m.origin.push(RowOrigin {
                        graph: i,
                        node: Some(v),
                    });
                }
            }
            Ok(m)
        }
        (Level::Node, true) => {
            let mut egos = Vec::new();
            let mut origin = Vec::new();
            let mut labels = Vec::new();
            for &i in indices {
                let g = &ds.graphs[i].graph;
                for v in 0..g.n() {
                    egos.push(ego_graph(g, v, opts.depth));
                    origin.push(RowOrigin {
                        graph: i,
                        node: Some(v),
                    });
                    labels.push(ds.graphs[i].node_labels.as_ref().map(|l| l[v]));
                }
            }
            let graphs: Vec<&Graph> = egos.iter().map(|e| &e.graph).collect();
            let run = FwlRun::new(&graphs, patterns, opts.depth, &count)?;
            let rows = run
                .node_representations(&graphs)
                .into_iter()
                .zip(&egos)
                .map(|(mut reps, e)| reps.swap_remove(e.root))
                .collect();
            Ok(FeatureMatrix {
                dim: run.dims().iter().sum(),
                rows,
                labels,
                origin,
            })
        }
    }
}
