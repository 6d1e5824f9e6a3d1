//! Backbones and F-pattern trees.
//!
//! A pattern tree is a rooted backbone tree with copies of rooted patterns
//! joined (root-merged) at its vertices. The family of all pattern trees of
//! bounded depth is infinite, so enumeration is truncated by the total
//! vertex count.

use std::collections::HashSet;

use serde::Serialize;

use crate::canon::{rooted_canonical_form, CanonicalLabel, DEFAULT_CANON_CAP};
use crate::error::Result;
use crate::graph::{join_at, Graph, RootedGraph};
use crate::hom::{count_hom, HomCount};
use crate::pattern::PatternSet;

/// Default total-vertex budget for pattern-tree enumeration.
pub const DEFAULT_TREE_BUDGET: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Tree {
    /// AHU encoding, e.g. `(()())` for a root with two leaves.
    code: String,
    size: usize,
    depth: usize,
    children: Vec<Tree>,
}

impl Tree {
    fn leaf() -> Self {
        Tree {
            code: "()".into(),
            size: 1,
            depth: 0,
            children: Vec::new(),
        }
    }

    fn with_children(children: Vec<Tree>) -> Self {
        let mut code = String::from("(");
        for c in &children {
            code.push_str(&c.code);
        }
        code.push(')');
        Tree {
            code,
            size: 1 + children.iter().map(|c| c.size).sum::<usize>(),
            depth: children.iter().map(|c| c.depth + 1).max().unwrap_or(0),
            children,
        }
    }

    /// Pre-order numbering; the root is vertex 0.
    fn to_rooted(&self) -> RootedGraph {
        fn walk(t: &Tree, me: usize, next: &mut usize, edges: &mut Vec<(usize, usize)>) {
            for c in &t.children {
                let id = *next;
                *next += 1;
                edges.push((me, id));
                walk(c, id, next, edges);
            }
        }
        let mut edges = Vec::new();
        let mut next = 1;
        walk(self, 0, &mut next, &mut edges);
        RootedGraph {
            graph: Graph::new(self.size, edges).expect("tree edges are simple"),
            root: 0,
        }
    }
}

/// All rooted trees with depth at most `max_depth` and at most
/// `max_nodes` vertices, up to rooted isomorphism, ordered by size and then
/// by AHU code.
pub fn enumerate_backbones(max_depth: usize, max_nodes: usize) -> Vec<RootedGraph> {
    all_trees(max_depth, max_nodes)
        .iter()
        .map(Tree::to_rooted)
        .collect()
}

fn all_trees(max_depth: usize, max_nodes: usize) -> Vec<Tree> {
    if max_nodes == 0 {
        return Vec::new();
    }
    if max_depth == 0 {
        return vec![Tree::leaf()];
    }
    // children are trees of depth < max_depth; a root's children use at
    // most max_nodes - 1 vertices in total
    let pool = all_trees(max_depth - 1, max_nodes - 1);
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    multisets(&pool, 0, max_nodes - 1, &mut chosen, &mut out);
    out.sort_by(|a, b| (a.size, &a.code).cmp(&(b.size, &b.code)));
    out
}

/// Every multiset of `pool` members (non-decreasing indices) with total
/// size at most `room`.
fn multisets(
    pool: &[Tree],
    from: usize,
    room: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Tree>,
) {
    let mut children: Vec<Tree> = chosen.iter().map(|&i| pool[i].clone()).collect();
    children.sort_by(|a, b| a.code.cmp(&b.code));
    out.push(Tree::with_children(children));
    for i in from..pool.len() {
        if pool[i].size <= room {
            chosen.push(i);
            multisets(pool, i, room - pool[i].size, chosen, out);
            chosen.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attachment {
    /// Backbone vertex the copies are joined at.
    pub vertex: usize,
    /// Index into the pattern set.
    pub pattern: usize,
    pub copies: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PatternTree {
    pub tree: RootedGraph,
    pub backbone: RootedGraph,
    pub attachments: Vec<Attachment>,
    #[serde(skip)]
    pub label: CanonicalLabel,
}

impl PatternTree {
    /// Rebuilds the tree from its backbone and attachment record.
    pub fn reconstruct(&self, patterns: &PatternSet) -> RootedGraph {
        let mut g = self.backbone.graph.clone();
        for a in &self.attachments {
            let p = patterns.patterns()[a.pattern].as_rooted();
            for _ in 0..a.copies {
                g = join_at(&g, a.vertex, &p);
            }
        }
        RootedGraph {
            graph: g,
            root: self.backbone.root,
        }
    }
}

/// Pattern trees over backbones of depth at most `max_depth` with at most
/// `max_nodes` vertices in total, deduplicated by rooted isomorphism. Bare
/// backbones are included. Single-vertex patterns join as the identity and
/// contribute no attachments.
pub fn enumerate_pattern_trees(
    patterns: &PatternSet,
    max_depth: usize,
    max_nodes: usize,
) -> Result<Vec<PatternTree>> {
    let cap = max_nodes.max(DEFAULT_CANON_CAP);
    let rooted: Vec<RootedGraph> = patterns.patterns().iter().map(|p| p.as_rooted()).collect();
    let mut seen: HashSet<CanonicalLabel> = HashSet::new();
    let mut out = Vec::new();
    for backbone in enumerate_backbones(max_depth, max_nodes) {
        let room = max_nodes - backbone.n();
        let mut plans = Vec::new();
        attachment_plans(
            &rooted,
            backbone.n(),
            0,
            0,
            room,
            &mut Vec::new(),
            &mut plans,
        );
        for attachments in plans {
            let mut g = backbone.graph.clone();
            for a in &attachments {
                for _ in 0..a.copies {
                    g = join_at(&g, a.vertex, &rooted[a.pattern]);
                }
            }
            let tree = RootedGraph {
                graph: g,
                root: backbone.root,
            };
            let label = rooted_canonical_form(&tree, cap)?;
            if seen.insert(label.clone()) {
                out.push(PatternTree {
                    tree,
                    backbone: backbone.clone(),
                    attachments,
                    label,
                });
            }
        }
    }
    out.sort_by(|a, b| (a.tree.n(), &a.label).cmp(&(b.tree.n(), &b.label)));
    Ok(out)
}

/// Enumerates attachment records: for each backbone vertex in order and
/// each pattern in order, a copy count, keeping the added vertices within
/// `room`.
fn attachment_plans(
    patterns: &[RootedGraph],
    backbone_n: usize,
    vertex: usize,
    pattern: usize,
    room: usize,
    current: &mut Vec<Attachment>,
    out: &mut Vec<Vec<Attachment>>,
) {
    if vertex == backbone_n {
        out.push(current.clone());
        return;
    }
    if pattern == patterns.len() {
        attachment_plans(patterns, backbone_n, vertex + 1, 0, room, current, out);
        return;
    }
    let extra = patterns[pattern].n() - 1;
    let max_copies = room.checked_div(extra).unwrap_or(0);
    for copies in 0..=max_copies {
        if copies > 0 {
            current.push(Attachment {
                vertex,
                pattern,
                copies,
            });
        }
        attachment_plans(
            patterns,
            backbone_n,
            vertex,
            pattern + 1,
            room - copies * extra,
            current,
            out,
        );
        if copies > 0 {
            current.pop();
        }
    }
}

/// `hom(T, g)` for each enumerated tree, ignoring roots.
pub fn tree_hom_vector(trees: &[PatternTree], g: &Graph) -> Result<Vec<HomCount>> {
    trees.iter().map(|t| count_hom(&t.tree.graph, g)).collect()
}
