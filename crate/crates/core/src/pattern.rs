//! Ordered, isomorphism-free sets of (optionally rooted) patterns.

use serde::Serialize;

use crate::canon::{
    canonical_form_with_cap, rooted_canonical_form, CanonicalLabel, DEFAULT_CANON_CAP,
};
use crate::error::{Error, Result};
use crate::graph::{pattern_by_name, Graph, RootedGraph};

#[derive(Clone, Debug, Serialize)]
pub struct Pattern {
    pub name: String,
    pub graph: Graph,
    /// Explicit root; unrooted patterns use vertex 0 wherever a root is
    /// needed.
    pub root: Option<usize>,
}

impl Pattern {
    pub fn new(name: impl Into<String>, graph: Graph) -> Self {
        Pattern {
            name: name.into(),
            graph,
            root: None,
        }
    }

    pub fn rooted(name: impl Into<String>, graph: RootedGraph) -> Self {
        Pattern {
            name: name.into(),
            root: Some(graph.root),
            graph: graph.graph,
        }
    }

    /// Named pattern such as `P3`, `K3`, `C4`, `PAW` or `vertex`.
    pub fn named(name: &str) -> Result<Self> {
        Ok(Pattern::new(name, pattern_by_name(name)?))
    }

    /// The pattern with its explicit root, or rooted at vertex 0.
    pub fn as_rooted(&self) -> RootedGraph {
        RootedGraph {
            graph: self.graph.clone(),
            root: self.root.unwrap_or(0),
        }
    }

    fn label(&self, cap: usize) -> Result<CanonicalLabel> {
        match self.root {
            Some(r) => rooted_canonical_form(
                &RootedGraph {
                    graph: self.graph.clone(),
                    root: r,
                },
                cap,
            ),
            None => canonical_form_with_cap(&self.graph, cap),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PatternSet {
    patterns: Vec<Pattern>,
    pub name: Option<String>,
}

impl PatternSet {
    /// Rejects empty sets, empty graphs and isomorphic duplicates.
    pub fn new(patterns: Vec<Pattern>) -> Result<Self> {
        Self::with_cap(patterns, DEFAULT_CANON_CAP)
    }

    pub fn with_cap(patterns: Vec<Pattern>, cap: usize) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::Invariant("pattern set must be nonempty".into()));
        }
        let mut labels: Vec<CanonicalLabel> = Vec::with_capacity(patterns.len());
        for p in &patterns {
            if p.graph.n() == 0 {
                return Err(Error::Invariant(format!(
                    "pattern '{}' has no vertices",
                    p.name
                )));
            }
            let label = p.label(cap)?;
            if let Some(i) = labels.iter().position(|l| *l == label) {
                return Err(Error::Invariant(format!(
                    "patterns '{}' and '{}' are isomorphic",
                    patterns[i].name, p.name
                )));
            }
            labels.push(label);
        }
        Ok(PatternSet {
            patterns,
            name: None,
        })
    }

    /// Comma-separated names, e.g. `"vertex,K3,C4"`.
    pub fn from_names(list: &str) -> Result<Self> {
        let patterns = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Pattern::named)
            .collect::<Result<Vec<_>>>()?;
        let mut set = Self::new(patterns)?;
        set.name = Some(list.to_string());
        Ok(set)
    }

    /// `{single vertex}`; its F-WL refinement is plain 1-WL.
    pub fn vertex() -> Self {
        PatternSet {
            patterns: vec![Pattern::new("vertex", Graph::empty(1))],
            name: Some("vertex".into()),
        }
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.patterns.iter().map(|p| p.name.clone()).collect()
    }

    pub fn max_pattern_size(&self) -> usize {
        self.patterns.iter().map(|p| p.graph.n()).max().unwrap_or(0)
    }
}
