//! Labelled graph datasets: TU-format ingestion and the JSON interchange
//! format.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledGraph {
    #[serde(flatten)]
    pub graph: Graph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_labels: Option<Vec<usize>>,
}

/// Train/test partition of graph indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDataset {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub graphs: Vec<LabeledGraph>,
    /// Number of graph classes (or node classes when no graph labels exist).
    pub num_classes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_node_classes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

impl GraphDataset {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn node_classes(&self) -> usize {
        self.num_node_classes.unwrap_or(self.num_classes)
    }

    /// Training graph indices; every graph when no split is recorded.
    pub fn train_indices(&self) -> Vec<usize> {
        match &self.split {
            Some(s) => s.train.clone(),
            None => (0..self.graphs.len()).collect(),
        }
    }

    pub fn has_graph_labels(&self) -> bool {
        !self.graphs.is_empty() && self.graphs.iter().all(|g| g.label.is_some())
    }

    pub fn has_node_labels(&self) -> bool {
        !self.graphs.is_empty() && self.graphs.iter().all(|g| g.node_labels.is_some())
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_classes == 0 {
            return Err(Error::Invariant("dataset needs at least one class".into()));
        }
        let kn = self.node_classes();
        for (i, g) in self.graphs.iter().enumerate() {
            if let Some(l) = g.label {
                if l >= self.num_classes {
                    return Err(Error::Invariant(format!(
                        "graph {i}: label {l} >= K = {}",
                        self.num_classes
                    )));
                }
            }
            if let Some(nl) = &g.node_labels {
                if nl.len() != g.graph.n() {
                    return Err(Error::Invariant(format!(
                        "graph {i}: {} node labels for {} vertices",
                        nl.len(),
                        g.graph.n()
                    )));
                }
                if let Some(&l) = nl.iter().find(|&&l| l >= kn) {
                    return Err(Error::Invariant(format!(
                        "graph {i}: node label {l} >= {kn}"
                    )));
                }
            }
        }
        if let Some(s) = &self.split {
            let mut seen = vec![false; self.graphs.len()];
            for &i in s.train.iter().chain(&s.test) {
                if i >= self.graphs.len() {
                    return Err(Error::Invariant(format!("split index {i} out of range")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Invariant(format!("split index {i} appears twice")));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ds: GraphDataset = serde_json::from_str(text)?;
        ds.validate()?;
        Ok(ds)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Loads a TU directory (dataset name defaults to the directory name) or a
/// JSON interchange file.
pub fn load_dataset(path: &Path, name: Option<&str>) -> Result<GraphDataset> {
    if path.is_dir() {
        let name = match name {
            Some(n) => n.to_string(),
            None => path
                .file_name()
                .and_then(|s| s.to_str())
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "cannot infer dataset name from {}",
                        path.display()
                    ))
                })?
                .to_string(),
        };
        Ok(parse_tu_dataset(path, &name)?)
    } else if path.exists() {
        GraphDataset::from_json(&fs::read_to_string(path)?)
    } else {
        Err(ParseError::MissingFile(path.to_path_buf()).into())
    }
}

fn tu_file(dir: &Path, name: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{name}_{suffix}.txt"))
}

fn read_required(path: &Path) -> std::result::Result<String, ParseError> {
    fs::read_to_string(path).map_err(|_| ParseError::MissingFile(path.to_path_buf()))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_int(line: usize, tok: &str) -> std::result::Result<i64, ParseError> {
    tok.trim().parse().map_err(|_| ParseError::Syntax {
        line,
        msg: format!("expected integer, found '{tok}'"),
    })
}

/// Remaps arbitrary labels to `0..K` in order of first appearance.
fn remap_labels(raw: &[i64]) -> (Vec<usize>, usize) {
    let mut seen: Vec<i64> = Vec::new();
    let out = raw
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(i) => i,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect();
    (out, seen.len())
}

fn read_labels(path: &Path, expected: usize) -> std::result::Result<Vec<i64>, ParseError> {
    let text = read_required(path)?;
    let raw = data_lines(&text)
        .map(|(line, l)| parse_int(line, l.split(',').next().unwrap_or(l)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if raw.len() != expected {
        return Err(ParseError::LineCount {
            file: path.display().to_string(),
            expected,
            found: raw.len(),
        });
    }
    Ok(raw)
}

/// Reads `DS_A.txt`, `DS_graph_indicator.txt` and, when present,
/// `DS_graph_labels.txt` and `DS_node_labels.txt`.
///
/// Global 1-indexed node ids become per-graph 0-indexed ids, both
/// orientations of an edge collapse into one undirected edge, self-loops
/// are dropped, and labels are remapped to `0..K` by first appearance.
pub fn parse_tu_dataset(dir: &Path, name: &str) -> std::result::Result<GraphDataset, ParseError> {
    let indicator_text = read_required(&tu_file(dir, name, "graph_indicator"))?;
    let mut graph_of: Vec<usize> = Vec::new();
    let mut prev = 0usize;
    for (line, l) in data_lines(&indicator_text) {
        let g = parse_int(line, l)?;
        let g = usize::try_from(g).map_err(|_| ParseError::Syntax {
            line,
            msg: format!("bad graph id {g}"),
        })?;
        if g == 0 || (g != prev && g != prev + 1) {
            return Err(ParseError::NonContiguousIndicator {
                node: graph_of.len() + 1,
                graph: g,
                prev,
            });
        }
        prev = g;
        graph_of.push(g - 1);
    }
    let num_graphs = prev;
    let mut first_node = vec![0usize; num_graphs + 1];
    let mut sizes = vec![0usize; num_graphs];
    for (v, &g) in graph_of.iter().enumerate() {
        if sizes[g] == 0 {
            first_node[g] = v;
        }
        sizes[g] += 1;
    }

    let a_path = tu_file(dir, name, "A");
    let a_text = read_required(&a_path)?;
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_graphs];
    for (line, l) in data_lines(&a_text) {
        let mut parts = l.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(ParseError::Syntax {
                line,
                msg: format!("expected 'i, j', found '{l}'"),
            });
        };
        let node = |tok: &str| -> std::result::Result<usize, ParseError> {
            let v = parse_int(line, tok)?;
            if v < 1 || v as usize > graph_of.len() {
                return Err(ParseError::VertexOutOfRange {
                    line,
                    v: v.max(0) as usize,
                    n: graph_of.len(),
                });
            }
            Ok(v as usize - 1)
        };
        let (u, v) = (node(a)?, node(b)?);
        let (gu, gv) = (graph_of[u], graph_of[v]);
        if gu != gv {
            return Err(ParseError::EdgeCrossesGraphs {
                u: u + 1,
                v: v + 1,
                gu: gu + 1,
                gv: gv + 1,
            });
        }
        if u != v {
            edges[gu].push((u - first_node[gu], v - first_node[gu]));
        }
    }

    let graph_labels_path = tu_file(dir, name, "graph_labels");
    let graph_labels = if graph_labels_path.exists() {
        Some(remap_labels(&read_labels(&graph_labels_path, num_graphs)?))
    } else {
        None
    };
    let node_labels_path = tu_file(dir, name, "node_labels");
    let node_labels = if node_labels_path.exists() {
        Some(remap_labels(&read_labels(
            &node_labels_path,
            graph_of.len(),
        )?))
    } else {
        None
    };

    let graphs = (0..num_graphs)
        .map(|g| LabeledGraph {
            graph: Graph::from_edges_dedup(sizes[g], edges[g].iter().copied()),
            label: graph_labels.as_ref().map(|(l, _)| l[g]),
            node_labels: node_labels
                .as_ref()
                .map(|(l, _)| l[first_node[g]..first_node[g] + sizes[g]].to_vec()),
        })
        .collect();
    let num_classes = match (&graph_labels, &node_labels) {
        (Some((_, k)), _) => *k,
        (None, Some((_, k))) => *k,
        (None, None) => 1,
    };
    Ok(GraphDataset {
        name: name.to_string(),
        graphs,
        num_classes,
        num_node_classes: node_labels.map(|(_, k)| k),
        split: None,
    })
}
