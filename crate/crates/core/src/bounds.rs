//! Data-dependent generalization bounds for graph and node classification.
//!
//! For `K` classes with `m_c` training items each, `n` disjoint pairs of
//! subsamples of size `s_c = ⌊m_c / 2n⌋` are drawn per class and
//!
//! ```text
//! bound = Σ_c π̂(c)·(L_c/γ)·[ (1/n) Σ_j β_c·Ω(KL(S^j ‖ S̃^j))
//!                            + 2β_c·√(log(2K/δ) / (n·s_c)) ]
//!         + √(log(2/δ) / (2m)),          m = Σ_c s_c
//! ```
//!
//! where `β_c` is the diameter of the class's training features and `π̂` the
//! empirical class frequencies.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::GraphDataset;
use crate::divergence::{diameter, omega, EmpiricalSample, KlEstimator};
use crate::error::{Error, Result};
use crate::fwl::{featurize, FeaturizeOptions, Level};
use crate::pattern::PatternSet;

pub const DEFAULT_DELTA: f64 = 0.01;
pub const DEFAULT_GRAPH_LIP_OVER_GAMMA: f64 = 3.0;
pub const DEFAULT_NODE_LIP_OVER_GAMMA: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Graph,
    Node,
}

/// How node features are computed for node tasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeMode {
    /// Refine each whole graph, read off node representations.
    WholeGraph,
    /// Refine each node's depth-hop ego-graph separately.
    Ego,
}

/// `L_c / γ`, shared or one value per class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LipOverGamma {
    Global(f64),
    PerClass(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub lip_over_gamma: LipOverGamma,
    pub delta: f64,
    pub n_pairs: usize,
    pub estimator: KlEstimator,
    /// Refinement depth `L`.
    pub depth: usize,
    pub seed: u64,
}

impl BoundParams {
    /// Defaults for a task: `L_c/γ` of 3 (graph) or 6 (node), `δ = 0.01`,
    /// one pair, 1-NN estimator, depth 2, seed 0.
    pub fn for_task(task: Task) -> Self {
        let lg = match task {
            Task::Graph => DEFAULT_GRAPH_LIP_OVER_GAMMA,
            Task::Node => DEFAULT_NODE_LIP_OVER_GAMMA,
        };
        BoundParams {
            lip_over_gamma: LipOverGamma::Global(lg),
            delta: DEFAULT_DELTA,
            n_pairs: 1,
            estimator: KlEstimator::Knn { k: 1 },
            depth: 2,
            seed: 0,
        }
    }

    pub fn validate(&self, num_classes: usize) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if self.n_pairs == 0 {
            return Err(Error::InvalidArgument("n_pairs must be at least 1".into()));
        }
        let ok = |v: f64| v > 0.0 && v.is_finite();
        match &self.lip_over_gamma {
            LipOverGamma::Global(v) if !ok(*v) => Err(Error::InvalidArgument(format!(
                "lip_over_gamma must be positive, got {v}"
            ))),
            LipOverGamma::PerClass(vs) if vs.len() != num_classes => {
                Err(Error::InvalidArgument(format!(
                    "{} lip_over_gamma values for {num_classes} classes",
                    vs.len()
                )))
            }
            LipOverGamma::PerClass(vs) if !vs.iter().all(|&v| ok(v)) => Err(
                Error::InvalidArgument("lip_over_gamma values must be positive".into()),
            ),
            _ => Ok(()),
        }
    }

    fn lip(&self, class: usize) -> f64 {
        match &self.lip_over_gamma {
            LipOverGamma::Global(v) => *v,
            LipOverGamma::PerClass(vs) => vs[class],
        }
    }
}

/// Pairs drawn for one class, as indices into that class's item list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassPairs {
    pub class: usize,
    pub pair_size: usize,
    pub pairs: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Draws, for each class of size `m_c`, `n` pairs of disjoint subsets of
/// size `⌊m_c / 2n⌋` without replacement. Classes are processed in order
/// from one seeded stream. Classes too small for a single item per subset
/// get no pairs.
pub fn stratified_pair_sampling(
    class_sizes: &[usize],
    n: usize,
    seed: u64,
) -> Result<Vec<ClassPairs>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n_pairs must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(class_sizes
        .iter()
        .enumerate()
        .map(|(class, &m_c)| {
            let s = m_c / (2 * n);
            let mut order: Vec<usize> = (0..m_c).collect();
            order.shuffle(&mut rng);
            let pairs = if s == 0 {
                Vec::new()
            } else {
                order
                    .chunks_exact(s)
                    .take(2 * n)
                    .collect::<Vec<_>>()
                    .chunks_exact(2)
                    .map(|p| (p[0].to_vec(), p[1].to_vec()))
                    .collect()
            };
            ClassPairs {
                class,
                pair_size: s,
                pairs,
            }
        })
        .collect())
}

mod kl_list {
    //! `+∞` round-trips through JSON as `null`.
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let opt: Vec<Option<f64>> = v.iter().map(|&x| x.is_finite().then_some(x)).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let opt: Vec<Option<f64>> = Vec::deserialize(d)?;
        Ok(opt
            .into_iter()
            .map(|x| x.unwrap_or(f64::INFINITY))
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassTerm {
    pub c: usize,
    pub m_c: usize,
    /// Empirical class frequency `π̂(c)`.
    pub pi: f64,
    pub pair_size: usize,
    pub lip_over_gamma: f64,
    /// Diameter of the class's training features (`β_c`, or `α_c` for
    /// nodes).
    pub beta: f64,
    /// One clamped KL value per pair; empty for degenerate classes.
    #[serde(with = "kl_list")]
    pub kl: Vec<f64>,
    pub div_term: f64,
    pub conc_term: f64,
    /// Too few items for the estimator; `Ω` was replaced by 1.
    pub degenerate: bool,
}

impl ClassTerm {
    fn recompute(&self, n: usize, k: usize, delta: f64) -> (f64, f64) {
        let div = if self.degenerate {
            self.beta
        } else {
            self.kl.iter().map(|&v| self.beta * omega(v)).sum::<f64>() / n as f64
        };
        (div, concentration(self.beta, k, delta, n, self.pair_size))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub task: Task,
    pub params: BoundParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<NodeMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patterns: Option<Vec<String>>,
    pub num_classes: usize,
    /// `Σ_c ⌊m_c / 2n⌋`.
    pub m: usize,
    pub classes: Vec<ClassTerm>,
    /// `Σ_c π̂(c)·(L_c/γ)·div_term`.
    pub divergence: f64,
    /// `Σ_c π̂(c)·(L_c/γ)·conc_term`.
    pub concentration: f64,
    pub residual: f64,
    pub bound: f64,
}

fn concentration(beta: f64, k: usize, delta: f64, n: usize, pair_size: usize) -> f64 {
    let s = pair_size.max(1) as f64;
    2.0 * beta * ((2.0 * k as f64 / delta).ln() / (n as f64 * s)).sqrt()
}

fn residual(delta_numerator: f64, delta: f64, m: usize) -> f64 {
    ((delta_numerator / delta).ln() / (2.0 * m as f64)).sqrt()
}

impl BoundReport {
    /// Bound recomputed from the recorded per-class parts.
    pub fn reassemble(&self) -> f64 {
        let n = self.params.n_pairs;
        let total: f64 = self
            .classes
            .iter()
            .map(|t| {
                let (div, conc) = t.recompute(n, self.num_classes, self.params.delta);
                t.pi * t.lip_over_gamma * (div + conc)
            })
            .sum();
        total + residual(2.0, self.params.delta, self.m)
    }

    /// Checks that the recorded bound matches [`Self::reassemble`] and that
    /// every recorded part is finite.
    pub fn check_consistency(&self) -> Result<()> {
        let parts_finite = self.classes.iter().all(|t| {
            [t.pi, t.beta, t.div_term, t.conc_term, t.lip_over_gamma]
                .iter()
                .all(|v| v.is_finite())
        });
        if !parts_finite || !self.bound.is_finite() || !self.residual.is_finite() {
            return Err(Error::Invariant("bound report has non-finite parts".into()));
        }
        let again = self.reassemble();
        if (again - self.bound).abs() > 1e-12 * self.bound.abs().max(1.0) {
            return Err(Error::Invariant(format!(
                "bound {} does not reassemble ({again})",
                self.bound
            )));
        }
        Ok(())
    }

    pub fn csv_header() -> &'static str {
        "dataset,task,patterns,depth,n_pairs,delta,divergence,concentration,residual,bound"
    }

    /// One summary row for `(dataset, F, L)`; patterns are `;`-separated.
    pub fn csv_row(&self, dataset: &str) -> String {
        let patterns = self
            .patterns
            .as_ref()
            .map(|p| p.join(";"))
            .unwrap_or_default();
        let task = match self.task {
            Task::Graph => "graph",
            Task::Node => "node",
        };
        format!(
            "{dataset},{task},{patterns},{},{},{},{},{},{},{}",
            self.params.depth,
            self.params.n_pairs,
            self.params.delta,
            self.divergence,
            self.concentration,
            self.residual,
            self.bound
        )
    }
}

fn class_samples(rows: &[Vec<f64>], idx: &[usize]) -> Result<EmpiricalSample> {
    EmpiricalSample::new(idx.iter().map(|&i| rows[i].clone()).collect())
}

/// Assembles the bound from per-class training feature rows
/// (`classes[c]` holds the rows of class `c`; empty classes are allowed).
pub fn bound_from_features(
    task: Task,
    classes: &[Vec<Vec<f64>>],
    params: &BoundParams,
) -> Result<BoundReport> {
    let k = classes.len();
    params.validate(k)?;
    let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().sum();
    let n = params.n_pairs;
    let m: usize = sizes.iter().map(|&m_c| m_c / (2 * n)).sum();
    if m == 0 {
        return Err(Error::InsufficientSamples(format!(
            "no class has at least {} items for {n} pairs",
            2 * n
        )));
    }
    let sampled = stratified_pair_sampling(&sizes, n, params.seed)?;
    let min_pair = params.estimator.min_sample().max(2);

    let terms = classes
        .iter()
        .zip(&sampled)
        .map(|(rows, cp)| {
            let c = cp.class;
            let wrap = |e: Error| Error::Class {
                class: c,
                source: Box::new(e),
            };
            let beta = if rows.is_empty() {
                0.0
            } else {
                diameter(&EmpiricalSample::new(rows.clone()).map_err(wrap)?)
            };
            let degenerate = cp.pair_size < min_pair;
            let (kl, div_term) = if degenerate {
                (Vec::new(), beta)
            } else {
                let kl = cp
                    .pairs
                    .par_iter()
                    .map(|(a, b)| {
                        params
                            .estimator
                            .estimate(&class_samples(rows, a)?, &class_samples(rows, b)?)
                    })
                    .collect::<Result<Vec<f64>>>()
                    .map_err(wrap)?;
                let div = kl.iter().map(|&v| beta * omega(v)).sum::<f64>() / n as f64;
                (kl, div)
            };
            Ok(ClassTerm {
                c,
                m_c: rows.len(),
                pi: rows.len() as f64 / total as f64,
                pair_size: cp.pair_size,
                lip_over_gamma: params.lip(c),
                beta,
                kl,
                div_term,
                conc_term: concentration(beta, k, params.delta, n, cp.pair_size),
                degenerate,
            })
        })
        .collect::<Result<Vec<ClassTerm>>>()?;

    let divergence: f64 = terms
        .iter()
        .map(|t| t.pi * t.lip_over_gamma * t.div_term)
        .sum();
    let concentration: f64 = terms
        .iter()
        .map(|t| t.pi * t.lip_over_gamma * t.conc_term)
        .sum();
    let mut report = BoundReport {
        task,
        params: params.clone(),
        mode: None,
        patterns: None,
        num_classes: k,
        m,
        classes: terms,
        divergence,
        concentration,
        residual: residual(2.0, params.delta, m),
        bound: 0.0,
    };
    report.bound = report.reassemble();
    Ok(report)
}

/// Graph-level training features grouped by graph label.
pub fn graph_class_features(
    ds: &GraphDataset,
    patterns: &PatternSet,
    depth: usize,
) -> Result<Vec<Vec<Vec<f64>>>> {
    if !ds.has_graph_labels() {
        return Err(Error::Precondition(format!(
            "dataset {} has no graph labels",
            ds.name
        )));
    }
    let train: Vec<usize> = ds
        .train_indices()
        .into_iter()
        .filter(|&i| ds.graphs[i].label.is_some())
        .collect();
    let fm = featurize(
        ds,
        &train,
        patterns,
        FeaturizeOptions {
            depth,
            level: Level::Graph,
            ego: false,
        },
    )?;
    Ok(group_rows(fm.rows, &fm.labels, ds.num_classes))
}

/// Node-level features of every labelled node in the training graphs,
/// grouped by node label.
pub fn node_class_features(
    ds: &GraphDataset,
    patterns: &PatternSet,
    depth: usize,
    mode: NodeMode,
) -> Result<Vec<Vec<Vec<f64>>>> {
    if !ds.has_node_labels() {
        return Err(Error::Precondition(format!(
            "dataset {} has no node labels",
            ds.name
        )));
    }
    let opts = FeaturizeOptions {
        depth,
        level: Level::Node,
        ego: mode == NodeMode::Ego,
    };
    let fm = featurize(ds, &ds.train_indices(), patterns, opts)?;
    Ok(group_rows(fm.rows, &fm.labels, ds.node_classes()))
}

fn group_rows(rows: Vec<Vec<f64>>, labels: &[Option<usize>], k: usize) -> Vec<Vec<Vec<f64>>> {
    let mut out = vec![Vec::new(); k];
    for (row, label) in rows.into_iter().zip(labels) {
        if let Some(c) = *label {
            out[c].push(row);
        }
    }
    out
}

/// Bound for graph classification with `F`-WL features at depth
/// `params.depth` on the training split.
pub fn graph_bound(
    ds: &GraphDataset,
    patterns: &PatternSet,
    params: &BoundParams,
) -> Result<BoundReport> {
    let classes = graph_class_features(ds, patterns, params.depth)?;
    let mut report = bound_from_features(Task::Graph, &classes, params)?;
    report.patterns = Some(patterns.names());
    Ok(report)
}

/// Bound for node classification; `α_c` is the diameter of the class's
/// node representations.
pub fn node_bound(
    ds: &GraphDataset,
    patterns: &PatternSet,
    params: &BoundParams,
    mode: NodeMode,
) -> Result<BoundReport> {
    let classes = node_class_features(ds, patterns, params.depth, mode)?;
    let mut report = bound_from_features(Task::Node, &classes, params)?;
    report.patterns = Some(patterns.names());
    report.mode = Some(mode);
    Ok(report)
}

/// Resampled estimate of the expectation bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub task: Task,
    pub params: BoundParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<NodeMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patterns: Option<Vec<String>>,
    pub repeats: usize,
    /// Divergence component of each repeat (seed `params.seed + r`).
    pub samples: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
    /// Total number of training items.
    pub m: usize,
    /// `√(log(1/δ)/2m)` for graphs, `√(log(2/δ)/2m)` for nodes.
    pub residual: f64,
    pub bound: f64,
}

pub fn monte_carlo_from_features(
    task: Task,
    classes: &[Vec<Vec<f64>>],
    params: &BoundParams,
    repeats: usize,
) -> Result<MonteCarloReport> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let samples = (0..repeats as u64)
        .map(|r| {
            let p = BoundParams {
                seed: params.seed.wrapping_add(r),
                ..params.clone()
            };
            bound_from_features(task, classes, &p).map(|rep| rep.divergence)
        })
        .collect::<Result<Vec<f64>>>()?;
    let count = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / count;
    let stderr = if samples.len() < 2 {
        0.0
    } else {
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    };
    let m: usize = classes.iter().map(Vec::len).sum();
    let numerator = match task {
        Task::Graph => 1.0,
        Task::Node => 2.0,
    };
    let residual = residual(numerator, params.delta, m);
    Ok(MonteCarloReport {
        task,
        params: params.clone(),
        mode: None,
        patterns: None,
        repeats,
        samples,
        mean,
        stderr,
        m,
        residual,
        bound: mean + residual,
    })
}

pub fn monte_carlo_expectation_bound(
    ds: &GraphDataset,
    patterns: &PatternSet,
    params: &BoundParams,
    task: Task,
    mode: NodeMode,
    repeats: usize,
) -> Result<MonteCarloReport> {
    let classes = match task {
        Task::Graph => graph_class_features(ds, patterns, params.depth)?,
        Task::Node => node_class_features(ds, patterns, params.depth, mode)?,
    };
    let mut report = monte_carlo_from_features(task, &classes, params, repeats)?;
    report.patterns = Some(patterns.names());
    report.mode = (task == Task::Node).then_some(mode);
    Ok(report)
}
