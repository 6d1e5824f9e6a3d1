use std::collections::{BTreeMap, HashMap};

use homscope::bounds::{
    bound_from_features, graph_bound, graph_class_features, node_bound, BoundParams, NodeMode, Task,
};
use homscope::dataset::{GraphDataset, LabeledGraph};
use homscope::divergence::KlEstimator;
use homscope::fwl::FwlRun;
use homscope::graph::{clique, cycle, path};
use homscope::hom::CountOptions;
use homscope::{Graph, PatternSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

fn dataset(graphs: Vec<(Graph, usize)>, num_classes: usize) -> GraphDataset {
    GraphDataset {
        name: "fixture".into(),
        graphs: graphs
            .into_iter()
            .map(|(graph, label)| LabeledGraph {
                graph,
                label: Some(label),
                node_labels: None,
            })
            .collect(),
        num_classes,
        num_node_classes: None,
        split: None,
    }
}

/// `a` refines `b`: equal colours under `a` imply equal colours under `b`.
fn refines(a: &[u32], b: &[u32]) -> bool {
    let mut seen: HashMap<u32, u32> = HashMap::new();
    a.iter()
        .zip(b)
        .all(|(&x, &y)| *seen.entry(x).or_insert(y) == y)
}

#[test]
fn larger_pattern_sets_refine_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let small = PatternSet::vertex();
    let large = PatternSet::from_names("V,K3,C4").unwrap();
    for _ in 0..20 {
        let n = rng.gen_range(2..=10);
        let g = random_graph(&mut rng, n, 0.4);
        let a = &FwlRun::new(&[&g], &large, 3, &CountOptions::default())
            .unwrap()
            .colorings[0];
        let b = &FwlRun::new(&[&g], &small, 3, &CountOptions::default())
            .unwrap()
            .colorings[0];
        for t in 0..=3 {
            assert!(refines(&a.levels[t], &b.levels[t]), "iteration {t}");
            if t > 0 {
                assert!(refines(&a.levels[t], &a.levels[t - 1]));
            }
        }
    }
}

/// Plain colour refinement with a shared signature table, histograms of
/// iterations `0..=depth` concatenated.
fn wl_features(graphs: &[&Graph], depth: usize) -> Vec<Vec<f64>> {
    let mut colorings: Vec<Vec<Vec<usize>>> = graphs.iter().map(|g| vec![vec![0; g.n()]]).collect();
    let mut sizes = vec![1usize];
    for _ in 0..depth {
        let mut table: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        for (g, cs) in graphs.iter().zip(&colorings) {
            let last = cs.last().unwrap();
            for v in 0..g.n() {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| last[w]).collect();
                nb.sort_unstable();
                let len = table.len();
                table.entry((last[v], nb)).or_insert(len);
            }
        }
        for (g, cs) in graphs.iter().zip(colorings.iter_mut()) {
            let last = cs.last().unwrap().clone();
            let next = (0..g.n())
                .map(|v| {
                    let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| last[w]).collect();
                    nb.sort_unstable();
                    table[&(last[v], nb)]
                })
                .collect();
            cs.push(next);
        }
        sizes.push(table.len());
    }
    colorings
        .iter()
        .map(|cs| {
            let mut row = Vec::new();
            for (colors, &d) in cs.iter().zip(&sizes) {
                let mut block = vec![0.0; d];
                for &c in colors {
                    block[c] += 1.0;
                }
                row.extend(block);
            }
            row
        })
        .collect()
}

#[test]
fn vertex_pattern_bound_equals_plain_refinement_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let graphs: Vec<(Graph, usize)> = (0..24)
        .map(|i| {
            let n = rng.gen_range(3..=8);
            (
                random_graph(&mut rng, n, if i % 2 == 0 { 0.3 } else { 0.6 }),
                i % 2,
            )
        })
        .collect();
    let ds = dataset(graphs, 2);
    for depth in 0..=3 {
        let params = BoundParams {
            depth,
            n_pairs: 2,
            estimator: KlEstimator::ExactDiscrete,
            ..BoundParams::for_task(Task::Graph)
        };
        let ours = graph_bound(&ds, &PatternSet::vertex(), &params).unwrap();
        let refs: Vec<&Graph> = ds.graphs.iter().map(|g| &g.graph).collect();
        let mut classes = vec![Vec::new(); 2];
        for (row, g) in wl_features(&refs, depth).into_iter().zip(&ds.graphs) {
            classes[g.label.unwrap()].push(row);
        }
        let theirs = bound_from_features(Task::Graph, &classes, &params).unwrap();
        assert!(
            (ours.bound - theirs.bound).abs() < 1e-12,
            "depth {depth}: {} vs {}",
            ours.bound,
            theirs.bound
        );
        for (a, b) in ours.classes.iter().zip(&theirs.classes) {
            assert_eq!(a.kl, b.kl);
            assert!((a.beta - b.beta).abs() < 1e-12);
        }
        ours.check_consistency().unwrap();
    }
}

#[test]
fn identical_class_members_collapse_to_residual() {
    let graphs = (0..10)
        .map(|i| if i < 6 { (cycle(5), 0) } else { (path(4), 1) })
        .collect();
    let ds = dataset(graphs, 2);
    let f = PatternSet::from_names("V,K3").unwrap();
    let params = BoundParams::for_task(Task::Graph);
    let r = graph_bound(&ds, &f, &params).unwrap();
    // the k-NN estimate on duplicated rows is log(s/(s-1)), not 0, but β_c = 0
    assert!(r.classes.iter().all(|c| c.beta == 0.0));
    assert_eq!(r.bound, r.residual);
    let exact = BoundParams {
        estimator: KlEstimator::ExactDiscrete,
        ..params.clone()
    };
    let e = graph_bound(&ds, &f, &exact).unwrap();
    assert!(e.classes.iter().all(|c| c.kl.iter().all(|&v| v == 0.0)));
    assert_eq!(e.bound, r.bound);
    assert_eq!(r.m, 3 + 2);
    assert_eq!(
        r,
        graph_bound(&ds, &PatternSet::from_names("V,K3").unwrap(), &params).unwrap()
    );
}

#[test]
fn node_bound_on_triangles_and_trivial_ego() {
    let mut ds = dataset(vec![(clique(3), 0), (clique(3), 0)], 1);
    for g in &mut ds.graphs {
        g.node_labels = Some(vec![0; 3]);
    }
    ds.num_node_classes = Some(1);
    let params = BoundParams {
        depth: 2,
        ..BoundParams::for_task(Task::Node)
    };
    let r = node_bound(&ds, &PatternSet::vertex(), &params, NodeMode::WholeGraph).unwrap();
    assert_eq!(r.classes[0].beta, 0.0);
    assert_eq!(r.bound, r.residual);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ds = dataset(vec![(random_graph(&mut rng, 12, 0.3), 0)], 1);
    ds.graphs[0].node_labels = Some((0..12).map(|v| v % 2).collect());
    ds.num_node_classes = Some(2);
    let params = BoundParams {
        depth: 0,
        estimator: KlEstimator::ExactDiscrete,
        ..BoundParams::for_task(Task::Node)
    };
    let r = node_bound(&ds, &PatternSet::vertex(), &params, NodeMode::Ego).unwrap();
    assert!(r
        .classes
        .iter()
        .all(|c| c.beta == 0.0 && c.kl.iter().all(|&v| v == 0.0)));
    assert_eq!(r.bound, r.residual);
}

#[test]
fn graph_labels_are_required() {
    let mut ds = dataset(vec![(clique(3), 0)], 1);
    ds.graphs[0].label = None;
    assert!(graph_class_features(&ds, &PatternSet::vertex(), 1).is_err());
}
