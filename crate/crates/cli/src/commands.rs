use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use homscope::bounds::{
    graph_bound, monte_carlo_expectation_bound, node_bound, BoundParams, BoundReport, LipOverGamma,
    NodeMode, Task,
};
use homscope::dataset::{load_dataset, GraphDataset};
use homscope::divergence::{shearer_coefficient, KlEstimator};
use homscope::fwl::{featurize, FeaturizeOptions, Level};
use homscope::graph::{parse_edge_list, pattern_by_name};
use homscope::hom::{
    count_aut, count_hom_with, count_inj_with, count_surj_with, spasm, CountOptions,
};
use homscope::matrix::{
    build_hom_matrix, find_redundant_patterns, is_nonsingular, parse_matrix_csv, HomMatrix,
};
use homscope::{Graph, Pattern, PatternSet};
use num_bigint::BigUint;
use serde_json::json;

use crate::{
    BoundArgs, Cli, Command, ConvertArgs, CountMode, FeatureFormat, FeaturizeArgs, HomArgs, KlArg,
    LevelArg, MatrixArgs, PatternArgs, SplitArg,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] homscope::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("degenerate classes {0:?}: too few items for pair sampling")]
    Degenerate(Vec<usize>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use homscope::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Degenerate(_) => 5,
            CliError::Core(e) => {
                let mut e = e;
                while let E::Class { source, .. } = e {
                    e = source;
                }
                match e {
                    E::Parse(_) | E::InvalidArgument(_) | E::DimensionMismatch(..) => 2,
                    E::Invariant(_) | E::InexactDivision(_) => 3,
                    E::WorkLimit { .. } | E::CapExceeded { .. } => 4,
                    _ => 1,
                }
            }
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cli: Cli) -> Result<()> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Hom(a) => cmd_hom(&a),
        Command::Spasm(a) => cmd_spasm(&a, verbose),
        Command::Matrix(a) => cmd_matrix(&a, verbose),
        Command::Featurize(a) => cmd_featurize(&a, verbose),
        Command::Bound(a) => cmd_bound(&a, verbose),
        Command::Shearer(a) => cmd_shearer(&a),
        Command::Convert(a) => cmd_convert(&a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Core(e.into()))
}

/// An edge-list file if the path exists, otherwise a pattern name.
fn load_graph(spec: &str) -> Result<Graph> {
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(parse_edge_list(&read(path)?).map_err(homscope::Error::from)?);
    }
    pattern_by_name(spec).map_err(|_| {
        CliError::Usage(format!(
            "'{spec}' is neither a file nor a known pattern name"
        ))
    })
}

fn load_patterns(list: &str) -> Result<PatternSet> {
    let patterns = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            if Path::new(item).is_file() {
                load_graph(item).map(|g| Pattern::new(item, g))
            } else {
                Pattern::named(item)
                    .map_err(|_| CliError::Usage(format!("unknown pattern '{item}'")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if patterns.is_empty() {
        return Err(CliError::Usage("empty pattern list".into()));
    }
    Ok(PatternSet::new(patterns)?)
}

fn cmd_hom(a: &HomArgs) -> Result<()> {
    let f = load_graph(&a.pattern)?;
    let opts = CountOptions {
        budget: a.budget,
        ..CountOptions::default()
    };
    let count: BigUint = if a.mode == CountMode::Aut {
        count_inj_with(&f, &f, &opts)?.into_inner()
    } else {
        let host = a
            .host
            .as_deref()
            .ok_or_else(|| CliError::Usage("--host is required for this mode".into()))?;
        let g = load_graph(host)?;
        match a.mode {
            CountMode::Hom => count_hom_with(&f, &g, &opts)?.into_inner(),
            CountMode::Inj => count_inj_with(&f, &g, &opts)?.into_inner(),
            CountMode::Surj => count_surj_with(&f, &g, &opts)?.into_inner(),
            CountMode::Sub => count_inj_with(&f, &g, &opts)?
                .checked_div(&count_aut(&f)?)?
                .into_inner(),
            CountMode::Aut => unreachable!(),
        }
    };
    emit(None, &count.to_string())
}

fn cmd_spasm(a: &PatternArgs, verbose: bool) -> Result<()> {
    let f = load_graph(&a.pattern)?;
    let s = spasm(&f)?;
    if verbose {
        eprintln!("{:>3} {:>3} {:>12}  edges", "n", "m", "coefficient");
        for m in &s.members {
            eprintln!(
                "{:>3} {:>3} {:>12}  {:?}",
                m.graph.n(),
                m.graph.edge_count(),
                m.coefficient,
                m.graph.edges()
            );
        }
    }
    emit(None, &pretty(&s)?)
}

fn cmd_matrix(a: &MatrixArgs, verbose: bool) -> Result<()> {
    let m: HomMatrix = match (&a.source.patterns, &a.source.literal) {
        (Some(list), _) => build_hom_matrix(&load_patterns(list)?)?,
        (None, Some(path)) => parse_matrix_csv(&read(path)?).map_err(homscope::Error::from)?,
        (None, None) => {
            return Err(CliError::Usage(
                "one of --patterns or --literal is required".into(),
            ))
        }
    };
    let csv = m.to_csv();
    if let Some(p) = &a.csv {
        fs::write(p, &csv).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        })?;
    }
    if verbose {
        eprint!("{csv}");
    }
    let report = json!({
        "names": m.names,
        "entries": m.entries,
        "rank": m.rank(),
        "nonsingular": is_nonsingular(&m),
        "redundancy": find_redundant_patterns(&m),
    });
    emit(None, &pretty(&report)?)
}

fn load(data: &crate::DatasetArgs) -> Result<(GraphDataset, PatternSet)> {
    let ds = load_dataset(&data.dataset, data.name.as_deref())?;
    Ok((ds, load_patterns(&data.patterns)?))
}

fn cmd_featurize(a: &FeaturizeArgs, verbose: bool) -> Result<()> {
    let (ds, patterns) = load(&a.data)?;
    let indices = match a.split {
        SplitArg::Train => ds.train_indices(),
        SplitArg::All => (0..ds.len()).collect(),
    };
    let level = match a.level {
        LevelArg::Graph => Level::Graph,
        LevelArg::Node => Level::Node,
    };
    if a.ego && level == Level::Graph {
        return Err(CliError::Usage("--ego applies to --level node only".into()));
    }
    let fm = featurize(
        &ds,
        &indices,
        &patterns,
        FeaturizeOptions {
            depth: a.data.depth,
            level,
            ego: a.ego,
        },
    )?;
    if verbose {
        eprintln!("{}: {} rows, dimension {}", ds.name, fm.rows.len(), fm.dim);
    }
    let text = match a.format {
        FeatureFormat::Csv => fm.to_csv(),
        FeatureFormat::Json => pretty(&fm.to_sparse_json())?,
    };
    emit(a.out.as_deref(), &text)
}

fn bound_params(a: &BoundArgs, task: Task) -> Result<BoundParams> {
    let defaults = BoundParams::for_task(task);
    let lip_over_gamma = match a.lip_over_gamma.as_deref() {
        None => defaults.lip_over_gamma,
        Some(text) => {
            let values = text
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage(format!("bad --lip-over-gamma '{text}'")))?;
            match values.as_slice() {
                [v] => LipOverGamma::Global(*v),
                _ => LipOverGamma::PerClass(values),
            }
        }
    };
    let estimator = match a.kl {
        KlArg::Knn => KlEstimator::Knn { k: a.k },
        KlArg::Exact => KlEstimator::ExactDiscrete,
    };
    if a.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    if let Some(0) = a.repeats {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let params = BoundParams {
        lip_over_gamma,
        delta: a.delta,
        n_pairs: a.n_pairs,
        estimator,
        depth: a.data.depth,
        seed: a.seed,
    };
    Ok(params)
}

fn print_classes(r: &BoundReport) {
    eprintln!(
        "{:>3} {:>6} {:>5} {:>12} {:>12} {:>12} {:>5}",
        "c", "m_c", "s_c", "beta", "div_term", "conc_term", "degen"
    );
    for t in &r.classes {
        eprintln!(
            "{:>3} {:>6} {:>5} {:>12.6} {:>12.6} {:>12.6} {:>5}",
            t.c, t.m_c, t.pair_size, t.beta, t.div_term, t.conc_term, t.degenerate
        );
    }
    eprintln!("residual {:.6}  bound {:.6}", r.residual, r.bound);
}

fn cmd_bound(a: &BoundArgs, verbose: bool) -> Result<()> {
    let (ds, patterns) = load(&a.data)?;
    let task = match a.task {
        LevelArg::Graph => Task::Graph,
        LevelArg::Node => Task::Node,
    };
    if a.ego && task == Task::Graph {
        return Err(CliError::Usage("--ego applies to --task node only".into()));
    }
    let mode = if a.ego {
        NodeMode::Ego
    } else {
        NodeMode::WholeGraph
    };
    let params = bound_params(a, task)?;
    let report = match task {
        Task::Graph => graph_bound(&ds, &patterns, &params)?,
        Task::Node => node_bound(&ds, &patterns, &params, mode)?,
    };
    report.check_consistency()?;
    let degenerate: Vec<usize> = report
        .classes
        .iter()
        .filter(|t| t.degenerate && t.m_c > 0)
        .map(|t| t.c)
        .collect();
    if verbose {
        print_classes(&report);
    }

    match a.repeats {
        Some(r) => {
            if a.summary_csv.is_some() {
                return Err(CliError::Usage(
                    "--summary-csv is not available with --repeats".into(),
                ));
            }
            let mc = monte_carlo_expectation_bound(&ds, &patterns, &params, task, mode, r)?;
            if verbose {
                eprintln!(
                    "expectation term {:.6} ± {:.6} over {r} repeats",
                    mc.mean, mc.stderr
                );
            }
            emit(None, &pretty(&mc)?)?;
        }
        None => {
            if let Some(path) = &a.summary_csv {
                append_summary(path, &report.csv_row(&ds.name))?;
            }
            emit(None, &pretty(&report)?)?;
        }
    }

    if !degenerate.is_empty() {
        if a.strict {
            return Err(CliError::Degenerate(degenerate));
        }
        eprintln!("warning: classes {degenerate:?} are too small for pair sampling; their Ω factor was set to 1");
    }
    Ok(())
}

fn append_summary(path: &Path, row: &str) -> Result<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io)?;
    if fresh {
        writeln!(f, "{}", BoundReport::csv_header()).map_err(io)?;
    }
    writeln!(f, "{row}").map_err(io)
}

fn cmd_shearer(a: &PatternArgs) -> Result<()> {
    let f = load_graph(&a.pattern)?;
    emit(None, &shearer_coefficient(&f)?.to_string())
}

fn cmd_convert(a: &ConvertArgs) -> Result<()> {
    if !a.dataset.is_dir() {
        return Err(CliError::Usage(format!(
            "{} is not a TU dataset directory",
            a.dataset.display()
        )));
    }
    let ds = load_dataset(&a.dataset, a.name.as_deref())?;
    emit(a.out.as_deref(), &ds.to_json()?)
}
