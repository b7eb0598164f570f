use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use combo_core::combo::write_trace;
use combo_core::io::{
    partition_from_rows, read_graph, read_partition, read_partition_rows, write_edge_list,
    write_partition,
};
use combo_core::objective::score;
use combo_core::synthgen::{generate, PlantedMeta};
use combo_core::{
    louvain, nmi, optimize, optimize_from, ComboConfig, Graph, LouvainConfig, ObjectiveKind,
    Partition, PlantedSpec,
};
use serde::Serialize;

use crate::args::{Algorithm, CompareArgs, DetectArgs, GenArgs};

#[derive(Debug, Serialize)]
pub struct DetectReport {
    pub algorithm: &'static str,
    pub objective: ObjectiveKind,
    pub score: f64,
    pub k: usize,
    pub n: usize,
    pub edges: usize,
    /// Optimization wall time; parsing and output are excluded.
    pub runtime_seconds: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moves: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_score: Option<f64>,
    pub timed_out: bool,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub nmi: f64,
    pub n: usize,
    pub k_first: usize,
    pub k_second: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_first: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_second: Option<f64>,
    /// `score_first - score_second`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn save_partition(path: &Path, g: &Graph, p: &Partition) -> Result<()> {
    let mut out = create(path)?;
    write_partition(g.labels(), p, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    read_graph(path).with_context(|| format!("reading graph {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

pub fn detect(args: &DetectArgs) -> Result<u8> {
    let kind = ObjectiveKind::from(args.objective);
    if args.algorithm == Algorithm::Louvain {
        if kind != ObjectiveKind::Modularity {
            bail!("louvain only optimizes modularity; use --algorithm combo for codelength");
        }
        let combo_only = [
            ("--init", args.init.is_some()),
            ("--max-communities", args.max_communities.is_some()),
            ("--tries", args.tries.is_some()),
            ("--trace", args.trace.is_some()),
            ("--time-limit", args.time_limit.is_some()),
        ];
        if let Some((flag, _)) = combo_only.iter().find(|(_, set)| *set) {
            bail!("{flag} is only supported with --algorithm combo");
        }
    }
    let g = load_graph(&args.input)?;
    let init = match &args.init {
        Some(path) => Some(
            read_partition(path, g.labels())
                .with_context(|| format!("reading partition {}", path.display()))?,
        ),
        None => None,
    };

    let report;
    let partition;
    match args.algorithm {
        Algorithm::Combo => {
            let cfg = ComboConfig {
                objective: kind,
                max_communities: args.max_communities,
                threshold: args.threshold,
                tries: args.tries.unwrap_or(ComboConfig::default().tries),
                seed: args.seed,
                time_limit_secs: args.time_limit,
                parallel: !args.serial,
                ..Default::default()
            };
            let init_score = init.as_ref().map(|p| score(kind, &g, p)).transpose()?;
            let start = Instant::now();
            let result = match &init {
                Some(p) => optimize_from(&g, &cfg, p)?,
                None => optimize(&g, &cfg)?,
            };
            let runtime_seconds = start.elapsed().as_secs_f64();
            if let Some(path) = &args.trace {
                let mut out = create(path)?;
                write_trace(&result.trace, &mut out)?;
                out.flush()?;
            }
            report = DetectReport {
                algorithm: "combo",
                objective: kind,
                score: result.score,
                k: result.partition.community_count(),
                n: g.node_count(),
                edges: g.edge_count(),
                runtime_seconds,
                seed: args.seed,
                moves: Some(result.trace.len()),
                init_score,
                timed_out: result.timed_out,
            };
            partition = result.partition;
        }
        Algorithm::Louvain => {
            let cfg = LouvainConfig {
                seed: args.seed,
                tolerance: args.threshold,
                ..Default::default()
            };
            let start = Instant::now();
            let result = louvain(&g, &cfg)?;
            let runtime_seconds = start.elapsed().as_secs_f64();
            report = DetectReport {
                algorithm: "louvain",
                objective: kind,
                score: result.score,
                k: result.partition.community_count(),
                n: g.node_count(),
                edges: g.edge_count(),
                runtime_seconds,
                seed: args.seed,
                moves: None,
                init_score: None,
                timed_out: false,
            };
            partition = result.partition;
        }
    }
    if let Some(path) = &args.output {
        save_partition(path, &g, &partition)?;
    }
    print_json(&report)?;
    eprintln!(
        "{} {}: score {:.6} with {} communities in {:.3}s",
        report.algorithm, report.objective, report.score, report.k, report.runtime_seconds
    );
    Ok(0)
}

fn read_rows(path: &Path) -> Result<Vec<(String, String)>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_partition_rows(file).with_context(|| format!("reading partition {}", path.display()))
}

pub fn compare(args: &CompareArgs) -> Result<u8> {
    let first = read_rows(&args.first)?;
    let second = read_rows(&args.second)?;
    let graph = args.graph.as_deref().map(load_graph).transpose()?;
    let labels: Vec<String> = match &graph {
        Some(g) => g.labels().to_vec(),
        None => first.iter().map(|(node, _)| node.clone()).collect(),
    };
    let p1 = partition_from_rows(&labels, &first)
        .with_context(|| format!("in {}", args.first.display()))?;
    let p2 = partition_from_rows(&labels, &second)
        .with_context(|| format!("in {}", args.second.display()))?;
    let mut report = CompareReport {
        nmi: nmi(&p1, &p2)?,
        n: labels.len(),
        k_first: p1.community_count(),
        k_second: p2.community_count(),
        objective: None,
        score_first: None,
        score_second: None,
        delta: None,
    };
    if let Some(g) = &graph {
        let kind = ObjectiveKind::from(args.objective);
        let (s1, s2) = (score(kind, g, &p1)?, score(kind, g, &p2)?);
        report.objective = Some(kind);
        report.score_first = Some(s1);
        report.score_second = Some(s2);
        report.delta = Some(s1 - s2);
    }
    print_json(&report)?;
    Ok(0)
}

/// Paths written by `gen` for a given prefix.
pub fn gen_paths(prefix: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    (with(".edges"), with(".truth.csv"), with(".meta.json"))
}

pub fn gen(args: &GenArgs) -> Result<u8> {
    let spec = PlantedSpec::new(args.n, args.k, args.avg_degree, args.mu, args.seed);
    let planted = generate(&spec)?;
    let (edges_path, truth_path, meta_path) = gen_paths(&args.output);

    let mut out = create(&edges_path)?;
    write_edge_list(&planted.graph, &mut out)?;
    out.flush()?;
    save_partition(&truth_path, &planted.graph, &planted.truth)?;
    let mut out = create(&meta_path)?;
    serde_json::to_writer_pretty(&mut out, &planted.meta)?;
    writeln!(out)?;
    out.flush()?;

    print_json(&planted.meta)?;
    report_fixes(&planted.meta);
    Ok(0)
}

fn report_fixes(meta: &PlantedMeta) {
    eprintln!(
        "{} nodes, {} edges, realized mu {:.4}; connectivity fixes: {} intra, {} inter",
        meta.spec.n, meta.edges, meta.realized_mu, meta.intra_fix_edges, meta.inter_fix_edges
    );
}
