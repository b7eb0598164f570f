//! Benchmark harness: runs every algorithm of a manifest on every network,
//! then ranks algorithms per network and summarizes.
//!
//! Ranking: on each network, an algorithm's rank is one plus the number of
//! algorithms with a strictly better score, so tied algorithms share the
//! best rank among them. Ranks are normalized to `(A - r) / (A - 1)` for `A`
//! competing algorithms, giving 1 for the best and 0 for the worst. Failed
//! and timed-out runs score 0.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use combo_core::io::read_partition;
use combo_core::objective::score;
use combo_core::synthgen::generate;
use combo_core::{
    louvain, nmi, optimize, ComboConfig, Graph, LouvainConfig, ObjectiveKind, Partition,
    PlantedSpec,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{load_graph, save_partition};

/// Scores closer than this (relative) count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub networks: Vec<NetworkEntry>,
    pub algorithms: Vec<AlgorithmEntry>,
    #[serde(default)]
    pub external_partitions: Vec<ExternalPartition>,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default = "one")]
    pub jobs: usize,
    #[serde(default)]
    pub timeout_seconds: Option<f64>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkEntry {
    pub id: String,
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub spec: Option<PlantedSpec>,
    /// Ground-truth partition CSV for a network given by `path`.
    #[serde(default)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Combo,
    Louvain,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmEntry {
    pub id: String,
    pub kind: AlgorithmKind,
    #[serde(default)]
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalPartition {
    pub network_id: String,
    pub algorithm_id: String,
    pub path: PathBuf,
    #[serde(default)]
    pub objective: Option<ObjectiveKind>,
}

#[derive(Debug, Clone)]
pub enum Algorithm {
    Combo(ComboConfig),
    Louvain(LouvainConfig),
}

impl Algorithm {
    pub fn objective(&self) -> ObjectiveKind {
        match self {
            Algorithm::Combo(cfg) => cfg.objective,
            Algorithm::Louvain(_) => ObjectiveKind::Modularity,
        }
    }

    fn seed(&self) -> u64 {
        match self {
            Algorithm::Combo(cfg) => cfg.seed,
            Algorithm::Louvain(cfg) => cfg.seed,
        }
    }
}

impl AlgorithmEntry {
    pub fn resolve(&self) -> Result<Algorithm> {
        let config = match &self.config {
            serde_json::Value::Null => serde_json::Value::Object(Default::default()),
            other => other.clone(),
        };
        let ctx = || format!("config of algorithm {:?}", self.id);
        Ok(match self.kind {
            AlgorithmKind::Combo => {
                let cfg: ComboConfig = serde_json::from_value(config).with_context(ctx)?;
                cfg.validate().with_context(ctx)?;
                Algorithm::Combo(cfg)
            }
            AlgorithmKind::Louvain => {
                Algorithm::Louvain(serde_json::from_value(config).with_context(ctx)?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
    Timeout,
}

/// One algorithm run on one network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRecord {
    pub network: String,
    pub algorithm: String,
    pub objective: ObjectiveKind,
    pub repetition: usize,
    pub seed: Option<u64>,
    pub status: Status,
    pub n: Option<usize>,
    pub edges: Option<usize>,
    pub score: Option<f64>,
    pub runtime_seconds: Option<f64>,
    pub k: Option<usize>,
    pub nmi_vs_ground_truth: Option<f64>,
    pub nmi_vs_best: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgorithmSummary {
    pub mean_rank: f64,
    pub mean_percent_of_max: f64,
    /// `None` for externally supplied partitions, which have no runtime.
    pub mean_speed_rank: Option<f64>,
    pub networks: usize,
    pub runs: usize,
    pub failures: usize,
    pub timeouts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObjectiveSummary {
    pub networks: usize,
    pub algorithms: BTreeMap<String, AlgorithmSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub network: String,
    pub algorithm: String,
    pub n: usize,
    pub edges: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub objectives: BTreeMap<ObjectiveKind, ObjectiveSummary>,
    pub runtime: Vec<RuntimeRow>,
    /// Least-squares slope of log(seconds) against log(n), per algorithm.
    pub runtime_slopes: BTreeMap<String, f64>,
}

struct Network {
    id: String,
    graph: std::result::Result<Graph, String>,
    truth: Option<Partition>,
}

fn resolve_path(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn load_network(entry: &NetworkEntry, base: &Path) -> Network {
    let loaded = (|| -> Result<(Graph, Option<Partition>)> {
        match (&entry.path, &entry.spec) {
            (Some(path), None) => {
                let g = load_graph(&resolve_path(base, path))?;
                let truth = match &entry.truth {
                    Some(t) => Some(read_partition(&resolve_path(base, t), g.labels())?),
                    None => None,
                };
                Ok((g, truth))
            }
            (None, Some(spec)) => {
                if entry.truth.is_some() {
                    bail!("generated networks carry their own ground truth");
                }
                let planted = generate(spec)?;
                Ok((planted.graph, Some(planted.truth)))
            }
            _ => bail!("network needs exactly one of \"path\" and \"spec\""),
        }
    })();
    match loaded {
        Ok((g, truth)) => Network {
            id: entry.id.clone(),
            graph: Ok(g),
            truth,
        },
        Err(e) => Network {
            id: entry.id.clone(),
            graph: Err(format!("{e:#}")),
            truth: None,
        },
    }
}

struct Outcome {
    record: BenchRecord,
    partition: Option<Partition>,
}

fn failed(
    network: &str,
    algorithm: &str,
    objective: ObjectiveKind,
    repetition: usize,
    error: String,
) -> Outcome {
    Outcome {
        record: BenchRecord {
            network: network.to_string(),
            algorithm: algorithm.to_string(),
            objective,
            repetition,
            seed: None,
            status: Status::Failed,
            n: None,
            edges: None,
            score: None,
            runtime_seconds: None,
            k: None,
            nmi_vs_ground_truth: None,
            nmi_vs_best: None,
            error: Some(error),
        },
        partition: None,
    }
}

fn run_job(
    net: &Network,
    id: &str,
    alg: &Algorithm,
    repetition: usize,
    timeout: Option<f64>,
) -> Outcome {
    let objective = alg.objective();
    let g = match &net.graph {
        Ok(g) => g,
        Err(e) => return failed(&net.id, id, objective, repetition, e.clone()),
    };
    let seed = alg.seed().wrapping_add(repetition as u64);
    let start = Instant::now();
    let result = match alg {
        Algorithm::Combo(cfg) => {
            let cfg = ComboConfig {
                seed,
                time_limit_secs: match (cfg.time_limit_secs, timeout) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                },
                ..cfg.clone()
            };
            optimize(g, &cfg).map(|r| (r.partition, r.score, r.timed_out))
        }
        Algorithm::Louvain(cfg) => {
            let cfg = LouvainConfig {
                seed,
                ..cfg.clone()
            };
            louvain(g, &cfg).map(|r| (r.partition, r.score, false))
        }
    };
    let runtime = start.elapsed().as_secs_f64();
    let (partition, value, timed_out) = match result {
        Ok(r) => r,
        Err(e) => return failed(&net.id, id, objective, repetition, e.to_string()),
    };
    // louvain has no internal clock, so its timeout is judged afterwards
    let timed_out = timed_out || timeout.is_some_and(|t| runtime > t);
    let mut outcome = Outcome {
        record: BenchRecord {
            network: net.id.clone(),
            algorithm: id.to_string(),
            objective,
            repetition,
            seed: Some(seed),
            status: if timed_out {
                Status::Timeout
            } else {
                Status::Ok
            },
            n: Some(g.node_count()),
            edges: Some(g.edge_count()),
            score: None,
            runtime_seconds: Some(runtime),
            k: None,
            nmi_vs_ground_truth: None,
            nmi_vs_best: None,
            error: None,
        },
        partition: None,
    };
    if !timed_out {
        outcome.record.score = Some(value);
        outcome.record.k = Some(partition.community_count());
        outcome.record.nmi_vs_ground_truth =
            net.truth.as_ref().and_then(|t| nmi(&partition, t).ok());
        outcome.partition = Some(partition);
    }
    outcome
}

fn score_external(net: &Network, ext: &ExternalPartition, base: &Path) -> Outcome {
    let objective = ext.objective.unwrap_or(ObjectiveKind::Modularity);
    let g = match &net.graph {
        Ok(g) => g,
        Err(e) => return failed(&net.id, &ext.algorithm_id, objective, 0, e.clone()),
    };
    let scored = read_partition(&resolve_path(base, &ext.path), g.labels())
        .and_then(|p| score(objective, g, &p).map(|s| (p, s)));
    match scored {
        Ok((p, s)) => Outcome {
            record: BenchRecord {
                network: net.id.clone(),
                algorithm: ext.algorithm_id.clone(),
                objective,
                repetition: 0,
                seed: None,
                status: Status::Ok,
                n: Some(g.node_count()),
                edges: Some(g.edge_count()),
                score: Some(s),
                runtime_seconds: None,
                k: Some(p.community_count()),
                nmi_vs_ground_truth: net.truth.as_ref().and_then(|t| nmi(&p, t).ok()),
                nmi_vs_best: None,
                error: None,
            },
            partition: Some(p),
        },
        Err(e) => failed(&net.id, &ext.algorithm_id, objective, 0, e.to_string()),
    }
}

fn is_better(a: f64, b: f64, higher_better: bool) -> bool {
    let tol = TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0);
    if higher_better {
        a > b + tol
    } else {
        a < b - tol
    }
}

/// Normalized ranks in `[0, 1]`; `None` entries (failures) get 0.
pub fn normalized_ranks(values: &[Option<f64>], higher_better: bool) -> Vec<f64> {
    let a = values.len();
    values
        .iter()
        .map(|v| {
            let Some(v) = *v else { return 0.0 };
            if a == 1 {
                return 1.0;
            }
            let rank = 1 + values
                .iter()
                .flatten()
                .filter(|&&u| is_better(u, v, higher_better))
                .count();
            (a - rank) as f64 / (a - 1) as f64
        })
        .collect()
}

/// Score as a percentage of the best score among `values`; failures get 0.
///
/// For minimized objectives the ratio is inverted so the best is still 100.
/// When the best score is not positive, tied entries get 100 and the rest 0.
pub fn percent_of_best(values: &[Option<f64>], higher_better: bool) -> Vec<f64> {
    let best =
        values
            .iter()
            .flatten()
            .copied()
            .reduce(|x, y| if is_better(y, x, higher_better) { y } else { x });
    values
        .iter()
        .map(|v| match (*v, best) {
            (Some(v), Some(best)) => {
                if !is_better(best, v, higher_better) {
                    100.0
                } else if higher_better && best > 0.0 {
                    100.0 * v / best
                } else if !higher_better && best > 0.0 {
                    100.0 * best / v
                } else {
                    0.0
                }
            }
            _ => 0.0,
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`; needs two distinct `x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len() as f64;
    if logs.len() < 2 {
        return None;
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn runs_of<'a>(
    records: &'a [BenchRecord],
    network: &'a str,
    algorithm: &'a str,
    objective: ObjectiveKind,
) -> impl Iterator<Item = &'a BenchRecord> + 'a {
    records.iter().filter(move |r| {
        r.network == network && r.algorithm == algorithm && r.objective == objective
    })
}

/// Per-objective ranking summary and runtime table from finished records.
pub fn summarize(records: &[BenchRecord]) -> Summary {
    // network order and competitor order follow first appearance
    let mut networks: Vec<&str> = Vec::new();
    let mut competitors: BTreeMap<ObjectiveKind, Vec<&str>> = BTreeMap::new();
    for r in records {
        if !networks.contains(&r.network.as_str()) {
            networks.push(&r.network);
        }
        let list = competitors.entry(r.objective).or_default();
        if !list.contains(&r.algorithm.as_str()) {
            list.push(&r.algorithm);
        }
    }

    let mut objectives = BTreeMap::new();
    for (&objective, algorithms) in &competitors {
        let higher = objective.maximizes();
        let mut rank_sum = vec![0.0; algorithms.len()];
        let mut percent_sum = vec![0.0; algorithms.len()];
        let mut speed_sum = vec![0.0; algorithms.len()];
        let mut speed_count = vec![0usize; algorithms.len()];
        let mut seen = vec![0usize; algorithms.len()];
        let mut counted_networks = 0;
        for &net in &networks {
            let runs = |alg| runs_of(records, net, alg, objective);
            let present: Vec<usize> = (0..algorithms.len())
                .filter(|&i| runs(algorithms[i]).next().is_some())
                .collect();
            if present.is_empty() {
                continue;
            }
            counted_networks += 1;
            let scores: Vec<Option<f64>> = present
                .iter()
                .map(|&i| {
                    let ok: Vec<f64> = runs(algorithms[i])
                        .filter(|r| r.status == Status::Ok)
                        .filter_map(|r| r.score)
                        .collect();
                    // any failed or timed-out repetition sinks the algorithm on this network
                    let all_ok = runs(algorithms[i]).all(|r| r.status == Status::Ok);
                    if all_ok {
                        mean(ok.into_iter())
                    } else {
                        None
                    }
                })
                .collect();
            let ranks = normalized_ranks(&scores, higher);
            let percents = percent_of_best(&scores, higher);
            for (j, &i) in present.iter().enumerate() {
                rank_sum[i] += ranks[j];
                percent_sum[i] += percents[j];
                seen[i] += 1;
            }
            // externally supplied partitions have no runtime and sit out the speed ranking
            let timed: Vec<usize> = present
                .iter()
                .copied()
                .filter(|&i| {
                    runs(algorithms[i])
                        .any(|r| r.runtime_seconds.is_some() || r.status != Status::Ok)
                })
                .collect();
            let times: Vec<Option<f64>> = timed
                .iter()
                .map(|&i| {
                    let all_ok = runs(algorithms[i]).all(|r| r.status == Status::Ok);
                    if all_ok {
                        mean(runs(algorithms[i]).filter_map(|r| r.runtime_seconds))
                    } else {
                        None
                    }
                })
                .collect();
            for (j, &i) in timed.iter().enumerate() {
                speed_sum[i] += normalized_ranks(&times, false)[j];
                speed_count[i] += 1;
            }
        }
        let mut table = BTreeMap::new();
        for (i, alg) in algorithms.iter().enumerate() {
            let mine = || {
                records
                    .iter()
                    .filter(|r| r.algorithm == *alg && r.objective == objective)
            };
            let denom = seen[i].max(1) as f64;
            table.insert(
                alg.to_string(),
                AlgorithmSummary {
                    mean_rank: rank_sum[i] / denom,
                    mean_percent_of_max: percent_sum[i] / denom,
                    mean_speed_rank: (speed_count[i] > 0)
                        .then(|| speed_sum[i] / speed_count[i] as f64),
                    networks: seen[i],
                    runs: mine().count(),
                    failures: mine().filter(|r| r.status == Status::Failed).count(),
                    timeouts: mine().filter(|r| r.status == Status::Timeout).count(),
                },
            );
        }
        objectives.insert(
            objective,
            ObjectiveSummary {
                networks: counted_networks,
                algorithms: table,
            },
        );
    }

    let mut runtime = Vec::new();
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    for r in records {
        if r.runtime_seconds.is_some() && !pairs.contains(&(&r.network, &r.algorithm)) {
            pairs.push((&r.network, &r.algorithm));
        }
    }
    for (net, alg) in pairs {
        let ok: Vec<&BenchRecord> = records
            .iter()
            .filter(|r| {
                r.network == net
                    && r.algorithm == alg
                    && r.status == Status::Ok
                    && r.runtime_seconds.is_some()
            })
            .collect();
        let Some(seconds) = mean(ok.iter().filter_map(|r| r.runtime_seconds)) else {
            continue;
        };
        runtime.push(RuntimeRow {
            network: net.to_string(),
            algorithm: alg.to_string(),
            n: ok[0].n.unwrap_or(0),
            edges: ok[0].edges.unwrap_or(0),
            seconds,
        });
    }
    let mut by_alg: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in &runtime {
        by_alg
            .entry(row.algorithm.clone())
            .or_default()
            .push((row.n as f64, row.seconds));
    }
    let runtime_slopes = by_alg
        .into_iter()
        .filter_map(|(alg, pts)| loglog_slope(&pts).map(|s| (alg, s)))
        .collect();
    Summary {
        objectives,
        runtime,
        runtime_slopes,
    }
}

/// Fills `nmi_vs_best`: NMI against the best-scoring run of the same
/// objective on the same network.
fn attach_nmi_vs_best(outcomes: &mut [Outcome]) {
    let mut best: HashMap<(String, ObjectiveKind), usize> = HashMap::new();
    for (i, o) in outcomes.iter().enumerate() {
        let (Some(s), Some(_)) = (o.record.score, &o.partition) else {
            continue;
        };
        let key = (o.record.network.clone(), o.record.objective);
        let better = match best.get(&key) {
            Some(&j) => is_better(
                s,
                outcomes[j].record.score.unwrap_or(f64::NAN),
                o.record.objective.maximizes(),
            ),
            None => true,
        };
        if better {
            best.insert(key, i);
        }
    }
    let refs: Vec<Option<Partition>> = outcomes
        .iter()
        .map(|o| {
            best.get(&(o.record.network.clone(), o.record.objective))
                .and_then(|&j| outcomes[j].partition.clone())
        })
        .collect();
    for (o, reference) in outcomes.iter_mut().zip(refs) {
        if let (Some(p), Some(r)) = (&o.partition, reference) {
            o.record.nmi_vs_best = nmi(p, &r).ok();
        }
    }
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub records: PathBuf,
    pub summary: PathBuf,
    pub runtime: PathBuf,
    pub ok: usize,
    pub failed: usize,
    pub timeouts: usize,
}

/// Runs a manifest and writes `records.csv`, `summary.json`, `runtime.csv`
/// and one partition CSV per successful run into `out_dir`.
pub fn run_manifest(
    manifest_path: &Path,
    out_dir: &Path,
    jobs: Option<usize>,
) -> Result<(BenchReport, Summary)> {
    let text = fs::read_to_string(manifest_path)
        .with_context(|| format!("reading {}", manifest_path.display()))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .with_context(|| format!("parsing manifest {}", manifest_path.display()))?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let algorithms: Vec<(String, Algorithm)> = manifest
        .algorithms
        .iter()
        .map(|a| Ok((a.id.clone(), a.resolve()?)))
        .collect::<Result<_>>()?;
    let mut ids: Vec<&str> = manifest.networks.iter().map(|n| n.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        bail!("duplicate network id {:?}", w[0]);
    }
    if let Some(t) = manifest.timeout_seconds.filter(|t| !(*t > 0.0)) {
        bail!("timeout_seconds must be positive, got {t}");
    }
    let threads = jobs.unwrap_or(manifest.jobs).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;

    let networks: Vec<Network> = pool.install(|| {
        manifest
            .networks
            .par_iter()
            .map(|n| load_network(n, base))
            .collect()
    });
    let mut tasks: Vec<(usize, usize, usize)> = Vec::new();
    for ni in 0..networks.len() {
        for ai in 0..algorithms.len() {
            for rep in 0..manifest.repetitions {
                tasks.push((ni, ai, rep));
            }
        }
    }
    let mut outcomes: Vec<Outcome> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(ni, ai, rep)| {
                let (id, alg) = &algorithms[ai];
                run_job(&networks[ni], id, alg, rep, manifest.timeout_seconds)
            })
            .collect()
    });
    for ext in &manifest.external_partitions {
        let Some(net) = networks.iter().find(|n| n.id == ext.network_id) else {
            bail!(
                "external partition names unknown network {:?}",
                ext.network_id
            );
        };
        outcomes.push(score_external(net, ext, base));
    }
    attach_nmi_vs_best(&mut outcomes);

    let parts_dir = out_dir.join("partitions");
    fs::create_dir_all(&parts_dir).with_context(|| format!("creating {}", parts_dir.display()))?;
    for (o, &(ni, _, _)) in outcomes.iter().zip(&tasks) {
        if let (Some(p), Ok(g)) = (&o.partition, &networks[ni].graph) {
            let name = format!(
                "{}__{}__{}.csv",
                file_stem(&o.record.network),
                file_stem(&o.record.algorithm),
                o.record.repetition
            );
            save_partition(&parts_dir.join(name), g, p)?;
        }
    }

    let records: Vec<BenchRecord> = outcomes.into_iter().map(|o| o.record).collect();
    let records_path = out_dir.join("records.csv");
    let mut w = csv::Writer::from_path(&records_path)
        .with_context(|| format!("creating {}", records_path.display()))?;
    for r in &records {
        w.serialize(r)?;
    }
    w.flush()?;

    let summary = summarize(&records);
    let summary_path = out_dir.join("summary.json");
    let mut f = fs::File::create(&summary_path)?;
    serde_json::to_writer_pretty(&mut f, &summary)?;
    writeln!(f)?;

    let runtime_path = out_dir.join("runtime.csv");
    let mut w = csv::Writer::from_path(&runtime_path)?;
    for row in &summary.runtime {
        w.serialize(row)?;
    }
    if summary.runtime.is_empty() {
        w.write_record(["network", "algorithm", "n", "edges", "seconds"])?;
    }
    w.flush()?;

    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let report = BenchReport {
        records: records_path,
        summary: summary_path,
        runtime: runtime_path,
        ok: count(Status::Ok),
        failed: count(Status::Failed),
        timeouts: count(Status::Timeout),
    };
    Ok((report, summary))
}
