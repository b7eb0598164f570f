//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line; the process fails if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use combo_cli::bench::loglog_slope;
use combo_core::objective::{brute_force_best, codelength, ObjectiveState};
use combo_core::synthgen::{generate, Planted, PlantedSpec};
use combo_core::{
    louvain, nmi, optimize, ComboConfig, Graph, LouvainConfig, ObjectiveKind, Partition,
};
use common::{codelength_oracle, modularity_oracle, random_connected, rng};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Verdict = (bool, String);

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_combo")
}

fn karate() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/karate.edges")
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(bin()).args(args).output().expect("run combo")
}

fn last_json(out: &std::process::Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().last().unwrap_or("null")).unwrap_or(serde_json::Value::Null)
}

fn karate_modularity() -> Verdict {
    let started = Instant::now();
    let out = run(&[
        "detect",
        "--input",
        karate().to_str().unwrap(),
        "--algorithm",
        "combo",
        "--objective",
        "modularity",
    ]);
    let elapsed = started.elapsed().as_secs_f64();
    let report = last_json(&out);
    let q = report["score"].as_f64().unwrap_or(f64::NAN);
    let k = report["k"].as_u64().unwrap_or(0);
    let pass = out.status.success() && q >= 0.419790 - 1e-6 && elapsed < 5.0 && k == 4;
    (pass, format!("Q = {q:.7}, k = {k}, {elapsed:.3}s wall"))
}

fn micro_optimality() -> Verdict {
    let started = Instant::now();
    let mut r = rng(2024);
    let total = 240;
    let (mut equal, mut exceeded) = (0, 0);
    for i in 0..total {
        let n = 3 + i % 6;
        let extra = r.random_range(0..=n);
        let g = random_connected(n, extra, i % 2 == 0, &mut r);
        let (_, best) = brute_force_best(&g, ObjectiveKind::Modularity).unwrap();
        let c = optimize(
            &g,
            &ComboConfig {
                seed: i as u64,
                ..Default::default()
            },
        )
        .unwrap();
        if c.score > best + 1e-9 {
            exceeded += 1;
        }
        if (c.score - best).abs() <= 1e-9 {
            equal += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let share = equal as f64 / total as f64;
    let pass = share >= 0.95 && exceeded == 0 && elapsed < 120.0;
    (
        pass,
        format!(
            "{equal}/{total} optimal ({:.1}%), {exceeded} above optimum, {elapsed:.1}s",
            100.0 * share
        ),
    )
}

struct Head2Head {
    mu: f64,
    combo_q: f64,
    louvain_q: f64,
    combo_nmi: f64,
    louvain_nmi: f64,
}

/// Four mixing levels, five graphs each, generator seeds 0..20.
fn planted_corpus() -> Vec<Planted> {
    let mut out = Vec::new();
    for (i, mu) in [0.2, 0.3, 0.4, 0.5].into_iter().enumerate() {
        for j in 0..5 {
            out.push(generate(&PlantedSpec::new(1000, 10, 16.0, mu, (5 * i + j) as u64)).unwrap());
        }
    }
    out
}

fn head_to_head(corpus: &[Planted]) -> Vec<Head2Head> {
    corpus
        .iter()
        .map(|p| {
            let c = optimize(&p.graph, &ComboConfig::default()).unwrap();
            let l = louvain(&p.graph, &LouvainConfig::default()).unwrap();
            Head2Head {
                mu: p.meta.spec.mu,
                combo_q: c.score,
                louvain_q: l.score,
                combo_nmi: nmi(&c.partition, &p.truth).unwrap(),
                louvain_nmi: nmi(&l.partition, &p.truth).unwrap(),
            }
        })
        .collect()
}

fn dominance(rows: &[Head2Head]) -> Verdict {
    let below: Vec<String> = rows
        .iter()
        .filter(|r| r.combo_q < r.louvain_q - 1e-9)
        .map(|r| format!("mu {} by {:.2e}", r.mu, r.louvain_q - r.combo_q))
        .collect();
    let strictly = rows
        .iter()
        .filter(|r| r.combo_q > r.louvain_q + 1e-9)
        .count();
    let pass = below.is_empty() && 2 * strictly >= rows.len();
    let per_mu: Vec<String> = [0.2, 0.3, 0.4, 0.5]
        .iter()
        .map(|&mu| {
            let group = rows.iter().filter(|r| r.mu == mu);
            let wins = group
                .clone()
                .filter(|r| r.combo_q > r.louvain_q + 1e-9)
                .count();
            format!("mu {mu}: {wins}/{}", group.count())
        })
        .collect();
    let mut detail = format!(
        "Combo > Louvain on {strictly}/{} [{}], below on {}",
        rows.len(),
        per_mu.join(", "),
        below.len()
    );
    if !below.is_empty() {
        detail.push_str(&format!(" ({})", below.join(", ")));
    }
    (pass, detail)
}

fn better_q_better_nmi(rows: &[Head2Head]) -> Verdict {
    let clear: Vec<&Head2Head> = rows
        .iter()
        .filter(|r| r.combo_q - r.louvain_q > 1e-4)
        .collect();
    let agree = clear
        .iter()
        .filter(|r| r.combo_nmi >= r.louvain_nmi)
        .count();
    let pass = clear.is_empty() || agree as f64 >= 0.9 * clear.len() as f64;
    let misses: Vec<String> = clear
        .iter()
        .filter(|r| r.combo_nmi < r.louvain_nmi)
        .map(|r| {
            format!(
                "mu {}: dQ {:.1e}, NMI {:.4} vs {:.4}",
                r.mu,
                r.combo_q - r.louvain_q,
                r.combo_nmi,
                r.louvain_nmi
            )
        })
        .collect();
    let mut detail = format!(
        "NMI ordering holds on {agree}/{} graphs with dQ > 1e-4",
        clear.len()
    );
    if !misses.is_empty() {
        detail.push_str(&format!(" (misses: {})", misses.join("; ")));
    }
    (pass, detail)
}

fn random_case(r: &mut ChaCha8Rng) -> (Graph, Vec<usize>, usize, usize) {
    let n = r.random_range(2..=24);
    let m = r.random_range(1..=3 * n);
    let edges: Vec<(usize, usize, f64)> = (0..m)
        .map(|_| {
            (
                r.random_range(0..n),
                r.random_range(0..n),
                r.random_range(0.1..5.0),
            )
        })
        .collect();
    let g = Graph::from_edges(n, &edges).unwrap();
    let k = r.random_range(1..=n.min(6));
    let labels: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
    let v = r.random_range(0..n);
    // any existing label, or one past the largest for a new community
    let top = labels.iter().max().unwrap() + 1;
    let to = r.random_range(0..=top);
    (g, labels, v, to)
}

fn gain_consistency() -> Verdict {
    let mut r = rng(5);
    let mut worst = [0.0f64; 2];
    let mut failures = [0usize; 2];
    let mut invariant_failures = 0;
    for (slot, kind) in [ObjectiveKind::Modularity, ObjectiveKind::CodeLength]
        .into_iter()
        .enumerate()
    {
        for _ in 0..10_000 {
            let (g, labels, v, to) = random_case(&mut r);
            let state = ObjectiveState::new(&g, &labels, kind).unwrap();
            let gain = state.move_gain(&g, &labels, v, to);
            let mut after = labels.clone();
            after[v] = to;
            let score = |l: &[usize]| match kind {
                ObjectiveKind::Modularity => modularity_oracle(&g, l),
                ObjectiveKind::CodeLength => codelength_oracle(&g, l),
            };
            let (b, a) = (score(&labels), score(&after));
            let err = (gain - (kind.oriented(a) - kind.oriented(b))).abs()
                / b.abs().max(a.abs()).max(1.0);
            worst[slot] = worst[slot].max(err);
            if err > 1e-9 {
                failures[slot] += 1;
            }
            if kind == ObjectiveKind::CodeLength {
                let rates: f64 = (0..state.slots()).map(|c| state.visit_rate(c)).sum();
                let single = ObjectiveState::new(&g, &vec![0; g.node_count()], kind).unwrap();
                if (rates - 1.0).abs() > 1e-12 || single.exit_total() != 0.0 {
                    invariant_failures += 1;
                }
            }
        }
    }
    let pass = failures == [0, 0] && invariant_failures == 0;
    (
        pass,
        format!(
            "max relative error {:.1e} (modularity), {:.1e} (code length); {} + {} mismatches, {} state invariant failures",
            worst[0], worst[1], failures[0], failures[1], invariant_failures
        ),
    )
}

fn codelength_sanity(corpus: &[Planted]) -> Verdict {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut checked = 0;
    for p in corpus.iter().filter(|p| p.meta.spec.mu <= 0.3) {
        checked += 1;
        let n = p.graph.node_count();
        let c = optimize(&p.graph, &ComboConfig::new(ObjectiveKind::CodeLength)).unwrap();
        let single = codelength(&p.graph, &Partition::single(n)).unwrap();
        let alone = codelength(&p.graph, &Partition::singletons(n)).unwrap();
        let similarity = nmi(&c.partition, &p.truth).unwrap();
        let ok = c.score < single && c.score < alone && similarity >= 0.9;
        pass &= ok;
        if !ok {
            lines.push(format!(
                "mu {}: L {:.4} vs {:.4}/{:.4}, NMI {:.4}",
                p.meta.spec.mu, c.score, single, alone, similarity
            ));
        }
    }
    let mut detail = format!(
        "{}/{checked} graphs below both trivial code lengths with NMI >= 0.9",
        checked - lines.len()
    );
    if !lines.is_empty() {
        detail.push_str(&format!(" (failing: {})", lines.join("; ")));
    }
    (pass, detail)
}

fn random_tries_effect() -> Verdict {
    let (mut q0, mut q2, mut t0, mut t2) = (0.0, 0.0, 0.0, 0.0);
    let graphs = 20;
    for seed in 0..graphs {
        let p = generate(&PlantedSpec::new(1000, 10, 16.0, 0.5, 100 + seed)).unwrap();
        for (tries, q, t) in [(0, &mut q0, &mut t0), (2, &mut q2, &mut t2)] {
            let started = Instant::now();
            let r = optimize(
                &p.graph,
                &ComboConfig {
                    tries,
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            *t += started.elapsed().as_secs_f64();
            *q += r.score;
        }
    }
    let n = graphs as f64;
    let (q0, q2, t0, t2) = (q0 / n, q2 / n, t0 / n, t2 / n);
    let pass = q2 >= q0 && t2 > t0;
    (
        pass,
        format!(
            "mean Q {q2:.6} (tries 2) vs {q0:.6} (tries 0), {:+.2}%; mean time {t2:.2}s vs {t0:.2}s, x{:.2}",
            100.0 * (q2 - q0) / q0,
            t2 / t0
        ),
    )
}

fn runtime_scaling() -> Verdict {
    let mut points = Vec::new();
    let mut largest: f64 = 0.0;
    let mut per_n = Vec::new();
    for n in [250usize, 500, 1000, 2000, 4000] {
        let mut total = 0.0;
        for seed in 0..3 {
            let p = generate(&PlantedSpec::new(n, 10, 16.0, 0.3, 1000 + seed)).unwrap();
            let started = Instant::now();
            optimize(
                &p.graph,
                &ComboConfig {
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            let t = started.elapsed().as_secs_f64();
            points.push((n as f64, t));
            total += t;
            if n == 4000 {
                largest = largest.max(t);
            }
        }
        per_n.push(format!("{n}: {:.2}s", total / 3.0));
    }
    let slope = loglog_slope(&points).unwrap_or(f64::NAN);
    let pass = (1.2..=2.6).contains(&slope) && largest < 1800.0;
    (
        pass,
        format!("slope {slope:.2}; mean times {}", per_n.join(", ")),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let path = |name: &str| d.join(name).to_str().unwrap().to_string();
    let k = karate().to_str().unwrap().to_string();
    let mut mismatches = Vec::new();
    let compare_files = |mismatches: &mut Vec<String>, label: &str, a: &str, b: &str| match (
        fs::read(a),
        fs::read(b),
    ) {
        (Ok(x), Ok(y)) if x == y && !x.is_empty() => {}
        _ => mismatches.push(label.to_string()),
    };

    for run_id in ["a", "b"] {
        run(&[
            "gen",
            "--n",
            "600",
            "--k",
            "6",
            "--mu",
            "0.4",
            "--seed",
            "9",
            "--output",
            &path(&format!("g{run_id}")),
        ]);
    }
    compare_files(
        &mut mismatches,
        "gen edges",
        &path("ga.edges"),
        &path("gb.edges"),
    );
    compare_files(
        &mut mismatches,
        "gen truth",
        &path("ga.truth.csv"),
        &path("gb.truth.csv"),
    );
    let planted = path("ga.edges");

    let detects: Vec<(&str, Vec<&str>)> = vec![
        ("combo karate", vec!["--input", &k]),
        (
            "combo codelength",
            vec![
                "--input",
                &planted,
                "--objective",
                "codelength",
                "--seed",
                "4",
            ],
        ),
        (
            "combo planted",
            vec!["--input", &planted, "--seed", "11", "--tries", "3"],
        ),
        (
            "louvain planted",
            vec!["--input", &planted, "--algorithm", "louvain", "--seed", "5"],
        ),
    ];
    for (i, (label, args)) in detects.iter().enumerate() {
        for run_id in ["a", "b"] {
            let out = path(&format!("d{i}{run_id}.csv"));
            let mut full = vec!["detect"];
            full.extend(args.iter().copied());
            full.extend(["--output", &out]);
            run(&full);
        }
        compare_files(
            &mut mismatches,
            label,
            &path(&format!("d{i}a.csv")),
            &path(&format!("d{i}b.csv")),
        );
    }

    let c1 = run(&[
        "compare",
        &path("d2a.csv"),
        &path("d3a.csv"),
        "--graph",
        &planted,
    ]);
    let c2 = run(&[
        "compare",
        &path("d2a.csv"),
        &path("d3a.csv"),
        "--graph",
        &planted,
    ]);
    if c1.stdout != c2.stdout || c1.stdout.is_empty() {
        mismatches.push("compare".into());
    }

    let manifest = serde_json::json!({
        "networks": [{"id": "karate", "path": k}, {"id": "p", "spec": {"n": 300, "k": 5, "avg_degree": 12.0, "mu": 0.35, "seed": 2}}],
        "algorithms": [{"id": "combo", "kind": "combo", "config": {"seed": 8}}, {"id": "louvain", "kind": "louvain"}],
        "repetitions": 2,
        "jobs": 4
    });
    fs::write(path("manifest.json"), manifest.to_string()).unwrap();
    for run_id in ["a", "b"] {
        run(&[
            "bench",
            &path("manifest.json"),
            "--out-dir",
            &path(&format!("bench{run_id}")),
        ]);
    }
    for net in ["karate", "p"] {
        for alg in ["combo", "louvain"] {
            for rep in 0..2 {
                let name = format!("{net}__{alg}__{rep}.csv");
                compare_files(
                    &mut mismatches,
                    &format!("bench {name}"),
                    &path(&format!("bencha/partitions/{name}")),
                    &path(&format!("benchb/partitions/{name}")),
                );
            }
        }
    }
    let detail = if mismatches.is_empty() {
        "gen, detect (4 variants), compare and bench outputs byte-identical across runs".to_string()
    } else {
        format!("differences in: {}", mismatches.join(", "))
    };
    (mismatches.is_empty(), detail)
}

fn nmi_unit_values() -> Verdict {
    let p = |l: &[usize]| Partition::new(l.to_vec());
    let mut errors: Vec<f64> = Vec::new();
    for labels in [
        &[0, 0, 1, 1][..],
        &[0, 1, 2, 0, 1, 2],
        &[3, 3, 1, 1, 1, 9, 9, 0],
    ] {
        errors.push((nmi(&p(labels), &p(labels)).unwrap() - 1.0).abs());
    }
    errors.push((nmi(&p(&[0, 0, 1, 1]), &p(&[1, 1, 0, 0])).unwrap() - 1.0).abs());
    errors.push((nmi(&p(&[0, 0, 1, 1, 2]), &p(&[7, 7, 4, 4, 5])).unwrap() - 1.0).abs());
    errors.push(nmi(&p(&[0, 0, 1, 1]), &p(&[0, 1, 0, 1])).unwrap().abs());
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    (
        worst <= 1e-12,
        format!("max deviation {worst:.1e} over {} cases", errors.len()),
    )
}

fn main() {
    let started = Instant::now();
    let mut results: Vec<(u8, &str, Verdict, f64)> = Vec::new();
    let mut record = |id: u8, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let verdict = f();
        let secs = t.elapsed().as_secs_f64();
        println!(
            "[{}] {id:>2} {name}: {} ({secs:.1}s)",
            if verdict.0 { "PASS" } else { "FAIL" },
            verdict.1
        );
        results.push((id, name, verdict, secs));
    };

    record(1, "karate club modularity", &mut karate_modularity);
    record(2, "micro-instance optimality", &mut micro_optimality);
    let t = Instant::now();
    let corpus = planted_corpus();
    let rows = head_to_head(&corpus);
    println!(
        "planted corpus: {} graphs, both algorithms run in {:.1}s",
        rows.len(),
        t.elapsed().as_secs_f64()
    );
    record(3, "dominance over Louvain", &mut || dominance(&rows));
    record(4, "better modularity, better NMI", &mut || {
        better_q_better_nmi(&rows)
    });
    record(5, "gain consistency", &mut gain_consistency);
    record(6, "code length sanity", &mut || codelength_sanity(&corpus));
    record(7, "random tries effect", &mut random_tries_effect);
    record(8, "runtime scaling", &mut runtime_scaling);
    record(9, "determinism", &mut determinism);
    record(10, "NMI unit values", &mut nmi_unit_values);

    let failed: Vec<u8> = results.iter().filter(|r| !r.2 .0).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        results.len() - failed.len(),
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
