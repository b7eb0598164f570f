//! Text formats: whitespace edge lists, a Pajek subset, and partition CSVs.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::partition::Partition;

fn is_comment(line: &str) -> bool {
    line.starts_with('#') || line.starts_with('%')
}

fn parse_weight(token: &str, line: usize) -> Result<f64> {
    let w: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid weight {token:?}"),
    })?;
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::Validation(format!(
            "line {line}: weight must be positive, got {w}"
        )));
    }
    Ok(w)
}

/// Parses `u v [w]` lines. Labels are arbitrary tokens mapped to ids in
/// order of first appearance; a missing weight defaults to 1.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut builder = GraphBuilder::new();
    let mut any = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let w = match tokens.len() {
            2 => 1.0,
            3 => parse_weight(tokens[2], line_no)?,
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected \"u v\" or \"u v w\", got {} fields", tokens.len()),
                })
            }
        };
        builder.add_labelled_edge(tokens[0], tokens[1], w)?;
        any = true;
    }
    if !any {
        return Err(Error::EmptyGraph);
    }
    builder.build()
}

fn vertex_label(rest: &str, id: &str) -> String {
    let rest = rest.trim_start();
    if let Some(stripped) = rest.strip_prefix('"') {
        if let Some(end) = stripped.find('"') {
            return stripped[..end].to_string();
        }
    }
    match rest.split_whitespace().next() {
        Some(tok) => tok.to_string(),
        None => id.to_string(),
    }
}

/// Reads the `*Vertices` / `*Edges` subset of the Pajek `.net` format.
///
/// Node ids follow Pajek vertex numbers; vertices without a label line are
/// named by their number.
pub fn parse_pajek(text: &str) -> Result<Graph> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Vertices,
        Edges,
    }
    let mut section = Section::None;
    let mut names: Vec<Option<String>> = Vec::new();
    let mut builder: Option<GraphBuilder> = None;

    fn finalize(names: &[Option<String>]) -> Result<GraphBuilder> {
        let mut b = GraphBuilder::new();
        for (i, name) in names.iter().enumerate() {
            let label = name.clone().unwrap_or_else(|| (i + 1).to_string());
            if b.node(&label) != i {
                return Err(Error::Validation(format!(
                    "duplicate vertex label {label:?}"
                )));
            }
        }
        Ok(b)
    }

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(header) = line.strip_prefix('*') {
            let mut parts = header.split_whitespace();
            let name = parts.next().unwrap_or("").to_ascii_lowercase();
            match name.as_str() {
                "vertices" if section == Section::None => {
                    let declared: usize =
                        parts
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| Error::Parse {
                                line: line_no,
                                message: "*Vertices needs a node count".into(),
                            })?;
                    if declared == 0 {
                        return Err(Error::EmptyGraph);
                    }
                    names = vec![None; declared];
                    section = Section::Vertices;
                }
                "edges" if section == Section::Vertices => {
                    builder = Some(finalize(&names)?);
                    section = Section::Edges;
                }
                "vertices" | "edges" => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unexpected *{name} section"),
                    })
                }
                other => {
                    return Err(Error::Unsupported(format!(
                        "Pajek section *{other} (line {line_no})"
                    )))
                }
            }
            continue;
        }
        match section {
            Section::None => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "data outside any section".into(),
                })
            }
            Section::Vertices => {
                let mut split = line.splitn(2, char::is_whitespace);
                let id = split.next().unwrap();
                let num: usize = id.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid vertex id {id:?}"),
                })?;
                if num == 0 || num > names.len() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("vertex id {num} outside 1..={}", names.len()),
                    });
                }
                names[num - 1] = Some(vertex_label(split.next().unwrap_or(""), id));
            }
            Section::Edges => {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if tokens.len() < 2 || tokens.len() > 3 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected \"u v\" or \"u v w\"".into(),
                    });
                }
                let lookup = |t: &str| match t.parse::<usize>() {
                    Ok(k) if k >= 1 && k <= names.len() => Ok(k - 1),
                    _ => Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown vertex {t:?}"),
                    }),
                };
                let u = lookup(tokens[0])?;
                let v = lookup(tokens[1])?;
                let w = if tokens.len() == 3 {
                    parse_weight(tokens[2], line_no)?
                } else {
                    1.0
                };
                builder.as_mut().unwrap().add_edge(u, v, w)?;
            }
        }
    }
    match (section, builder) {
        (Section::None, _) => Err(Error::EmptyGraph),
        (_, Some(b)) => b.build(),
        (_, None) => finalize(&names)?.build(),
    }
}

/// Loads a graph, choosing the Pajek reader for `.net` files.
pub fn read_graph(path: &Path) -> Result<Graph> {
    let mut text = String::new();
    fs::File::open(path)?.read_to_string(&mut text)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("net") => parse_pajek(&text),
        _ => parse_edge_list(&text),
    }
}

/// Serializes as `u v w` lines using node labels.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    for &(u, v, w) in g.edges() {
        writeln!(out, "{} {} {}", g.label(u), g.label(v), w)?;
    }
    Ok(())
}

#[derive(Debug, serde::Serialize, serde::Deserialize)]
struct PartitionRow {
    node: String,
    community: String,
}

/// Reads `node,community` rows as raw strings, in file order.
pub fn read_partition_rows<R: Read>(input: R) -> Result<Vec<(String, String)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "node" || &headers[1] != "community" {
        return Err(Error::Validation(format!(
            "partition header must be \"node,community\", got {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for rec in reader.deserialize() {
        let row: PartitionRow = rec?;
        rows.push((row.node, row.community));
    }
    Ok(rows)
}

/// Aligns `node,community` rows to the node ids of `labels`.
///
/// Every label must appear exactly once; the result is compacted.
pub fn partition_from_rows(labels: &[String], rows: &[(String, String)]) -> Result<Partition> {
    let index: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let mut assigned: Vec<Option<usize>> = vec![None; labels.len()];
    let mut community_ids: HashMap<&str, usize> = HashMap::new();
    for (node, community) in rows {
        let &v = index
            .get(node.as_str())
            .ok_or_else(|| Error::Validation(format!("partition names unknown node {node:?}")))?;
        if assigned[v].is_some() {
            return Err(Error::Validation(format!("node {node:?} listed twice")));
        }
        let next = community_ids.len();
        assigned[v] = Some(*community_ids.entry(community.as_str()).or_insert(next));
    }
    let labels = assigned
        .into_iter()
        .enumerate()
        .map(|(v, c)| {
            c.ok_or_else(|| {
                Error::Validation(format!("node {:?} missing from partition", labels[v]))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::new(labels).compact())
}

pub fn read_partition(path: &Path, labels: &[String]) -> Result<Partition> {
    let rows = read_partition_rows(fs::File::open(path)?)?;
    partition_from_rows(labels, &rows)
}

/// Writes `node,community` rows in node-id order.
pub fn write_partition<W: Write>(labels: &[String], p: &Partition, out: W) -> Result<()> {
    if labels.len() != p.len() {
        return Err(Error::SizeMismatch {
            left: labels.len(),
            right: p.len(),
        });
    }
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["node", "community"])?;
    for (label, c) in labels.iter().zip(p.labels()) {
        writer.write_record([label.as_str(), &c.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
