//! Plain-text graph, weighted-graph, and clustering files.
//!
//! Signed graph: header `n m`, then `m` lines `u v s` with `s` in `{+,-}`;
//! unlisted pairs are `-`. Weighted graph: header `n m`, then `u v w` with
//! `w` in `[0, 1]`. Clustering: one `vertex cluster_id` line per vertex.
//! Lines starting with `#` and blank lines are ignored everywhere.

use super::{threshold_weighted, DatagenError};
use crate::graph::{Clustering, SignedGraph, Vertex};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Data(#[from] DatagenError),
}

fn malformed(line: usize, message: impl Into<String>) -> IoError {
    IoError::Malformed {
        line,
        message: message.into(),
    }
}

fn read_to_string(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_string(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Non-comment, non-blank lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, trimmed.split_whitespace().collect()))
        }
    })
}

fn parse_field<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> Result<T, IoError> {
    field
        .parse()
        .map_err(|_| malformed(line, format!("invalid {what} `{field}`")))
}

fn parse_header<'a, I>(lines: &mut I) -> Result<(usize, usize), IoError>
where
    I: Iterator<Item = (usize, Vec<&'a str>)>,
{
    let (line, fields) = lines
        .next()
        .ok_or_else(|| malformed(1, "missing `n m` header"))?;
    if fields.len() != 2 {
        return Err(malformed(line, "header must be `n m`"));
    }
    Ok((
        parse_field(line, fields[0], "vertex count")?,
        parse_field(line, fields[1], "edge count")?,
    ))
}

fn parse_endpoints(line: usize, fields: &[&str], n: usize) -> Result<(Vertex, Vertex), IoError> {
    let u: Vertex = parse_field(line, fields[0], "vertex")?;
    let v: Vertex = parse_field(line, fields[1], "vertex")?;
    for x in [u, v] {
        if x >= n {
            return Err(malformed(
                line,
                format!("vertex {x} out of range (n = {n})"),
            ));
        }
    }
    if u == v {
        return Err(malformed(line, format!("self-loop on vertex {u}")));
    }
    Ok((u.min(v), u.max(v)))
}

pub fn parse_graph(text: &str) -> Result<SignedGraph, IoError> {
    let mut lines = content_lines(text);
    let (n, m) = parse_header(&mut lines)?;
    let mut labels: HashMap<(Vertex, Vertex), bool> = HashMap::new();
    let mut count = 0;
    for (line, fields) in lines {
        if fields.len() != 3 {
            return Err(malformed(line, "edge line must be `u v s`"));
        }
        let pair = parse_endpoints(line, &fields, n)?;
        let plus = match fields[2] {
            "+" => true,
            "-" => false,
            other => {
                return Err(malformed(
                    line,
                    format!("sign must be + or -, got `{other}`"),
                ))
            }
        };
        if let Some(&prev) = labels.get(&pair) {
            if prev != plus {
                return Err(malformed(
                    line,
                    format!("pair ({}, {}) listed with both signs", pair.0, pair.1),
                ));
            }
        }
        labels.insert(pair, plus);
        count += 1;
    }
    if count != m {
        return Err(malformed(
            0,
            format!("header declares {m} edges, found {count}"),
        ));
    }
    let plus = labels.into_iter().filter(|&(_, p)| p).map(|(e, _)| e);
    Ok(SignedGraph::new(n, plus).map_err(DatagenError::from)?)
}

/// Canonical text: header, then `+` edges ascending.
pub fn format_graph(g: &SignedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.n(), g.plus_edge_count()).unwrap();
    for (u, v) in g.plus_edges() {
        writeln!(out, "{u} {v} +").unwrap();
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<SignedGraph, IoError> {
    parse_graph(&read_to_string(path.as_ref())?)
}

pub fn write_graph(g: &SignedGraph, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_string(path.as_ref(), &format_graph(g))
}

/// Weighted pairs and vertex count, without thresholding.
pub fn parse_weighted_pairs(text: &str) -> Result<(usize, Vec<(Vertex, Vertex, f64)>), IoError> {
    let mut lines = content_lines(text);
    let (n, m) = parse_header(&mut lines)?;
    let mut pairs = Vec::with_capacity(m);
    for (line, fields) in lines {
        if fields.len() != 3 {
            return Err(malformed(line, "weighted line must be `u v w`"));
        }
        let (u, v) = parse_endpoints(line, &fields, n)?;
        let w: f64 = parse_field(line, fields[2], "weight")?;
        if !(0.0..=1.0).contains(&w) {
            return Err(malformed(line, format!("weight {w} outside [0, 1]")));
        }
        pairs.push((u, v, w));
    }
    if pairs.len() != m {
        return Err(malformed(
            0,
            format!("header declares {m} pairs, found {}", pairs.len()),
        ));
    }
    Ok((n, pairs))
}

pub fn parse_weighted(text: &str) -> Result<SignedGraph, IoError> {
    let (n, pairs) = parse_weighted_pairs(text)?;
    Ok(threshold_weighted(&pairs, n)?)
}

/// Reads a weighted graph and rounds it at weight 1/2.
pub fn read_weighted(path: impl AsRef<Path>) -> Result<SignedGraph, IoError> {
    parse_weighted(&read_to_string(path.as_ref())?)
}

pub fn parse_clustering(text: &str) -> Result<Clustering, IoError> {
    let mut entries: Vec<(usize, Vertex, usize)> = Vec::new();
    for (line, fields) in content_lines(text) {
        if fields.len() != 2 {
            return Err(malformed(
                line,
                "clustering line must be `vertex cluster_id`",
            ));
        }
        entries.push((
            line,
            parse_field(line, fields[0], "vertex")?,
            parse_field(line, fields[1], "cluster id")?,
        ));
    }
    let n = entries.len();
    let mut assignment = vec![None; n];
    for &(line, v, id) in &entries {
        if v >= n {
            return Err(malformed(
                line,
                format!("vertex {v} out of range (n = {n})"),
            ));
        }
        if assignment[v].replace(id).is_some() {
            return Err(malformed(line, format!("vertex {v} assigned twice")));
        }
    }
    Ok(Clustering::from_assignment(
        assignment
            .into_iter()
            .map(|a| a.expect("every slot filled"))
            .collect(),
    ))
}

pub fn format_clustering(c: &Clustering) -> String {
    let mut out = String::new();
    for (v, id) in c.assignment().iter().enumerate() {
        writeln!(out, "{v} {id}").unwrap();
    }
    out
}

pub fn read_clustering(path: impl AsRef<Path>) -> Result<Clustering, IoError> {
    parse_clustering(&read_to_string(path.as_ref())?)
}

pub fn write_clustering(c: &Clustering, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_string(path.as_ref(), &format_clustering(c))
}
