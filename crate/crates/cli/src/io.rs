//! Graph files: the `n m` edge-list text format and `{"n", "edges"}` JSON.

use std::fmt::Write as _;
use std::path::Path;

use decay_core::{Graph, NodeId};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    EdgeList,
    Json,
}

impl GraphFormat {
    /// `.json` files are JSON; anything else is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => GraphFormat::Json,
            _ => GraphFormat::EdgeList,
        }
    }
}

pub fn read_graph(path: &Path, format: Option<GraphFormat>) -> CliResult<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parsed = match format.unwrap_or_else(|| GraphFormat::from_path(path)) {
        GraphFormat::EdgeList => parse_edge_list(&text),
        GraphFormat::Json => parse_json_graph(&text),
    };
    parsed.map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn data_err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("line {line}: {msg}"))
}

fn parse_fields<const K: usize>(line: usize, text: &str, what: &str) -> CliResult<[usize; K]> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != K {
        return Err(data_err(
            line,
            format!("expected {K} integers ({what}), found `{}`", text.trim()),
        ));
    }
    let mut out = [0; K];
    for (slot, f) in out.iter_mut().zip(&fields) {
        *slot = f
            .parse()
            .map_err(|_| data_err(line, format!("`{f}` is not a non-negative integer ({what})")))?;
    }
    Ok(out)
}

/// Parses the edge-list format: a header line `n m` followed by exactly `m`
/// lines `u v` with 0-based node ids. Blank lines are ignored.
pub fn parse_edge_list(text: &str) -> CliResult<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let Some((hl, header)) = lines.next() else {
        return Err(CliError::Data("empty graph file".into()));
    };
    let [n, m] = parse_fields::<2>(hl, header, "n m")?;
    let mut edges = Vec::with_capacity(m);
    for (ln, line) in lines {
        if edges.len() == m {
            return Err(data_err(ln, format!("more than the {m} declared edges")));
        }
        let [u, v] = parse_fields::<2>(ln, line, "u v")?;
        if u >= n || v >= n {
            return Err(data_err(ln, format!("node {} out of range for n = {n}", u.max(v))));
        }
        if u == v {
            return Err(data_err(ln, format!("self-loop on node {u}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(CliError::Data(format!(
            "header declares {m} edges but {} were given",
            edges.len()
        )));
    }
    Ok(Graph::new(n, &edges)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
}

pub fn parse_json_graph(text: &str) -> CliResult<Graph> {
    let g: JsonGraph = serde_json::from_str(text)
        .map_err(|e| CliError::Data(format!("line {}: {e}", e.line())))?;
    Ok(Graph::new(g.n, &g.edges)?)
}

/// Canonical edge list: `u < v`, edges in lexicographic order.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.node_count(), g.edge_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").expect("writing to a String");
    }
    out
}
