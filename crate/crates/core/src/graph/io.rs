//! Edge-list text format: a header line `n m`, then `m` lines `u v` with `u < v`.

use super::{Graph, GraphError};
use std::fmt::Write as _;
use std::path::Path;

pub fn to_edge_list(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| GraphError::MalformedHeader(String::new()))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| GraphError::MalformedHeader(header.to_string()))?;
    let [n, m] = nums[..] else {
        return Err(GraphError::MalformedHeader(header.to_string()));
    };
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines {
        let bad = || GraphError::MalformedEdge { line: i + 1, text: line.to_string() };
        let uv: Vec<usize> = line.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| bad())?;
        let [u, v] = uv[..] else { return Err(bad()) };
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(GraphError::EdgeCountMismatch { declared: m, found: edges.len() });
    }
    Graph::new(n, edges)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    std::fs::write(path, to_edge_list(g))?;
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}
