//! Plain-text graph files.
//!
//! ```text
//! # comment
//! [vertices]
//! x1, 3, interior
//! x4, 1, boundary
//! [edges]
//! x1, x4, 1
//! ```
//!
//! Vertex records are `id, measure, role` with role one of `interior`,
//! `boundary`, `plain`; the measure may be written `degree` to use the weighted
//! degree. Edge records are `id1, id2, weight`, each undirected edge listed once.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{DomainPartition, Role, WeightedGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: WeightedGraph,
    /// `None` when every vertex is `plain`.
    pub partition: Option<DomainPartition>,
}

enum Section {
    None,
    Vertices,
    Edges,
}

fn fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut section = Section::None;
    let mut ids: Vec<String> = Vec::new();
    let mut measures: Vec<Option<f64>> = Vec::new();
    let mut roles: Vec<Role> = Vec::new();
    let mut raw_edges: Vec<(usize, String, String, f64)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "[vertices]" => {
                section = Section::Vertices;
                continue;
            }
            "[edges]" => {
                section = Section::Edges;
                continue;
            }
            _ if line.starts_with('[') => {
                return Err(parse_err(lineno, format!("unknown section `{line}`")));
            }
            _ => {}
        }
        let f = fields(line);
        match section {
            Section::None => return Err(parse_err(lineno, "record outside of a section")),
            Section::Vertices => {
                if f.len() != 3 {
                    return Err(parse_err(lineno, "expected `id, measure, role`"));
                }
                if f[0].is_empty() {
                    return Err(parse_err(lineno, "empty vertex id"));
                }
                if ids.iter().any(|id| id == f[0]) {
                    return Err(parse_err(lineno, format!("duplicate vertex `{}`", f[0])));
                }
                let measure = if f[1] == "degree" {
                    None
                } else {
                    let m: f64 = f[1]
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad measure `{}`", f[1])))?;
                    if !(m > 0.0 && m.is_finite()) {
                        return Err(parse_err(lineno, format!("measure must be positive, got {m}")));
                    }
                    Some(m)
                };
                let role = match f[2] {
                    "interior" => Role::Interior,
                    "boundary" => Role::Boundary,
                    "plain" => Role::Plain,
                    other => return Err(parse_err(lineno, format!("unknown role `{other}`"))),
                };
                ids.push(f[0].to_string());
                measures.push(measure);
                roles.push(role);
            }
            Section::Edges => {
                if f.len() != 3 {
                    return Err(parse_err(lineno, "expected `id1, id2, weight`"));
                }
                let w: f64 = f[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad weight `{}`", f[2])))?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(parse_err(lineno, format!("weight must be positive, got {w}")));
                }
                raw_edges.push((lineno, f[0].to_string(), f[1].to_string(), w));
            }
        }
    }
    if ids.is_empty() {
        return Err(parse_err(0, "no vertices"));
    }

    let index = |line: usize, id: &str| {
        ids.iter()
            .position(|v| v == id)
            .ok_or_else(|| parse_err(line, format!("unknown vertex `{id}`")))
    };
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (line, a, b, w) in &raw_edges {
        let x = index(*line, a)?;
        let y = index(*line, b)?;
        if x == y {
            return Err(parse_err(*line, format!("self-loop at `{a}`")));
        }
        if !seen.insert((x.min(y), x.max(y))) {
            return Err(parse_err(*line, format!("duplicate edge `{a}`-`{b}`")));
        }
        edges.push((x, y, *w));
    }

    let mut degree = vec![0.0; ids.len()];
    for &(x, y, w) in &edges {
        degree[x] += w;
        degree[y] += w;
    }
    let measure: Vec<f64> = measures
        .iter()
        .zip(&degree)
        .map(|(m, d)| m.unwrap_or(*d))
        .collect();
    if let Some(x) = measure.iter().position(|&m| m <= 0.0) {
        return Err(parse_err(0, format!("vertex `{}` has zero degree measure", ids[x])));
    }
    let graph = WeightedGraph::from_edges(ids, measure, &edges)?;
    let partition = if roles.iter().all(|&r| r == Role::Plain) {
        None
    } else {
        Some(DomainPartition::from_roles(roles))
    };
    Ok(GraphFile { graph, partition })
}

/// Renders a graph in the format accepted by [`parse_graph`].
pub fn write_graph(graph: &WeightedGraph, partition: Option<&DomainPartition>) -> String {
    let mut out = String::from("[vertices]\n");
    for x in 0..graph.len() {
        let role = match partition.map(|p| p.role(x)) {
            Some(Role::Interior) => "interior",
            Some(Role::Boundary) => "boundary",
            _ => "plain",
        };
        let _ = writeln!(out, "{}, {:?}, {role}", graph.id(x), graph.measure(x));
    }
    out.push_str("[edges]\n");
    for (x, y, w) in graph.edges() {
        let _ = writeln!(out, "{}, {}, {w:?}", graph.id(x), graph.id(y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{five_vertex_graph, five_vertex_partition};

    const DEMO: &str = "\
# five-vertex demo
[vertices]
x1, degree, interior
x2, degree, interior
x3, degree, interior
x4, degree, boundary
x5, degree, boundary

[edges]
x4, x1, 1
x1, x2, 1   # trailing comment
x1, x3, 1
x2, x3, 1
x3, x5, 1
";

    #[test]
    fn parses_demo_file() {
        let file = parse_graph(DEMO).unwrap();
        let g = five_vertex_graph();
        assert_eq!(file.graph, g);
        assert_eq!(file.partition, Some(five_vertex_partition()));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let file = parse_graph(&write_graph(&g, Some(&p))).unwrap();
        assert_eq!(file.graph, g);
        assert_eq!(file.partition, Some(p));
    }

    #[test]
    fn rejects_malformed_input() {
        let cases = [
            ("[vertices]\na, 1, plain\n[edges]\na, a, 1\n", 4, "self-loop"),
            ("[vertices]\na, 1, plain\nb, 1, plain\n[edges]\na, b, 1\nb, a, 2\n", 6, "duplicate edge"),
            ("[vertices]\na, 1, plain\n[edges]\na, b, 1\n", 4, "unknown vertex"),
            ("[vertices]\na, -1, plain\n", 2, "positive"),
            ("[vertices]\na, 1, outside\n", 2, "unknown role"),
            ("a, 1, plain\n", 1, "outside"),
            ("[vertices]\na, 1\n", 2, "expected"),
        ];
        for (text, line, needle) in cases {
            match parse_graph(text) {
                Err(Error::Parse { line: l, message }) => {
                    assert_eq!(l, line, "{text}");
                    assert!(message.contains(needle), "{message}");
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn all_plain_means_no_partition() {
        let file = parse_graph("[vertices]\na, 1, plain\nb, 2, plain\n[edges]\na, b, 0.5\n").unwrap();
        assert!(file.partition.is_none());
        assert_eq!(file.graph.measures(), &[1.0, 2.0]);
    }
}
