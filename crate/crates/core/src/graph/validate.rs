//! Structural checks on a graph and its domain partition.

use std::fmt;

use serde::Serialize;

use super::{DomainPartition, Role, WeightedGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Asymmetric { x: String, y: String, forward: f64, backward: f64 },
    NegativeWeight { x: String, y: String, weight: f64 },
    NonFiniteWeight { x: String, y: String },
    SelfLoop { x: String },
    NonPositiveMeasure { x: String, measure: f64 },
    Disconnected,
    /// Partition role vector has the wrong length.
    PartitionSize { expected: usize, got: usize },
    Uncovered { x: String },
    EmptyInterior,
    EmptyBoundary,
    BoundaryWithoutInteriorNeighbor { z: String },
    InteriorDisconnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Asymmetric { x, y, forward, backward } => {
                write!(f, "asymmetric weight: w({x},{y}) = {forward} but w({y},{x}) = {backward}")
            }
            Violation::NegativeWeight { x, y, weight } => {
                write!(f, "negative weight w({x},{y}) = {weight}")
            }
            Violation::NonFiniteWeight { x, y } => write!(f, "non-finite weight w({x},{y})"),
            Violation::SelfLoop { x } => write!(f, "self-loop at {x}"),
            Violation::NonPositiveMeasure { x, measure } => {
                write!(f, "non-positive measure mu({x}) = {measure}")
            }
            Violation::Disconnected => write!(f, "graph is not connected"),
            Violation::PartitionSize { expected, got } => {
                write!(f, "partition covers {got} vertices, graph has {expected}")
            }
            Violation::Uncovered { x } => write!(f, "vertex {x} is neither interior nor boundary"),
            Violation::EmptyInterior => write!(f, "interior is empty"),
            Violation::EmptyBoundary => write!(f, "boundary is empty"),
            Violation::BoundaryWithoutInteriorNeighbor { z } => {
                write!(f, "boundary vertex {z} has no interior neighbor")
            }
            Violation::InteriorDisconnected => write!(f, "interior does not induce a connected subgraph"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

/// Checks the weight-function axioms and, if given, the partition invariants.
pub fn validate(graph: &WeightedGraph, partition: Option<&DomainPartition>) -> ValidationReport {
    let n = graph.len();
    let mut violations = Vec::new();
    let id = |x: usize| graph.id(x).to_string();

    for x in 0..n {
        let m = graph.measure(x);
        if !(m > 0.0 && m.is_finite()) {
            violations.push(Violation::NonPositiveMeasure { x: id(x), measure: m });
        }
        if graph.weight(x, x) != 0.0 {
            violations.push(Violation::SelfLoop { x: id(x) });
        }
        for y in 0..n {
            let w = graph.weight(x, y);
            if !w.is_finite() {
                violations.push(Violation::NonFiniteWeight { x: id(x), y: id(y) });
            } else if w < 0.0 {
                violations.push(Violation::NegativeWeight { x: id(x), y: id(y), weight: w });
            }
            if x < y && w != graph.weight(y, x) {
                violations.push(Violation::Asymmetric {
                    x: id(x),
                    y: id(y),
                    forward: w,
                    backward: graph.weight(y, x),
                });
            }
        }
    }
    if n == 0 || !graph.is_connected() {
        violations.push(Violation::Disconnected);
    }

    if let Some(p) = partition {
        if p.roles().len() != n {
            violations.push(Violation::PartitionSize {
                expected: n,
                got: p.roles().len(),
            });
            return ValidationReport { violations };
        }
        for x in 0..n {
            if p.role(x) == Role::Plain {
                violations.push(Violation::Uncovered { x: id(x) });
            }
        }
        if p.interior().is_empty() {
            violations.push(Violation::EmptyInterior);
        }
        if p.boundary().is_empty() {
            violations.push(Violation::EmptyBoundary);
        }
        for &z in p.boundary() {
            if !graph
                .neighbors(z)
                .iter()
                .any(|&y| p.is_interior(y) && graph.weight(z, y) > 0.0)
            {
                violations.push(Violation::BoundaryWithoutInteriorNeighbor { z: id(z) });
            }
        }
        if !graph.is_connected_on(p.interior()) {
            violations.push(Violation::InteriorDisconnected);
        }
    }
    ValidationReport { violations }
}

/// Errors unless the graph and partition form a well-posed bounded domain.
pub fn check_domain(graph: &WeightedGraph, partition: &DomainPartition) -> Result<()> {
    if partition.roles().len() != graph.len() {
        return Err(Error::Dimension {
            expected: graph.len(),
            got: partition.roles().len(),
        });
    }
    if partition.interior().is_empty() {
        return Err(Error::EmptySubset);
    }
    if partition.boundary().is_empty() {
        return Err(Error::EmptyBoundary);
    }
    let report = validate(graph, Some(partition));
    if report.is_ok() {
        Ok(())
    } else {
        Err(Error::InvalidGraph(report.to_string().trim_end().replace('\n', "; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{five_vertex_graph, five_vertex_partition};

    #[test]
    fn five_vertex_demo_passes() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let report = validate(&g, Some(&p));
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn asymmetric_weight_is_reported() {
        let g = five_vertex_graph();
        let x1 = g.index_of("x1").unwrap();
        let x4 = g.index_of("x4").unwrap();
        let bad = g.with_directed_weight(x1, x4, 2.0).unwrap();
        let report = validate(&bad, None);
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(report.violations[0], Violation::Asymmetric { .. }));
    }

    #[test]
    fn moving_x2_to_the_boundary_still_passes() {
        let g = five_vertex_graph();
        let p = DomainPartition::from_interior(&g, &["x1", "x3"]).unwrap();
        assert!(p.is_boundary(g.index_of("x2").unwrap()));
        assert!(validate(&g, Some(&p)).is_ok());
    }

    #[test]
    fn partition_violations() {
        let g = five_vertex_graph();
        // x4 and x5 hang off x1 and x3 only, so Ω = {x4, x5} is disconnected.
        let p = DomainPartition::from_interior(&g, &["x4", "x5"]).unwrap();
        let report = validate(&g, Some(&p));
        assert!(report.violations.contains(&Violation::InteriorDisconnected));
        assert!(report.violations.contains(&Violation::Uncovered { x: "x2".into() }));

        let mut roles = p.roles().to_vec();
        roles[g.index_of("x2").unwrap()] = Role::Boundary;
        roles[g.index_of("x1").unwrap()] = Role::Boundary;
        roles[g.index_of("x3").unwrap()] = Role::Boundary;
        let report = validate(&g, Some(&DomainPartition::from_roles(roles)));
        assert!(report
            .violations
            .contains(&Violation::BoundaryWithoutInteriorNeighbor { z: "x2".into() }));
    }

    #[test]
    fn measure_and_connectivity() {
        let g = five_vertex_graph();
        let mut mu = g.measures().to_vec();
        mu[0] = 0.0;
        let report = validate(&g.with_measure(mu).unwrap(), None);
        assert!(matches!(report.violations[0], Violation::NonPositiveMeasure { .. }));

        let split = WeightedGraph::with_degree_measure(
            vec!["a", "b", "c", "d"],
            &[(0, 1, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        assert_eq!(validate(&split, None).violations, vec![Violation::Disconnected]);
    }
}
