//! Weighted graphs, vertex partitions and functions on vertices.
//!
//! A [`WeightedGraph`] stores its weights as a dense `n × n` table indexed by
//! the input order of the vertex ids. Every operator in this crate uses that
//! order for matrix indexing, so results are reproducible bit for bit.

mod function;
pub mod io;
pub mod matrix;
pub mod operators;
pub mod random;
mod validate;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use function::{DriftField, GraphFunction};
pub use validate::{check_domain, validate, ValidationReport, Violation};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major, `weights[x * n + y]` is ω(x, y).
    weights: Vec<f64>,
    measure: Vec<f64>,
    neighbors: Vec<Vec<usize>>,
}

impl WeightedGraph {
    /// Builds a graph from an undirected edge list, each edge listed once.
    ///
    /// Self-loops, repeated edges and non-positive weights are rejected.
    pub fn from_edges<S: Into<String>>(
        ids: Vec<S>,
        measure: Vec<f64>,
        edges: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let n = ids.len();
        if measure.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: measure.len(),
            });
        }
        let mut weights = vec![0.0; n * n];
        for &(x, y, w) in edges {
            if x >= n {
                return Err(Error::VertexOutOfRange(x));
            }
            if y >= n {
                return Err(Error::VertexOutOfRange(y));
            }
            if x == y {
                return Err(Error::InvalidGraph(format!("self-loop at `{}`", ids[x])));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidGraph(format!(
                    "edge `{}`-`{}` has non-positive weight {w}",
                    ids[x], ids[y]
                )));
            }
            if weights[x * n + y] != 0.0 {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge `{}`-`{}`",
                    ids[x], ids[y]
                )));
            }
            weights[x * n + y] = w;
            weights[y * n + x] = w;
        }
        Self::from_dense(ids, weights, measure)
    }

    /// Same as [`WeightedGraph::from_edges`] with μ(x) = Σ_y ω(x, y).
    pub fn with_degree_measure<S: Into<String>>(
        ids: Vec<S>,
        edges: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let n = ids.len();
        let mut measure = vec![0.0; n];
        for &(x, y, w) in edges {
            if x < n && y < n {
                measure[x] += w;
                measure[y] += w;
            }
        }
        Self::from_edges(ids, measure, edges)
    }

    /// Wraps a dense weight table without checking the graph axioms.
    ///
    /// Use [`validate`] to check symmetry, connectivity and the measure.
    pub fn from_dense<S: Into<String>>(
        ids: Vec<S>,
        weights: Vec<f64>,
        measure: Vec<f64>,
    ) -> Result<Self> {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let n = ids.len();
        if weights.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: weights.len(),
            });
        }
        if measure.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: measure.len(),
            });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id `{id}`")));
            }
        }
        let neighbors = (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| y != x && (weights[x * n + y] != 0.0 || weights[y * n + x] != 0.0))
                    .collect()
            })
            .collect();
        Ok(Self {
            ids,
            index,
            weights,
            measure,
            neighbors,
        })
    }

    /// Returns a copy with the single directed entry ω(x, y) replaced.
    pub fn with_directed_weight(&self, x: usize, y: usize, w: f64) -> Result<Self> {
        let n = self.len();
        if x >= n {
            return Err(Error::VertexOutOfRange(x));
        }
        if y >= n {
            return Err(Error::VertexOutOfRange(y));
        }
        let mut weights = self.weights.clone();
        weights[x * n + y] = w;
        Self::from_dense(self.ids.clone(), weights, self.measure.clone())
    }

    /// Returns a copy with a different vertex measure.
    pub fn with_measure(&self, measure: Vec<f64>) -> Result<Self> {
        Self::from_dense(self.ids.clone(), self.weights.clone(), measure)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn check_vertex(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(x))
        }
    }

    /// ω(x, y).
    #[inline]
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.weights[x * self.len() + y]
    }

    /// μ(x).
    #[inline]
    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    /// Vertices y ≠ x with ω(x, y) or ω(y, x) nonzero, in index order.
    #[inline]
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[x]
    }

    /// Undirected edges `(x, y, ω(x, y))` with `x < y`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for &y in &self.neighbors[x] {
                if x < y {
                    out.push((x, y, self.weight(x, y)));
                }
            }
        }
        out
    }

    /// Weighted degree Σ_y ω(x, y).
    pub fn degree(&self, x: usize) -> f64 {
        self.neighbors[x].iter().map(|&y| self.weight(x, y)).sum()
    }

    /// Whether the vertices in `subset` induce a connected subgraph.
    pub fn is_connected_on(&self, subset: &[usize]) -> bool {
        if subset.is_empty() {
            return true;
        }
        let n = self.len();
        let mut inside = vec![false; n];
        for &x in subset {
            inside[x] = true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![subset[0]];
        seen[subset[0]] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.neighbors[x] {
                if inside[y] && !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == subset.len()
    }

    pub fn is_connected(&self) -> bool {
        let all: Vec<usize> = (0..self.len()).collect();
        self.is_connected_on(&all)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Interior,
    Boundary,
    Plain,
}

/// Split of the host graph into interior Ω and vertex boundary ∂Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainPartition {
    roles: Vec<Role>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
}

impl DomainPartition {
    pub fn from_roles(roles: Vec<Role>) -> Self {
        let interior = (0..roles.len())
            .filter(|&x| roles[x] == Role::Interior)
            .collect();
        let boundary = (0..roles.len())
            .filter(|&x| roles[x] == Role::Boundary)
            .collect();
        Self {
            roles,
            interior,
            boundary,
        }
    }

    /// Interior given by ids; the boundary is every other vertex adjacent to it.
    pub fn from_interior(graph: &WeightedGraph, interior: &[&str]) -> Result<Self> {
        let mut roles = vec![Role::Plain; graph.len()];
        for id in interior {
            roles[graph.index_of(id)?] = Role::Interior;
        }
        for x in 0..graph.len() {
            if roles[x] == Role::Plain
                && graph
                    .neighbors(x)
                    .iter()
                    .any(|&y| roles[y] == Role::Interior)
            {
                roles[x] = Role::Boundary;
            }
        }
        Ok(Self::from_roles(roles))
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn role(&self, x: usize) -> Role {
        self.roles[x]
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_interior(&self, x: usize) -> bool {
        self.roles.get(x) == Some(&Role::Interior)
    }

    pub fn is_boundary(&self, x: usize) -> bool {
        self.roles.get(x) == Some(&Role::Boundary)
    }

    /// Position of each interior vertex inside [`DomainPartition::interior`].
    pub fn interior_positions(&self) -> Vec<Option<usize>> {
        let mut pos = vec![None; self.roles.len()];
        for (k, &x) in self.interior.iter().enumerate() {
            pos[x] = Some(k);
        }
        pos
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

/// Where a problem is posed: on the whole graph, or on Ω with a boundary condition on ∂Ω.
#[derive(Debug, Clone, Copy)]
pub enum Geometry<'a> {
    Whole(&'a WeightedGraph),
    Bounded {
        graph: &'a WeightedGraph,
        partition: &'a DomainPartition,
        kind: BoundaryKind,
    },
}

impl<'a> Geometry<'a> {
    pub fn dirichlet(graph: &'a WeightedGraph, partition: &'a DomainPartition) -> Self {
        Geometry::Bounded {
            graph,
            partition,
            kind: BoundaryKind::Dirichlet,
        }
    }

    pub fn neumann(graph: &'a WeightedGraph, partition: &'a DomainPartition) -> Self {
        Geometry::Bounded {
            graph,
            partition,
            kind: BoundaryKind::Neumann,
        }
    }

    pub fn graph(&self) -> &'a WeightedGraph {
        match self {
            Geometry::Whole(g) => g,
            Geometry::Bounded { graph, .. } => graph,
        }
    }

    pub fn partition(&self) -> Option<&'a DomainPartition> {
        match self {
            Geometry::Whole(_) => None,
            Geometry::Bounded { partition, .. } => Some(partition),
        }
    }

    pub fn boundary_kind(&self) -> Option<BoundaryKind> {
        match self {
            Geometry::Whole(_) => None,
            Geometry::Bounded { kind, .. } => Some(*kind),
        }
    }

    /// Vertices where the equation holds: Ω, or all of V.
    pub fn active(&self) -> Vec<usize> {
        match self {
            Geometry::Whole(g) => (0..g.len()).collect(),
            Geometry::Bounded { partition, .. } => partition.interior().to_vec(),
        }
    }

    pub fn boundary(&self) -> &'a [usize] {
        match self {
            Geometry::Whole(_) => &[],
            Geometry::Bounded { partition, .. } => partition.boundary(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> WeightedGraph {
        WeightedGraph::with_degree_measure(vec!["a", "b", "c"], &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap()
    }

    #[test]
    fn degree_measure_and_neighbors() {
        let g = path3();
        assert_eq!(g.measures(), &[1.0, 3.0, 2.0]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.weight(2, 1), 2.0);
        assert_eq!(g.edges(), vec![(0, 1, 1.0), (1, 2, 2.0)]);
        assert!(g.is_connected());
        assert!(!g.is_connected_on(&[0, 2]));
    }

    #[test]
    fn rejects_duplicates_and_loops() {
        let dup = WeightedGraph::with_degree_measure(vec!["a", "b"], &[(0, 1, 1.0), (1, 0, 1.0)]);
        assert!(matches!(dup, Err(Error::InvalidGraph(_))));
        let looped = WeightedGraph::with_degree_measure(vec!["a", "b"], &[(0, 0, 1.0)]);
        assert!(matches!(looped, Err(Error::InvalidGraph(_))));
        let ids = WeightedGraph::from_dense(vec!["a", "a"], vec![0.0; 4], vec![1.0; 2]);
        assert!(ids.is_err());
    }

    #[test]
    fn partition_from_interior_finds_vertex_boundary() {
        let g = path3();
        let p = DomainPartition::from_interior(&g, &["b"]).unwrap();
        assert_eq!(p.interior(), &[1]);
        assert_eq!(p.boundary(), &[0, 2]);
        assert!(matches!(
            DomainPartition::from_interior(&g, &["zz"]),
            Err(Error::UnknownVertex(_))
        ));
    }
}
