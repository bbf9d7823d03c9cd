//! Built-in five-vertex demo graph.
//!
//! Edges x4–x1, x1–x2, x1–x3, x2–x3, x3–x5 with unit weights and μ equal to
//! the degree. The interior is {x1, x2, x3} and the boundary {x4, x5}.

use crate::graph::{DomainPartition, GraphFunction, Role, WeightedGraph};

pub const FIVE_VERTEX_IDS: [&str; 5] = ["x1", "x2", "x3", "x4", "x5"];

/// Initial population used by the demo scenarios on (x1, x2, x3).
pub const FIVE_VERTEX_INITIAL: [f64; 3] = [8.0, 1.0, 0.5];

pub fn five_vertex_graph() -> WeightedGraph {
    WeightedGraph::with_degree_measure(
        FIVE_VERTEX_IDS.to_vec(),
        &[(3, 0, 1.0), (0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 4, 1.0)],
    )
    .expect("demo graph is simple")
}

pub fn five_vertex_partition() -> DomainPartition {
    DomainPartition::from_roles(vec![
        Role::Interior,
        Role::Interior,
        Role::Interior,
        Role::Boundary,
        Role::Boundary,
    ])
}

/// (8, 1, 0.5) on the interior, zero on the boundary.
pub fn five_vertex_initial() -> GraphFunction {
    GraphFunction::new(vec![8.0, 1.0, 0.5, 0.0, 0.0])
}

/// The graph file text of the demo, in the format read by [`crate::graph::io::parse_graph`].
pub fn five_vertex_file() -> String {
    let g = five_vertex_graph();
    crate::graph::io::write_graph(&g, Some(&five_vertex_partition()))
}
