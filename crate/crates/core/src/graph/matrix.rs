//! Dense matrix assembly of the graph operators.
//!
//! Interior-restricted matrices are indexed by position in
//! [`DomainPartition::interior`], full matrices by vertex index.

use nalgebra::{DMatrix, DVector};

use super::{DomainPartition, WeightedGraph};

/// Matrix of −Δ_V: `A[x][y] = −ω(x,y)/μ(x)`, `A[x][x] = deg(x)/μ(x)`.
pub fn full_operator(graph: &WeightedGraph) -> DMatrix<f64> {
    let n = graph.len();
    let mut a = DMatrix::zeros(n, n);
    for x in 0..n {
        let mx = graph.measure(x);
        for &y in graph.neighbors(x) {
            let w = graph.weight(y, x) / mx;
            a[(x, y)] -= w;
            a[(x, x)] += w;
        }
    }
    a
}

/// Matrix of −Δ_Ω on Ω with zero values on ∂Ω.
pub fn dirichlet_operator(graph: &WeightedGraph, p: &DomainPartition) -> DMatrix<f64> {
    let pos = p.interior_positions();
    let k = p.interior().len();
    let mut a = DMatrix::zeros(k, k);
    for (i, &x) in p.interior().iter().enumerate() {
        let mx = graph.measure(x);
        for &y in graph.neighbors(x) {
            if !p.is_interior(y) && !p.is_boundary(y) {
                continue;
            }
            let w = graph.weight(y, x) / mx;
            a[(i, i)] += w;
            if let Some(j) = pos[y] {
                a[(i, j)] -= w;
            }
        }
    }
    a
}

/// Σ_{y∈Ω} ω(z, y) for a boundary vertex z.
pub fn interior_degree(graph: &WeightedGraph, p: &DomainPartition, z: usize) -> f64 {
    graph
        .neighbors(z)
        .iter()
        .filter(|&&y| p.is_interior(y))
        .map(|&y| graph.weight(z, y))
        .sum()
}

/// Matrix of −Δ_Ω on Ω after eliminating ∂Ω through the zero-flux condition
/// u(z) = Σ_{y∈Ω} ω(z,y) u(y) / Σ_{y∈Ω} ω(z,y).
///
/// The result is self-adjoint in the μ-inner product on Ω and annihilates constants.
pub fn neumann_operator(graph: &WeightedGraph, p: &DomainPartition) -> DMatrix<f64> {
    let pos = p.interior_positions();
    let mut a = dirichlet_operator(graph, p);
    for &z in p.boundary() {
        let dz = interior_degree(graph, p, z);
        if dz <= 0.0 {
            continue;
        }
        for &x in graph.neighbors(z) {
            let Some(i) = pos[x] else { continue };
            let coupling = graph.weight(z, x) / (graph.measure(x) * dz);
            for &y in graph.neighbors(z) {
                if let Some(j) = pos[y] {
                    a[(i, j)] -= coupling * graph.weight(z, y);
                }
            }
        }
    }
    a
}

/// Extends interior values to ∂Ω so that ∂u/∂n(z) = flux(z); `flux = None` means zero flux.
///
/// Solves μ(z) flux(z) = u(z) d_z − Σ_{y∈Ω} ω(z,y) u(y) for u(z).
pub fn neumann_extend(
    graph: &WeightedGraph,
    p: &DomainPartition,
    u: &mut [f64],
    flux: Option<&[f64]>,
) {
    for &z in p.boundary() {
        let dz = interior_degree(graph, p, z);
        let mut s: f64 = graph
            .neighbors(z)
            .iter()
            .filter(|&&y| p.is_interior(y))
            .map(|&y| graph.weight(z, y) * u[y])
            .sum();
        if let Some(g) = flux {
            s += graph.measure(z) * g[z];
        }
        u[z] = s / dz;
    }
}

/// Restricts a full-length function to Ω in interior order.
pub fn restrict(p: &DomainPartition, u: &[f64]) -> DVector<f64> {
    DVector::from_iterator(p.interior().len(), p.interior().iter().map(|&x| u[x]))
}

/// Writes interior values back into a full-length buffer.
pub fn scatter(p: &DomainPartition, values: &DVector<f64>, out: &mut [f64]) {
    for (i, &x) in p.interior().iter().enumerate() {
        out[x] = values[i];
    }
}

/// Boundary contribution Σ_{z∈∂Ω} g(z) ω(z,x) / μ(x) for each interior x.
pub fn dirichlet_lift(graph: &WeightedGraph, p: &DomainPartition, g: &[f64]) -> DVector<f64> {
    DVector::from_iterator(
        p.interior().len(),
        p.interior().iter().map(|&x| {
            graph
                .neighbors(x)
                .iter()
                .filter(|&&z| p.is_boundary(z))
                .map(|&z| g[z] * graph.weight(z, x))
                .sum::<f64>()
                / graph.measure(x)
        }),
    )
}

/// Interior source produced by eliminating a prescribed flux g on ∂Ω:
/// Σ_z ω(z,x) μ(z) g(z) / (d_z μ(x)).
pub fn neumann_lift(graph: &WeightedGraph, p: &DomainPartition, g: &[f64]) -> DVector<f64> {
    let pos = p.interior_positions();
    let mut out = DVector::zeros(p.interior().len());
    for &z in p.boundary() {
        let dz = interior_degree(graph, p, z);
        for &x in graph.neighbors(z) {
            if let Some(i) = pos[x] {
                out[i] += graph.weight(z, x) * graph.measure(z) * g[z] / (dz * graph.measure(x));
            }
        }
    }
    out
}
