//! Eigen-decompositions of −Δ_V, and of −Δ_Ω under Dirichlet or Neumann
//! conditions, together with the heat kernels they generate.
//!
//! Each operator is self-adjoint only in the μ-weighted inner product, so the
//! matrix `A` is symmetrized as `D^{1/2} A D^{-1/2}` (D = diag μ), decomposed
//! with [`jacobi::symmetric_eigen`], and mapped back by `D^{-1/2}`.

pub mod jacobi;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{check_domain, matrix, DomainPartition, GraphFunction, WeightedGraph};

/// Eigenvalues closer than this are treated as one cluster and re-orthonormalized.
pub const CLUSTER_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Full,
    Dirichlet,
    Neumann,
}

/// Ascending eigenvalues with μ-orthonormal eigenfunctions.
///
/// Eigenfunctions are stored over the whole host graph: Dirichlet
/// eigenfunctions vanish on ∂Ω, Neumann eigenfunctions are extended to ∂Ω by
/// the zero-flux condition. Orthonormality holds on the support (V or Ω).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    kind: SpectrumKind,
    support: Vec<usize>,
    measure: Vec<f64>,
    eigenvalues: Vec<f64>,
    eigenfunctions: Vec<GraphFunction>,
}

/// Decomposes a μ-self-adjoint matrix; returns ascending eigenvalues and
/// μ-orthonormal eigenvectors indexed like `a`.
fn decompose(a: &DMatrix<f64>, mu: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = mu.len();
    let sq: Vec<f64> = mu.iter().map(|m| m.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| sq[i] * a[(i, j)] / sq[j]);
    let s = (&s + s.transpose()) * 0.5;
    let (values, vectors) = jacobi::symmetric_eigen(&s)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut funcs: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| (0..n).map(|i| vectors[(i, k)] / sq[i]).collect())
        .collect();

    let dot = |u: &[f64], v: &[f64]| -> f64 { (0..n).map(|i| mu[i] * u[i] * v[i]).sum() };
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        for k in start..end {
            // Two passes of modified Gram–Schmidt against the cluster.
            for _ in 0..2 {
                for j in start..k {
                    let c = dot(&funcs[k], &funcs[j]);
                    let (head, tail) = funcs.split_at_mut(k);
                    for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                        *x -= c * y;
                    }
                }
            }
            let norm = dot(&funcs[k], &funcs[k]).sqrt();
            for x in funcs[k].iter_mut() {
                *x /= norm;
            }
        }
        start = end;
    }

    for f in funcs.iter_mut() {
        let mut best = 0;
        for i in 1..n {
            if f[i].abs() > f[best].abs() {
                best = i;
            }
        }
        if f[best] < 0.0 {
            for x in f.iter_mut() {
                *x = -*x;
            }
        }
    }
    Ok((eigenvalues, funcs))
}

impl EigenSystem {
    fn assemble(
        graph: &WeightedGraph,
        kind: SpectrumKind,
        support: Vec<usize>,
        eigenvalues: Vec<f64>,
        local: Vec<Vec<f64>>,
        extend: impl Fn(&mut [f64]),
    ) -> Self {
        let n = graph.len();
        let eigenfunctions = local
            .into_iter()
            .map(|v| {
                let mut full = vec![0.0; n];
                for (i, &x) in support.iter().enumerate() {
                    full[x] = v[i];
                }
                extend(&mut full);
                GraphFunction::new(full)
            })
            .collect();
        Self {
            kind,
            support,
            measure: graph.measures().to_vec(),
            eigenvalues,
            eigenfunctions,
        }
    }

    /// Replaces the bottom pair by the exact constant mode (eigenvalue 0).
    fn pin_constant_mode(&mut self) {
        let vol: f64 = self.support.iter().map(|&x| self.measure[x]).sum();
        let c = 1.0 / vol.sqrt();
        self.eigenvalues[0] = 0.0;
        self.eigenfunctions[0] = GraphFunction::constant(self.measure.len(), c);
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    /// Vertices carrying the μ-inner product: all of V, or Ω.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenfunctions(&self) -> &[GraphFunction] {
        &self.eigenfunctions
    }

    pub fn eigenvalue(&self, j: usize) -> f64 {
        self.eigenvalues[j]
    }

    pub fn eigenfunction(&self, j: usize) -> &GraphFunction {
        &self.eigenfunctions[j]
    }

    /// Coefficients ⟨u, φ_j⟩_μ over the support.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        self.eigenfunctions
            .iter()
            .map(|phi| {
                self.support
                    .iter()
                    .map(|&x| self.measure[x] * u[x] * phi[x])
                    .sum()
            })
            .collect()
    }

    /// Σ_j c_j φ_j as a full-length function.
    pub fn synthesize(&self, coeffs: &[f64]) -> GraphFunction {
        let mut out = vec![0.0; self.measure.len()];
        for (c, phi) in coeffs.iter().zip(&self.eigenfunctions) {
            for (o, p) in out.iter_mut().zip(phi.iter()) {
                *o += c * p;
            }
        }
        GraphFunction::new(out)
    }

    /// Matrix of ⟨φ_i, φ_j⟩_μ; the identity up to rounding.
    pub fn gram(&self) -> DMatrix<f64> {
        let k = self.len();
        DMatrix::from_fn(k, k, |i, j| {
            self.support
                .iter()
                .map(|&x| self.measure[x] * self.eigenfunctions[i][x] * self.eigenfunctions[j][x])
                .sum()
        })
    }

    /// Operator matrix Σ_j λ_j φ_j(x) φ_j(y) μ(y) on the support, in support order.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let s = &self.support;
        DMatrix::from_fn(s.len(), s.len(), |a, b| {
            let (x, y) = (s[a], s[b]);
            (0..self.len())
                .map(|j| {
                    self.eigenvalues[j]
                        * self.eigenfunctions[j][x]
                        * self.eigenfunctions[j][y]
                        * self.measure[y]
                })
                .sum()
        })
    }

    /// Heat kernel at time `t ≥ 0`.
    pub fn heat_kernel(&self, t: f64) -> Result<HeatKernel> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("heat kernel time {t} must be >= 0")));
        }
        let s = &self.support;
        let entries = if t == 0.0 {
            DMatrix::identity(s.len(), s.len())
        } else {
            let decay: Vec<f64> = self.eigenvalues.iter().map(|l| (-l * t).exp()).collect();
            DMatrix::from_fn(s.len(), s.len(), |a, b| {
                let (x, y) = (s[a], s[b]);
                (0..self.len())
                    .map(|j| decay[j] * self.eigenfunctions[j][x] * self.eigenfunctions[j][y])
                    .sum::<f64>()
                    * self.measure[y]
            })
        };
        Ok(HeatKernel {
            kind: self.kind,
            t,
            support: self.support.clone(),
            n: self.measure.len(),
            entries,
        })
    }

    /// The spectral sum at time `t`, without the exact special case at `t = 0`.
    pub fn heat_kernel_sum(&self, t: f64) -> DMatrix<f64> {
        let s = &self.support;
        DMatrix::from_fn(s.len(), s.len(), |a, b| {
            let (x, y) = (s[a], s[b]);
            (0..self.len())
                .map(|j| {
                    (-self.eigenvalues[j] * t).exp()
                        * self.eigenfunctions[j][x]
                        * self.eigenfunctions[j][y]
                })
                .sum::<f64>()
                * self.measure[y]
        })
    }
}

/// Decomposition of −Δ_V on the whole graph.
pub fn full_eigensystem(graph: &WeightedGraph) -> Result<EigenSystem> {
    if graph.is_empty() {
        return Err(Error::EmptySubset);
    }
    if !graph.is_connected() {
        return Err(Error::InvalidGraph("graph is not connected".into()));
    }
    let a = matrix::full_operator(graph);
    let (values, vecs) = decompose(&a, graph.measures())?;
    let support = (0..graph.len()).collect();
    let mut es = EigenSystem::assemble(graph, SpectrumKind::Full, support, values, vecs, |_| {});
    es.pin_constant_mode();
    Ok(es)
}

/// Decomposition of −Δ_Ω with zero values on ∂Ω.
pub fn dirichlet_eigensystem(graph: &WeightedGraph, partition: &DomainPartition) -> Result<EigenSystem> {
    check_domain(graph, partition)?;
    let a = matrix::dirichlet_operator(graph, partition);
    let mu: Vec<f64> = partition.interior().iter().map(|&x| graph.measure(x)).collect();
    let (values, vecs) = decompose(&a, &mu)?;
    Ok(EigenSystem::assemble(
        graph,
        SpectrumKind::Dirichlet,
        partition.interior().to_vec(),
        values,
        vecs,
        |_| {},
    ))
}

/// Decomposition of −Δ_Ω with zero normal derivative on ∂Ω.
pub fn neumann_eigensystem(graph: &WeightedGraph, partition: &DomainPartition) -> Result<EigenSystem> {
    check_domain(graph, partition)?;
    let a = matrix::neumann_operator(graph, partition);
    let mu: Vec<f64> = partition.interior().iter().map(|&x| graph.measure(x)).collect();
    let (values, vecs) = decompose(&a, &mu)?;
    let mut es = EigenSystem::assemble(
        graph,
        SpectrumKind::Neumann,
        partition.interior().to_vec(),
        values,
        vecs,
        |u| matrix::neumann_extend(graph, partition, u, None),
    );
    es.pin_constant_mode();
    Ok(es)
}

/// K(x, y, t) = Σ_j e^{−λ_j t} φ_j(x) φ_j(y) μ(y) on the support of its eigensystem.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernel {
    kind: SpectrumKind,
    t: f64,
    support: Vec<usize>,
    n: usize,
    entries: DMatrix<f64>,
}

impl HeatKernel {
    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Entries in support order.
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// K(x, y, t) by vertex index; zero when either vertex is off the support.
    pub fn get(&self, x: usize, y: usize) -> f64 {
        let a = self.support.iter().position(|&v| v == x);
        let b = self.support.iter().position(|&v| v == y);
        match (a, b) {
            (Some(a), Some(b)) => self.entries[(a, b)],
            _ => 0.0,
        }
    }

    /// (K u)(x) = Σ_y K(x, y, t) u(y), zero off the support.
    pub fn apply(&self, u: &[f64]) -> GraphFunction {
        let mut out = vec![0.0; self.n];
        for (a, &x) in self.support.iter().enumerate() {
            out[x] = self
                .support
                .iter()
                .enumerate()
                .map(|(b, &y)| self.entries[(a, b)] * u[y])
                .sum();
        }
        GraphFunction::new(out)
    }

    /// Σ_z K(x, z, t) L(z, y, s), the semigroup composition.
    pub fn compose(&self, other: &HeatKernel) -> DMatrix<f64> {
        &self.entries * &other.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{five_vertex_graph, five_vertex_partition};
    use crate::graph::operators::{laplacian_domain, laplacian_full, normal_derivative};
    use crate::graph::random::{random_connected_graph, random_domain};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity_error(m: &DMatrix<f64>) -> f64 {
        (m - DMatrix::identity(m.nrows(), m.ncols())).amax()
    }

    #[test]
    fn dirichlet_spectrum_of_demo() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let es = dirichlet_eigensystem(&g, &p).unwrap();
        let r = 13f64.sqrt();
        let expect = [(5.0 - r) / 6.0, (5.0 + r) / 6.0, 4.0 / 3.0];
        let mut sorted = expect;
        sorted.sort_by(f64::total_cmp);
        for (a, b) in es.eigenvalues().iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        let phi1 = es.eigenfunction(0);
        assert!(p.interior().iter().all(|&x| phi1[x] > 0.0));
        assert!(p.boundary().iter().all(|&z| phi1[z] == 0.0));
        assert!(identity_error(&es.gram()) < 1e-10);
        for j in 0..3 {
            let phi = es.eigenfunction(j);
            for &x in p.interior() {
                let res = -laplacian_domain(&g, &p, phi, x).unwrap() - es.eigenvalue(j) * phi[x];
                assert!(res.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn single_interior_vertex() {
        let g = WeightedGraph::with_degree_measure(vec!["v1", "v2", "v3"], &[(0, 1, 1.0), (1, 2, 1.0)])
            .unwrap();
        let p = DomainPartition::from_interior(&g, &["v2"]).unwrap();
        let es = dirichlet_eigensystem(&g, &p).unwrap();
        assert!((es.eigenvalue(0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn full_spectrum_of_demo() {
        let g = five_vertex_graph();
        let es = full_eigensystem(&g).unwrap();
        assert_eq!(es.len(), 5);
        assert_eq!(es.eigenvalue(0), 0.0);
        assert!(es.eigenvalues()[1..].iter().all(|&l| l > 1e-8));
        let c = 1.0 / 10f64.sqrt();
        assert!(es.eigenfunction(0).iter().all(|&v| (v - c).abs() < 1e-15));
        assert!(identity_error(&es.gram()) < 1e-10);
        for j in 0..5 {
            let phi = es.eigenfunction(j);
            for x in 0..5 {
                let res = -laplacian_full(&g, phi, x).unwrap() - es.eigenvalue(j) * phi[x];
                assert!(res.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn neumann_spectrum_of_demo() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let es = neumann_eigensystem(&g, &p).unwrap();
        assert_eq!(es.len(), 3);
        assert_eq!(es.eigenvalue(0), 0.0);
        assert!(es.eigenvalue(1) > 1e-8);
        let c = es.eigenfunction(0)[0];
        assert!(es.eigenfunction(0).iter().all(|&v| (v - c).abs() < 1e-15));
        assert!(identity_error(&es.gram()) < 1e-10);
        for j in 0..3 {
            let phi = es.eigenfunction(j);
            for &x in p.interior() {
                let res = -laplacian_domain(&g, &p, phi, x).unwrap() - es.eigenvalue(j) * phi[x];
                assert!(res.abs() < 1e-10);
            }
            for &z in p.boundary() {
                assert!(normal_derivative(&g, &p, phi, z).unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_domains() {
        let g = five_vertex_graph();
        let all = DomainPartition::from_interior(&g, &["x1", "x2", "x3", "x4", "x5"]).unwrap();
        assert!(matches!(dirichlet_eigensystem(&g, &all), Err(Error::EmptyBoundary)));
        let split = DomainPartition::from_interior(&g, &["x4", "x5"]).unwrap();
        assert!(matches!(neumann_eigensystem(&g, &split), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn heat_kernel_basics() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let es = dirichlet_eigensystem(&g, &p).unwrap();
        assert_eq!(es.heat_kernel(0.0).unwrap().entries(), &DMatrix::identity(3, 3));
        assert!(identity_error(&es.heat_kernel_sum(0.0)) < 1e-12);
        let k = es.heat_kernel(0.1).unwrap();
        assert!(k.entries().iter().all(|&v| v > 0.0));
        for a in 0..3 {
            let row: f64 = k.entries().row(a).sum();
            assert!(row > 0.0 && row <= 1.0);
        }
        assert_eq!(k.get(3, 0), 0.0);
        assert!(es.heat_kernel(-1.0).is_err());

        let full = full_eigensystem(&g).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let k = full.heat_kernel(t).unwrap();
            for x in 0..5 {
                assert!((k.entries().row(x).sum() - 1.0).abs() < 1e-10);
            }
        }
    }

    fn kernel_checks(es: &EigenSystem, mu: &[f64]) -> std::result::Result<(), TestCaseError> {
        let s = es.support();
        for t in [0.1, 1.0, 10.0] {
            let k = es.heat_kernel(t).unwrap();
            for a in 0..s.len() {
                for b in 0..s.len() {
                    let lhs = mu[s[a]] * k.entries()[(a, b)];
                    let rhs = mu[s[b]] * k.entries()[(b, a)];
                    prop_assert!((lhs - rhs).abs() < 1e-10);
                }
            }
        }
        let kt = es.heat_kernel(0.3).unwrap();
        let ks = es.heat_kernel(0.7).unwrap();
        let kts = es.heat_kernel(1.0).unwrap();
        prop_assert!((kt.compose(&ks) - kts.entries()).amax() < 1e-10);
        Ok(())
    }

    proptest! {
        #[test]
        fn random_full_systems(seed in any::<u64>(), n in 2usize..=10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_connected_graph(&mut rng, n, 0.3);
            let es = full_eigensystem(&g).unwrap();
            prop_assert!(identity_error(&es.gram()) < 1e-10);
            prop_assert!(es.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
            prop_assert!((es.reconstruct() - matrix::full_operator(&g)).amax() < 1e-9);
            for j in 0..n {
                let phi = es.eigenfunction(j);
                for x in 0..n {
                    let res = -laplacian_full(&g, phi, x).unwrap() - es.eigenvalue(j) * phi[x];
                    prop_assert!(res.abs() < 1e-10);
                }
            }
            kernel_checks(&es, g.measures())?;
            let k = es.heat_kernel(2.0).unwrap();
            for x in 0..n {
                prop_assert!((k.entries().row(x).sum() - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn random_bounded_systems(seed in any::<u64>(), n in 3usize..=10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (g, p) = random_domain(&mut rng, n, n / 2, 0.3);
            let d = dirichlet_eigensystem(&g, &p).unwrap();
            prop_assert!(d.eigenvalue(0) > 0.0);
            prop_assert!(p.interior().iter().all(|&x| d.eigenfunction(0)[x] > 0.0));
            prop_assert!((d.reconstruct() - matrix::dirichlet_operator(&g, &p)).amax() < 1e-9);
            kernel_checks(&d, g.measures())?;
            let k = d.heat_kernel(0.5).unwrap();
            for a in 0..p.interior().len() {
                let row = k.entries().row(a).sum();
                prop_assert!(row > 0.0 && row <= 1.0 + 1e-12);
            }

            let nm = neumann_eigensystem(&g, &p).unwrap();
            prop_assert!(identity_error(&nm.gram()) < 1e-10);
            prop_assert!((nm.reconstruct() - matrix::neumann_operator(&g, &p)).amax() < 1e-9);
            prop_assert!(nm.eigenvalues().len() < 2 || nm.eigenvalue(1) > 1e-10);
            for j in 0..nm.len() {
                let phi = nm.eigenfunction(j);
                for &x in p.interior() {
                    let res = -laplacian_domain(&g, &p, phi, x).unwrap() - nm.eigenvalue(j) * phi[x];
                    prop_assert!(res.abs() < 1e-10);
                }
                for &z in p.boundary() {
                    prop_assert!(normal_derivative(&g, &p, phi, z).unwrap().abs() < 1e-10);
                }
            }
            kernel_checks(&nm, g.measures())?;
        }
    }
}
