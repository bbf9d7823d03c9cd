//! Shifted elliptic solves (−Δ + M) u = rhs with boundary data, and the
//! drift variant −Δ_V u − b·∇u + (c + M) u = rhs on the whole graph.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};
use crate::graph::operators::{drift_dot_gradient, laplacian_domain, laplacian_full, normal_derivative};
use crate::graph::{
    check_domain, matrix, BoundaryKind, DomainPartition, DriftField, Geometry, GraphFunction,
    WeightedGraph,
};
use crate::spectral::{neumann_eigensystem, EigenSystem};

type Lu = LU<f64, Dyn, Dyn>;

fn factor(a: DMatrix<f64>) -> Result<Lu> {
    let lu = a.lu();
    if lu.is_invertible() {
        Ok(lu)
    } else {
        Err(Error::SingularSystem)
    }
}

fn solve_lu(lu: &Lu, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let x = lu.solve(rhs).ok_or(Error::SingularSystem)?;
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::NonFinite("linear solve"))
    }
}

fn check_len(n: usize, v: &[f64]) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: n,
            got: v.len(),
        })
    }
}

/// Solves Δ_Ω û = I on Ω with ∂û/∂n = g on ∂Ω, where I is the constant
/// (∫_{∂Ω} g dμ) / Vol(Ω) that makes the problem solvable. The gauge is
/// Σ_Ω μ û = 0.
#[derive(Debug, Clone)]
pub struct NeumannLift<'a> {
    graph: &'a WeightedGraph,
    partition: &'a DomainPartition,
    lu: Lu,
    volume: f64,
}

impl<'a> NeumannLift<'a> {
    pub fn new(graph: &'a WeightedGraph, partition: &'a DomainPartition) -> Result<Self> {
        let k = partition.interior().len();
        let a = matrix::neumann_operator(graph, partition);
        let mut bordered = DMatrix::zeros(k + 1, k + 1);
        bordered.view_mut((0, 0), (k, k)).copy_from(&a);
        for (i, &x) in partition.interior().iter().enumerate() {
            bordered[(i, k)] = 1.0;
            bordered[(k, i)] = graph.measure(x);
        }
        let volume = partition.interior().iter().map(|&x| graph.measure(x)).sum();
        Ok(Self {
            graph,
            partition,
            lu: factor(bordered)?,
            volume,
        })
    }

    /// Returns I and û, with û extended to ∂Ω by the flux condition.
    pub fn solve(&self, g: &[f64]) -> Result<(f64, GraphFunction)> {
        let (graph, p) = (self.graph, self.partition);
        check_len(graph.len(), g)?;
        let flux: f64 = p.boundary().iter().map(|&z| graph.measure(z) * g[z]).sum();
        let level = flux / self.volume;
        let k = p.interior().len();
        // −Δ_Ω û = A_N û − lift(g) = −I.
        let lift = matrix::neumann_lift(graph, p, g);
        let mut rhs = DVector::zeros(k + 1);
        for i in 0..k {
            rhs[i] = lift[i] - level;
        }
        let sol = solve_lu(&self.lu, &rhs)?;
        let mut u = vec![0.0; graph.len()];
        for (i, &x) in p.interior().iter().enumerate() {
            u[x] = sol[i];
        }
        matrix::neumann_extend(graph, p, &mut u, Some(g));
        Ok((level, GraphFunction::new(u)))
    }
}

enum Method<'a> {
    Direct(Lu),
    Spectral {
        es: EigenSystem,
        lift: NeumannLift<'a>,
    },
}

/// Reusable solver for (−Δ + M) u = rhs with Dirichlet values or Neumann flux.
///
/// Dirichlet and whole-graph problems use a dense LU factorization; Neumann
/// problems use the eigenfunction quotient w = Σ F_i / (K_i + M) Φ_i with
/// F_i the μ-weighted coefficients, plus the flux lift.
pub struct EllipticSolver<'a> {
    geometry: Geometry<'a>,
    shift: f64,
    method: Method<'a>,
}

impl<'a> EllipticSolver<'a> {
    pub fn new(geometry: Geometry<'a>, shift: f64) -> Result<Self> {
        if !(shift > 0.0 && shift.is_finite()) {
            return Err(Error::InvalidParameter(format!("shift M = {shift} must be positive")));
        }
        let method = match geometry {
            Geometry::Whole(g) => {
                let n = g.len();
                Method::Direct(factor(matrix::full_operator(g) + DMatrix::identity(n, n) * shift)?)
            }
            Geometry::Bounded {
                graph,
                partition,
                kind: BoundaryKind::Dirichlet,
            } => {
                check_domain(graph, partition)?;
                let k = partition.interior().len();
                let a = matrix::dirichlet_operator(graph, partition) + DMatrix::identity(k, k) * shift;
                Method::Direct(factor(a)?)
            }
            Geometry::Bounded {
                graph,
                partition,
                kind: BoundaryKind::Neumann,
            } => Method::Spectral {
                es: neumann_eigensystem(graph, partition)?,
                lift: NeumannLift::new(graph, partition)?,
            },
        };
        Ok(Self {
            geometry,
            shift,
            method,
        })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn geometry(&self) -> Geometry<'a> {
        self.geometry
    }

    /// Solves with right-hand side `rhs` (read on Ω or V) and boundary `data`
    /// (values or flux, read on ∂Ω; ignored on the whole graph).
    pub fn solve(&self, rhs: &[f64], data: &[f64]) -> Result<GraphFunction> {
        let graph = self.geometry.graph();
        let n = graph.len();
        check_len(n, rhs)?;
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("elliptic right-hand side"));
        }
        match (&self.method, self.geometry) {
            (Method::Direct(lu), Geometry::Whole(_)) => {
                let x = solve_lu(lu, &DVector::from_column_slice(rhs))?;
                Ok(GraphFunction::new(x.iter().copied().collect()))
            }
            (Method::Direct(lu), Geometry::Bounded { partition, .. }) => {
                check_len(n, data)?;
                let b = matrix::restrict(partition, rhs) + matrix::dirichlet_lift(graph, partition, data);
                let x = solve_lu(lu, &b)?;
                let mut u = vec![0.0; n];
                for &z in partition.boundary() {
                    u[z] = data[z];
                }
                matrix::scatter(partition, &x, &mut u);
                Ok(GraphFunction::new(u))
            }
            (Method::Spectral { es, lift }, Geometry::Bounded { partition, .. }) => {
                check_len(n, data)?;
                let homogeneous = partition.boundary().iter().all(|&z| data[z] == 0.0);
                let (level, z) = if homogeneous {
                    (0.0, GraphFunction::zeros(n))
                } else {
                    lift.solve(data)?
                };
                // (−Δ + M) w = rhs − (−Δ Z + M Z) = rhs + I − M Z with zero flux.
                let source: Vec<f64> = (0..n)
                    .map(|x| rhs[x] + level - self.shift * z[x])
                    .collect();
                let coeffs: Vec<f64> = es
                    .project(&source)
                    .iter()
                    .zip(es.eigenvalues())
                    .map(|(f, k)| f / (k + self.shift))
                    .collect();
                Ok(es.synthesize(&coeffs).combine(1.0, &z, 1.0))
            }
            (Method::Spectral { .. }, Geometry::Whole(_)) => unreachable!("spectral method needs a boundary"),
        }
    }
}

/// One-shot (−Δ + M) u = rhs with boundary values (Dirichlet) or flux (Neumann).
pub fn solve_elliptic_shifted(
    geometry: Geometry<'_>,
    shift: f64,
    rhs: &[f64],
    data: &[f64],
) -> Result<GraphFunction> {
    EllipticSolver::new(geometry, shift)?.solve(rhs, data)
}

/// Pointwise −Δu + M u − rhs on Ω (or V), plus ∂u/∂n − data on ∂Ω for Neumann
/// problems and u − data on ∂Ω for Dirichlet problems. Entries off the active
/// set are zero.
pub fn elliptic_residual(
    geometry: Geometry<'_>,
    shift: f64,
    u: &[f64],
    rhs: &[f64],
    data: &[f64],
) -> Result<Vec<f64>> {
    let graph = geometry.graph();
    let mut out = vec![0.0; graph.len()];
    match geometry {
        Geometry::Whole(g) => {
            for x in 0..g.len() {
                out[x] = -laplacian_full(g, u, x)? + shift * u[x] - rhs[x];
            }
        }
        Geometry::Bounded { partition, kind, .. } => {
            for &x in partition.interior() {
                out[x] = -laplacian_domain(graph, partition, u, x)? + shift * u[x] - rhs[x];
            }
            for &z in partition.boundary() {
                out[z] = match kind {
                    BoundaryKind::Dirichlet => u[z] - data[z],
                    BoundaryKind::Neumann => normal_derivative(graph, partition, u, z)? - data[z],
                };
            }
        }
    }
    Ok(out)
}

/// Matrix D_b of u ↦ b·∇u.
pub fn drift_matrix(graph: &WeightedGraph, b: &DriftField) -> DMatrix<f64> {
    let n = graph.len();
    let mut d = DMatrix::zeros(n, n);
    for x in 0..n {
        let mx = 2.0 * graph.measure(x);
        for &y in graph.neighbors(x) {
            let s = b[y] * (graph.weight(x, y) / mx).sqrt();
            d[(x, y)] += s;
            d[(x, x)] -= s;
        }
    }
    d
}

/// M + min c − max|b|² / 2, which must exceed 1 for the drift solve.
pub fn coercivity_margin(b: &DriftField, c: &[f64], shift: f64) -> f64 {
    let c0 = c.iter().copied().fold(f64::INFINITY, f64::min);
    let bmax = b.max_norm();
    shift + c0 - 0.5 * bmax * bmax
}

/// Solver for −Δ_V u − b·∇u + (c + M) u = rhs on the whole graph.
pub struct DriftEllipticSolver {
    lu: Lu,
    margin: f64,
}

impl DriftEllipticSolver {
    pub fn new(graph: &WeightedGraph, b: &DriftField, c: &[f64], shift: f64) -> Result<Self> {
        let n = graph.len();
        check_len(n, b)?;
        check_len(n, c)?;
        let margin = coercivity_margin(b, c, shift);
        if !(margin > 1.0) {
            return Err(Error::Coercivity { margin });
        }
        let mut a = matrix::full_operator(graph) - drift_matrix(graph, b);
        for x in 0..n {
            a[(x, x)] += c[x] + shift;
        }
        Ok(Self {
            lu: factor(a)?,
            margin,
        })
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<GraphFunction> {
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("elliptic right-hand side"));
        }
        let x = solve_lu(&self.lu, &DVector::from_column_slice(rhs))?;
        Ok(GraphFunction::new(x.iter().copied().collect()))
    }
}

/// One-shot drift solve.
pub fn solve_elliptic_drift(
    graph: &WeightedGraph,
    b: &DriftField,
    c: &[f64],
    shift: f64,
    rhs: &[f64],
) -> Result<GraphFunction> {
    DriftEllipticSolver::new(graph, b, c, shift)?.solve(rhs)
}

/// Pointwise −Δ_V u − b·∇u + (c + M) u − rhs.
pub fn drift_residual(
    graph: &WeightedGraph,
    b: &DriftField,
    c: &[f64],
    shift: f64,
    u: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    (0..graph.len())
        .map(|x| {
            Ok(-laplacian_full(graph, u, x)? - drift_dot_gradient(graph, b, u, x)?
                + (c[x] + shift) * u[x]
                - rhs[x])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{five_vertex_graph, five_vertex_partition};
    use crate::graph::random::{random_connected_graph, random_domain};
    use crate::spectral::dirichlet_eigensystem;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn eigenfunction_right_hand_side() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let es = dirichlet_eigensystem(&g, &p).unwrap();
        let m = 2.5;
        let phi = es.eigenfunction(0);
        let rhs = phi.scaled(es.eigenvalue(0) + m);
        let u = solve_elliptic_shifted(Geometry::dirichlet(&g, &p), m, &rhs, &[0.0; 5]).unwrap();
        assert!(u.sup_distance(phi) < 1e-12);
    }

    #[test]
    fn neumann_constant_solution() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let (m, k) = (1.5, 0.7);
        let u = solve_elliptic_shifted(Geometry::neumann(&g, &p), m, &[m * k; 5], &[0.0; 5]).unwrap();
        assert!(u.iter().all(|&v| (v - k).abs() < 1e-12));
    }

    #[test]
    fn drift_without_drift_matches_shifted_solve() {
        let g = five_vertex_graph();
        let rhs = [1.0, -2.0, 0.5, 3.0, 0.0];
        let (c0, m) = (0.4, 1.1);
        let a = solve_elliptic_drift(&g, &DriftField::zeros(5), &[c0; 5], m, &rhs).unwrap();
        let b = solve_elliptic_shifted(Geometry::Whole(&g), m + c0, &rhs, &[]).unwrap();
        assert!(a.sup_distance(&b) < 1e-12);
    }

    #[test]
    fn coercivity_is_enforced() {
        let g = five_vertex_graph();
        let b = DriftField::constant(5, 2.0);
        let err = solve_elliptic_drift(&g, &b, &[0.0; 5], 2.5, &[0.0; 5]);
        assert!(matches!(err, Err(Error::Coercivity { margin }) if (margin - 0.5).abs() < 1e-15));
        assert!(EllipticSolver::new(Geometry::Whole(&g), 0.0).is_err());
    }

    #[test]
    fn neumann_lift_satisfies_its_problem() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let flux = [0.0, 0.0, 0.0, 1.0, -0.25];
        let lift = NeumannLift::new(&g, &p).unwrap();
        let (level, u) = lift.solve(&flux).unwrap();
        assert!((level - 0.75 / 8.0).abs() < 1e-15);
        for &x in p.interior() {
            assert!((laplacian_domain(&g, &p, &u, x).unwrap() - level).abs() < 1e-12);
        }
        for &z in p.boundary() {
            assert!((normal_derivative(&g, &p, &u, z).unwrap() - flux[z]).abs() < 1e-12);
        }
        let mean: f64 = p.interior().iter().map(|&x| g.measure(x) * u[x]).sum();
        assert!(mean.abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn residuals_vanish(seed in any::<u64>(), n in 4usize..=10, m in 0.1..5.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (g, p) = random_domain(&mut rng, n, n / 2, 0.3);
            let k = g.len();
            let rhs: Vec<f64> = (0..k).map(|i| ((i * 37 + seed as usize % 13) % 7) as f64 - 3.0).collect();
            let data: Vec<f64> = (0..k).map(|i| ((i * 11) % 5) as f64 * 0.3 - 0.6).collect();
            for geometry in [Geometry::dirichlet(&g, &p), Geometry::neumann(&g, &p)] {
                let u = solve_elliptic_shifted(geometry, m, &rhs, &data).unwrap();
                let r = elliptic_residual(geometry, m, &u, &rhs, &data).unwrap();
                prop_assert!(max_abs(&r) < 1e-10, "{:?}", r);
            }
            let full = random_connected_graph(&mut rng, n, 0.3);
            let rhs = &rhs[..1].repeat(n);
            let u = solve_elliptic_shifted(Geometry::Whole(&full), m, rhs, &[]).unwrap();
            let r = elliptic_residual(Geometry::Whole(&full), m, &u, rhs, &[]).unwrap();
            prop_assert!(max_abs(&r) < 1e-10);

            let b = DriftField::new((0..n).map(|i| (i % 3) as f64 * 0.4).collect());
            let c: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
            let shift = 2.0 + m;
            let u = solve_elliptic_drift(&full, &b, &c, shift, rhs).unwrap();
            let r = drift_residual(&full, &b, &c, shift, &u, rhs).unwrap();
            prop_assert!(max_abs(&r) < 1e-10);
        }
    }
}
