//! Pointwise discrete differential operators and weighted integrals.
//!
//! Every function takes a full-length vertex function; values on vertices
//! outside the relevant closure are ignored.

use crate::error::{Error, Result};

use super::{DomainPartition, DriftField, Role, WeightedGraph};

fn check_len(graph: &WeightedGraph, u: &[f64]) -> Result<()> {
    if u.len() == graph.len() {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: graph.len(),
            got: u.len(),
        })
    }
}

fn require_interior(graph: &WeightedGraph, p: &DomainPartition, x: usize) -> Result<()> {
    graph.check_vertex(x)?;
    if p.is_interior(x) {
        Ok(())
    } else {
        Err(Error::NotInterior(graph.id(x).to_string()))
    }
}

fn require_boundary(graph: &WeightedGraph, p: &DomainPartition, z: usize) -> Result<()> {
    graph.check_vertex(z)?;
    if p.is_boundary(z) {
        Ok(())
    } else {
        Err(Error::NotBoundary(graph.id(z).to_string()))
    }
}

/// Δ_V u(x) = Σ_y (u(y) − u(x)) ω(y, x) / μ(x).
pub fn laplacian_full(graph: &WeightedGraph, u: &[f64], x: usize) -> Result<f64> {
    check_len(graph, u)?;
    graph.check_vertex(x)?;
    let s: f64 = graph
        .neighbors(x)
        .iter()
        .map(|&y| (u[y] - u[x]) * graph.weight(y, x))
        .sum();
    Ok(s / graph.measure(x))
}

/// Δ_V u at every vertex.
pub fn laplacian_full_all(graph: &WeightedGraph, u: &[f64]) -> Result<Vec<f64>> {
    (0..graph.len()).map(|x| laplacian_full(graph, u, x)).collect()
}

/// Δ_Ω u(x) for interior x: the sum runs over y ∈ Ω ∪ ∂Ω.
pub fn laplacian_domain(
    graph: &WeightedGraph,
    p: &DomainPartition,
    u: &[f64],
    x: usize,
) -> Result<f64> {
    check_len(graph, u)?;
    require_interior(graph, p, x)?;
    let s: f64 = graph
        .neighbors(x)
        .iter()
        .filter(|&&y| p.role(y) != Role::Plain)
        .map(|&y| (u[y] - u[x]) * graph.weight(y, x))
        .sum();
    Ok(s / graph.measure(x))
}

/// Outward normal derivative ∂u/∂n(z) = Σ_{y∈Ω} (u(z) − u(y)) ω(z, y) / μ(z).
pub fn normal_derivative(
    graph: &WeightedGraph,
    p: &DomainPartition,
    u: &[f64],
    z: usize,
) -> Result<f64> {
    check_len(graph, u)?;
    require_boundary(graph, p, z)?;
    let s: f64 = graph
        .neighbors(z)
        .iter()
        .filter(|&&y| p.is_interior(y))
        .map(|&y| (u[z] - u[y]) * graph.weight(z, y))
        .sum();
    Ok(s / graph.measure(z))
}

/// Γ(u, v)(x) = (1 / 2μ(x)) Σ_y ω(x, y) (u(y) − u(x)) (v(y) − v(x)).
pub fn gradient_form(graph: &WeightedGraph, u: &[f64], v: &[f64], x: usize) -> Result<f64> {
    check_len(graph, u)?;
    check_len(graph, v)?;
    graph.check_vertex(x)?;
    let s: f64 = graph
        .neighbors(x)
        .iter()
        .map(|&y| graph.weight(x, y) * (u[y] - u[x]) * (v[y] - v[x]))
        .sum();
    Ok(s / (2.0 * graph.measure(x)))
}

/// |∇u|(x) = √Γ(u, u)(x).
pub fn gradient_norm(graph: &WeightedGraph, u: &[f64], x: usize) -> Result<f64> {
    Ok(gradient_form(graph, u, u, x)?.max(0.0).sqrt())
}

/// b·∇u(x) = Σ_y b(y) (u(y) − u(x)) √(ω(x, y) / 2μ(x)), with b taken at the neighbor.
pub fn drift_dot_gradient(
    graph: &WeightedGraph,
    b: &DriftField,
    u: &[f64],
    x: usize,
) -> Result<f64> {
    check_len(graph, u)?;
    check_len(graph, b)?;
    graph.check_vertex(x)?;
    let mx = 2.0 * graph.measure(x);
    Ok(graph
        .neighbors(x)
        .iter()
        .map(|&y| b[y] * (u[y] - u[x]) * (graph.weight(x, y) / mx).sqrt())
        .sum())
}

/// ∫_S u dμ = Σ_{x∈S} μ(x) u(x).
pub fn integrate(graph: &WeightedGraph, u: &[f64], subset: &[usize]) -> Result<f64> {
    check_len(graph, u)?;
    subset.iter().try_fold(0.0, |acc, &x| {
        graph.check_vertex(x)?;
        Ok(acc + graph.measure(x) * u[x])
    })
}

/// Vol(S) = Σ_{x∈S} μ(x).
pub fn volume(graph: &WeightedGraph, subset: &[usize]) -> Result<f64> {
    subset.iter().try_fold(0.0, |acc, &x| {
        graph.check_vertex(x)?;
        Ok(acc + graph.measure(x))
    })
}

pub fn sup_norm(u: &[f64]) -> Result<f64> {
    if u.is_empty() {
        return Err(Error::EmptySubset);
    }
    Ok(u.iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// (Σ_x μ(x) |u(x)|^p)^{1/p} over all vertices.
pub fn lp_norm(graph: &WeightedGraph, u: &[f64], p: f64) -> Result<f64> {
    let all: Vec<usize> = (0..graph.len()).collect();
    lp_norm_on(graph, u, p, &all)
}

/// L^p norm restricted to a vertex subset.
pub fn lp_norm_on(graph: &WeightedGraph, u: &[f64], p: f64, subset: &[usize]) -> Result<f64> {
    check_len(graph, u)?;
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("L^p exponent {p} must be >= 1")));
    }
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if p.is_infinite() {
        return Ok(subset.iter().fold(0.0, |m, &x| m.max(u[x].abs())));
    }
    let mut s = 0.0;
    for &x in subset {
        graph.check_vertex(x)?;
        s += graph.measure(x) * u[x].abs().powf(p);
    }
    Ok(s.powf(1.0 / p))
}

/// μ-weighted inner product Σ_{x∈S} μ(x) u(x) v(x).
pub fn inner(graph: &WeightedGraph, u: &[f64], v: &[f64], subset: &[usize]) -> f64 {
    subset
        .iter()
        .map(|&x| graph.measure(x) * u[x] * v[x])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{five_vertex_graph, five_vertex_partition};
    use crate::graph::random::random_connected_graph;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-12;

    fn demo_u() -> Vec<f64> {
        vec![8.0, 1.0, 0.5, 0.0, 0.0]
    }

    #[test]
    fn full_laplacian_at_x1() {
        let g = five_vertex_graph();
        let v = laplacian_full(&g, &demo_u(), 0).unwrap();
        assert!((v + 7.5).abs() < EPS);
        assert!(matches!(laplacian_full(&g, &demo_u(), 9), Err(Error::VertexOutOfRange(9))));
    }

    #[test]
    fn domain_laplacian_values() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        assert!((laplacian_domain(&g, &p, &demo_u(), 1).unwrap() - 3.25).abs() < EPS);
        let boundary_one = vec![0.0, 0.0, 0.0, 1.0, 1.0];
        let v = laplacian_domain(&g, &p, &boundary_one, 0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < EPS);
        assert!(matches!(
            laplacian_domain(&g, &p, &demo_u(), 3),
            Err(Error::NotInterior(_))
        ));
    }

    #[test]
    fn normal_derivative_at_x4() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        assert!((normal_derivative(&g, &p, &demo_u(), 3).unwrap() + 8.0).abs() < EPS);
        assert!(normal_derivative(&g, &p, &[2.0; 5], 4).unwrap().abs() < EPS);
        assert!(matches!(
            normal_derivative(&g, &p, &demo_u(), 0),
            Err(Error::NotBoundary(_))
        ));
    }

    #[test]
    fn drift_with_unit_field() {
        let g = five_vertex_graph();
        let b = DriftField::constant(5, 1.0);
        let u = vec![1.0, 0.0, 0.0, 0.0, 0.0];
        assert!((drift_dot_gradient(&g, &b, &u, 1).unwrap() - 0.5).abs() < EPS);
        let zero = DriftField::zeros(5);
        assert_eq!(drift_dot_gradient(&g, &zero, &u, 1).unwrap(), 0.0);
    }

    #[test]
    fn integrals_and_norms() {
        let g = five_vertex_graph();
        let all: Vec<usize> = (0..5).collect();
        assert!((integrate(&g, &[1.0; 5], &all).unwrap() - 10.0).abs() < EPS);
        assert!((volume(&g, &all).unwrap() - 10.0).abs() < EPS);
        assert_eq!(sup_norm(&demo_u()).unwrap(), 8.0);
        assert!(matches!(sup_norm(&[]), Err(Error::EmptySubset)));
        let phi: Vec<f64> = (0..5).map(|_| 1.0 / 10f64.sqrt()).collect();
        assert!((lp_norm(&g, &phi, 2.0).unwrap() - 1.0).abs() < EPS);
        assert!(lp_norm(&g, &phi, 0.5).is_err());
    }

    /// Green identity: Σ_Ω μ Δ_Ω u = Σ_∂Ω μ ∂u/∂n.
    #[test]
    fn green_identity_sign() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let u = vec![0.0, 0.0, 0.0, 1.0, 1.0];
        let lhs: f64 = p
            .interior()
            .iter()
            .map(|&x| g.measure(x) * laplacian_domain(&g, &p, &u, x).unwrap())
            .sum();
        let rhs: f64 = p
            .boundary()
            .iter()
            .map(|&z| g.measure(z) * normal_derivative(&g, &p, &u, z).unwrap())
            .sum();
        assert!((lhs - 2.0).abs() < EPS);
        assert!((rhs - 2.0).abs() < EPS);
    }

    fn vec5() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0..10.0f64, 5)
    }

    proptest! {
        #[test]
        fn green_identity_random(u in vec5()) {
            let g = five_vertex_graph();
            let p = five_vertex_partition();
            let lhs: f64 = p.interior().iter()
                .map(|&x| g.measure(x) * laplacian_domain(&g, &p, &u, x).unwrap()).sum();
            let rhs: f64 = p.boundary().iter()
                .map(|&z| g.measure(z) * normal_derivative(&g, &p, &u, z).unwrap()).sum();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn full_laplacian_is_self_adjoint(seed in 0u64..1000, n in 5usize..=10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_connected_graph(&mut rng, n, 0.3);
            let u: Vec<f64> = (0..n).map(|i| ((i * 7 + seed as usize) % 11) as f64 - 5.0).collect();
            let v: Vec<f64> = (0..n).map(|i| ((i * 3 + 1) % 5) as f64 * 0.7).collect();
            let lu = laplacian_full_all(&g, &u).unwrap();
            let lv = laplacian_full_all(&g, &v).unwrap();
            let all: Vec<usize> = (0..n).collect();
            let a = inner(&g, &v, &lu, &all);
            let b = inner(&g, &u, &lv, &all);
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }

        #[test]
        fn operators_are_linear_and_kill_constants(
            u in vec5(), w in vec5(), v in vec5(), a in -3.0..3.0f64, b in -3.0..3.0f64, c in -5.0..5.0f64
        ) {
            let g = five_vertex_graph();
            let p = five_vertex_partition();
            let mix: Vec<f64> = u.iter().zip(&w).map(|(x, y)| a * x + b * y).collect();
            let konst = vec![c; 5];
            for x in 0..5 {
                let lhs = laplacian_full(&g, &mix, x).unwrap();
                let rhs = a * laplacian_full(&g, &u, x).unwrap() + b * laplacian_full(&g, &w, x).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-9);
                prop_assert!(laplacian_full(&g, &konst, x).unwrap().abs() < EPS);
                prop_assert!(gradient_form(&g, &u, &u, x).unwrap() >= 0.0);
                prop_assert!(gradient_norm(&g, &konst, x).unwrap() == 0.0);
                let lhs = gradient_form(&g, &mix, &v, x).unwrap();
                let rhs = a * gradient_form(&g, &u, &v, x).unwrap() + b * gradient_form(&g, &w, &v, x).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-9);
            }
            for &x in p.interior() {
                prop_assert!(laplacian_domain(&g, &p, &konst, x).unwrap().abs() < EPS);
            }
        }

        /// For v vanishing on ∂Ω: ∫_Ω (−Δ_Ω u) v dμ = ½ Σ_{x,y∈Ω̄} ω (u(y)−u(x))(v(y)−v(x)).
        #[test]
        fn summation_by_parts(u in vec5(), v in vec5()) {
            let g = five_vertex_graph();
            let p = five_vertex_partition();
            let mut v = v;
            for &z in p.boundary() { v[z] = 0.0; }
            let lhs: f64 = p.interior().iter()
                .map(|&x| -laplacian_domain(&g, &p, &u, x).unwrap() * v[x] * g.measure(x)).sum();
            let mut form = 0.0;
            for x in 0..5 {
                for y in 0..5 {
                    if p.is_interior(x) || p.is_interior(y) {
                        form += g.weight(x, y) * (u[y] - u[x]) * (v[y] - v[x]);
                    }
                }
            }
            prop_assert!((lhs - 0.5 * form).abs() < 1e-9);
        }
    }
}
