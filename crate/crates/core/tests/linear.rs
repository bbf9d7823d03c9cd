mod common;

use common::{closure, sup_diff, Kind, RandomLinear};
use graphpde::graph::GraphFunction;
use graphpde::linear::{solve_linear, LinearParabolicProblem};
use graphpde::series::uniform_grid;
use proptest::prelude::*;

#[test]
fn spectral_solution_matches_euler_oracle() {
    for (seed, kind) in [(1, Kind::Dirichlet), (2, Kind::Neumann), (3, Kind::Cauchy)] {
        let p = RandomLinear::generate(seed, kind);
        let series = solve_linear(&p.problem(), &uniform_grid(1.0, 100)).unwrap();
        let oracle = p.euler(1e-4, 1.0);
        let dom = closure(&p);
        let spectral: Vec<f64> = dom.iter().map(|&x| series.last()[x]).collect();
        let euler: Vec<f64> = dom.iter().map(|&x| oracle[x]).collect();
        let err = sup_diff(&spectral, &euler);
        assert!(err < 1e-2, "{kind:?}: discrepancy {err:e}");
    }
}

#[test]
fn neumann_solution_carries_the_prescribed_flux() {
    let p = RandomLinear::generate(11, Kind::Neumann);
    let part = p.partition.as_ref().unwrap();
    let series = solve_linear(&p.problem(), &uniform_grid(1.0, 20)).unwrap();
    let g = &p.graph;
    for (&t, u) in series.times().iter().zip(series.states()) {
        for &z in part.boundary() {
            let flux: f64 = part
                .interior()
                .iter()
                .map(|&y| g.weight(z, y) * (u[z] - u[y]))
                .sum::<f64>()
                / g.measure(z);
            let want = p.g0[z] + p.g1[z] * t;
            assert!((flux - want).abs() < 1e-9, "t = {t}, z = {z}: {flux} vs {want}");
        }
    }
}

#[test]
fn dirichlet_solution_takes_boundary_values() {
    let p = RandomLinear::generate(12, Kind::Dirichlet);
    let part = p.partition.as_ref().unwrap();
    let series = solve_linear(&p.problem(), &uniform_grid(1.0, 20)).unwrap();
    for (&t, u) in series.times().iter().zip(series.states()).skip(1) {
        for &z in part.boundary() {
            assert!((u[z] - (p.g0[z] + p.g1[z] * t)).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solution_map_is_linear(seed in any::<u64>(), kind in 0usize..3, a in -2.0f64..2.0) {
        let kind = [Kind::Dirichlet, Kind::Neumann, Kind::Cauchy][kind];
        let p = RandomLinear::generate(seed, kind);
        let mut q = p.clone();
        q.initial.iter_mut().for_each(|v| *v = 1.0 - *v);
        q.knots.iter_mut().flatten().for_each(|v| *v *= -0.5);
        q.g0.iter_mut().for_each(|v| *v += 0.3);
        let grid = uniform_grid(1.0, 10);
        let up = solve_linear(&p.problem(), &grid).unwrap();
        let uq = solve_linear(&q.problem(), &grid).unwrap();
        let pp = p.problem();
        let pq = q.problem();
        let combined = LinearParabolicProblem {
            geometry: pp.geometry,
            shift: p.shift,
            forcing: pp.forcing.combine(a, &pq.forcing, 1.0),
            boundary: pp.boundary.combine(a, &pq.boundary, 1.0),
            initial: GraphFunction::new(p.initial.iter().zip(&q.initial).map(|(x, y)| a * x + y).collect()),
        };
        let uc = solve_linear(&combined, &grid).unwrap();
        for k in 0..grid.len() {
            for x in closure(&p) {
                let want = a * up.state(k)[x] + uq.state(k)[x];
                prop_assert!((uc.state(k)[x] - want).abs() < 1e-10 * (1.0 + want.abs()));
            }
        }
    }
}
