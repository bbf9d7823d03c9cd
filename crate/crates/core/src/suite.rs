//! Seeded randomized suites for the maximum principles, discrete comparison
//! and monotone chains. Case k draws from stream k of a generator seeded with
//! `seed`, so a failing case can be rerun alone.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::comparison::{
    assert_ordering, certify_parabolic, check_positivity, linear_reaction, BoundaryOperator, PositivityMode,
};
use crate::dynamics::{integrate, Scenario};
use crate::error::Result;
use crate::graph::random::{random_connected_graph, random_domain};
use crate::graph::{DomainPartition, DriftField, Geometry, GraphFunction, WeightedGraph};
use crate::linear::{solve_linear, LinearParabolicProblem};
use crate::monotone::{cauchy_elliptic_monotone, default_bracket, elliptic_monotone, Bracket, MonotoneOptions};
use crate::reaction::Reaction;
use crate::series::{uniform_grid, SpaceTimeData};
use crate::spectral::dirichlet_eigensystem;

/// Ordering violations beyond this count as failures.
pub const ORDER_TOL: f64 = 1e-10;

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Largest violation seen over all cases (≤ 0 when every case is clean).
    pub worst: f64,
    /// Wall-clock time; left out of serialized reports so they stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
    /// One line per failing case.
    pub details: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
            seconds: 0.0,
            details: Vec::new(),
        }
    }

    fn record(&mut self, case: usize, violation: f64, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        self.worst = self.worst.max(violation);
        if !ok {
            self.failures += 1;
            self.details.push(format!("case {case}: {}", what()));
        }
    }

    fn error(&mut self, case: usize, e: crate::Error) {
        self.cases += 1;
        self.failures += 1;
        self.details.push(format!("case {case}: {e}"));
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Dirichlet,
    Neumann,
    Whole,
}

fn shape_of(case: usize) -> Shape {
    match case % 3 {
        0 => Shape::Dirichlet,
        1 => Shape::Neumann,
        _ => Shape::Whole,
    }
}

/// Graph and optional partition for a case; whole-graph cases carry `None`.
fn random_setting(rng: &mut ChaCha8Rng, shape: Shape) -> (WeightedGraph, Option<DomainPartition>) {
    let n = rng.gen_range(4..10);
    match shape {
        Shape::Whole => (random_connected_graph(rng, n, 0.3), None),
        _ => {
            let interior = rng.gen_range(1..n - 1);
            let (g, p) = random_domain(rng, n, interior, 0.3);
            (g, Some(p))
        }
    }
}

fn geometry_of<'a>(shape: Shape, g: &'a WeightedGraph, p: Option<&'a DomainPartition>) -> Geometry<'a> {
    match (shape, p) {
        (Shape::Dirichlet, Some(p)) => Geometry::dirichlet(g, p),
        (Shape::Neumann, Some(p)) => Geometry::neumann(g, p),
        _ => Geometry::Whole(g),
    }
}

/// Nonnegative affine-in-time data a(x) + b(x)·t.
fn affine_data(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SpaceTimeData {
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..scale)).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..scale)).collect();
    SpaceTimeData::function(move |x, t| a[x] + b[x] * t)
}

fn max_principle_case(case: usize, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    let shape = shape_of(case);
    let (g, p) = random_setting(rng, shape);
    let n = g.len();
    let geo = geometry_of(shape, &g, p.as_ref());
    let shift = rng.gen_range(0.0..1.0);
    let forcing = affine_data(rng, n, 1.0);
    let boundary = if shape == Shape::Whole {
        SpaceTimeData::Zero
    } else {
        affine_data(rng, n, 1.0)
    };
    let initial = GraphFunction::from_fn(n, |_| rng.gen_range(0.0..2.0));
    let problem = LinearParabolicProblem {
        geometry: geo,
        shift,
        forcing: forcing.clone(),
        boundary: boundary.clone(),
        initial: initial.clone(),
    };
    let series = solve_linear(&problem, &uniform_grid(1.0, 100))?;
    let reaction = linear_reaction(SpaceTimeData::Steady(GraphFunction::constant(n, -shift)), forcing);
    let op = BoundaryOperator::for_geometry(geo, boundary);
    let cert = certify_parabolic(&series, geo, &reaction, op.as_ref(), Some(&initial), None)?;
    let mut closure = geo.active();
    closure.extend_from_slice(geo.boundary());
    let sign = check_positivity(&series, &closure, PositivityMode::Nonneg, ORDER_TOL);
    let violation = (-sign.min_value).max(-cert.min_residual - cert.tolerance);
    report.record(case, violation, cert.verdict.is_super() && sign.passed, || {
        format!(
            "{shape:?}: verdict {:?}, min residual {:e}, min value {:e}",
            cert.verdict, cert.min_residual, sign.min_value
        )
    });
    Ok(())
}

/// Random linear problems with nonnegative forcing, boundary and initial data,
/// cycling through Dirichlet, Neumann and whole-graph settings. Each solution
/// must be certified a supersolution of the homogeneous problem and stay
/// nonnegative within [`ORDER_TOL`].
pub fn max_principle_suite(seed: u64, cases: usize) -> SuiteReport {
    let start = Instant::now();
    let mut report = SuiteReport::new("max_principle");
    for case in 0..cases {
        let mut rng = case_rng(seed, case);
        if let Err(e) = max_principle_case(case, &mut rng, &mut report) {
            report.error(case, e);
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    report
}

fn ordering_case(case: usize, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    let shape = shape_of(case);
    let (g, p) = random_setting(rng, shape);
    let n = g.len();
    let geo = geometry_of(shape, &g, p.as_ref());
    let reaction = Reaction::Logistic {
        a: rng.gen_range(0.5..2.0),
        b: 1.0,
    };
    let boundary = if shape == Shape::Dirichlet {
        SpaceTimeData::Steady(GraphFunction::from_fn(n, |_| rng.gen_range(0.0..1.0)))
    } else {
        SpaceTimeData::Zero
    };
    let lower = GraphFunction::from_fn(n, |_| rng.gen_range(0.0..1.5));
    let upper = GraphFunction::from_fn(n, |x| lower[x] + rng.gen_range(0.0..0.5));
    let run = |initial: GraphFunction| {
        integrate(&Scenario {
            geometry: geo,
            reaction: reaction.clone(),
            boundary: boundary.clone(),
            initial,
            horizon: 2.0,
            dt: 1e-3,
            stride: 20,
        })
    };
    let low = run(lower)?;
    let high = run(upper)?;
    let order = assert_ordering(&high, &low, &geo.active(), ORDER_TOL)?;
    report.record(case, -order.min_gap, order.ordered, || {
        format!("{shape:?}: min gap {:e} at {:?}", order.min_gap, order.first_violation)
    });
    Ok(())
}

/// Pairs of IMEX logistic runs (dt = 1e-3, T = 2) from ordered initial data;
/// the trajectories must stay ordered within [`ORDER_TOL`] at every output
/// time.
pub fn ordering_suite(seed: u64, cases: usize) -> SuiteReport {
    let start = Instant::now();
    let mut report = SuiteReport::new("ordering");
    for case in 0..cases {
        let mut rng = case_rng(seed, case);
        if let Err(e) = ordering_case(case, &mut rng, &mut report) {
            report.error(case, e);
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    report
}

fn chain_case(case: usize, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    let shape = shape_of(case);
    let (g, p) = random_setting(rng, shape);
    let n = g.len();
    let geo = geometry_of(shape, &g, p.as_ref());
    let zeros = vec![0.0; n];
    let opts = MonotoneOptions::default();
    let result = match shape {
        Shape::Dirichlet => {
            let lambda1 = dirichlet_eigensystem(&g, p.as_ref().expect("bounded"))?.eigenvalue(0);
            // Stay away from the critical rate, where the iteration stalls.
            let factor = if rng.gen_bool(0.25) {
                0.5
            } else {
                rng.gen_range(1.5..3.0)
            };
            let f = Reaction::Logistic {
                a: factor * lambda1,
                b: 1.0,
            };
            let cap = (factor * lambda1).max(1.0);
            let (bracket, _) = default_bracket(geo, &f, &zeros, cap)?;
            elliptic_monotone(geo, &f, &zeros, &bracket, opts)?
        }
        Shape::Neumann => {
            let a = rng.gen_range(0.5..2.0);
            let f = Reaction::Logistic { a, b: 1.0 };
            elliptic_monotone(geo, &f, &zeros, &Bracket::constant(n, 0.05, a.max(1.0)), opts)?
        }
        Shape::Whole => {
            let drift = DriftField::new((0..n).map(|_| rng.gen_range(0.0..1.0)).collect());
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.5)).collect();
            let f = Reaction::Logistic { a: 1.0, b: 1.0 };
            cauchy_elliptic_monotone(&g, &f, &drift, &c, &Bracket::constant(n, 0.05, 1.0), opts)?
        }
    };
    let mut closure = geo.active();
    closure.extend_from_slice(geo.boundary());
    let chains = result.check_chains(&closure);
    report.record(case, chains.worst() - chains.tolerance, chains.passed(), || {
        format!("{shape:?}: {chains:?}")
    });
    Ok(())
}

/// Monotone iterations for logistic problems with Dirichlet and Neumann
/// boundaries and for drift problems on the whole graph. Every run must have
/// nondecreasing lower iterates, nonincreasing upper iterates and lower ≤
/// upper within 1e-12 times the bracket scale.
pub fn monotone_chain_suite(seed: u64, cases: usize) -> SuiteReport {
    let start = Instant::now();
    let mut report = SuiteReport::new("monotone_chains");
    for case in 0..cases {
        let mut rng = case_rng(seed, case);
        if let Err(e) = chain_case(case, &mut rng, &mut report) {
            report.error(case, e);
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    report
}

/// The three suites at their default sizes.
pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    vec![
        max_principle_suite(seed, 200),
        ordering_suite(seed, 100),
        monotone_chain_suite(seed, 60),
    ]
}
