//! Semilinear time integration and long-time classification.
//!
//! [`integrate`] advances u_t − Δu = f(u) with an IMEX step: diffusion and
//! boundary conditions implicit, reaction explicit. The classifiers run a
//! scenario and compare its long-time behavior with the outcome the
//! threshold theory predicts.

mod allen_cahn;
mod ode;
mod steady;

pub use allen_cahn::{allen_cahn_criterion, classify_allen_cahn, s_rho, CriterionReport, RHO_SCAN};
pub use ode::{scalar_ode_bound, ScalarTrajectory};
pub use steady::steady_state_detect;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{matrix, BoundaryKind, DomainPartition, Geometry, GraphFunction, Role, WeightedGraph};
use crate::monotone::{default_bracket, elliptic_monotone, MonotoneOptions};
use crate::reaction::Reaction;
use crate::series::{SpaceTimeData, TimeSeries};
use crate::spectral::dirichlet_eigensystem;

/// States larger than this count as blow-up.
const BLOW_UP: f64 = 1e150;

/// A semilinear problem with its time discretization.
#[derive(Debug, Clone)]
pub struct Scenario<'a> {
    pub geometry: Geometry<'a>,
    pub reaction: Reaction,
    /// Dirichlet values or Neumann flux on ∂Ω.
    pub boundary: SpaceTimeData,
    pub initial: GraphFunction,
    pub horizon: f64,
    pub dt: f64,
    /// Record every `stride` steps (the final step is always recorded).
    pub stride: usize,
}

/// Implicit matrix of one IMEX step over all vertices of the host graph.
fn step_matrix(geometry: Geometry<'_>, dt: f64) -> DMatrix<f64> {
    let graph = geometry.graph();
    let n = graph.len();
    match geometry {
        Geometry::Whole(g) => DMatrix::identity(n, n) + matrix::full_operator(g) * dt,
        Geometry::Bounded { partition, kind, .. } => {
            let mut a = DMatrix::identity(n, n);
            for &x in partition.interior() {
                let mx = graph.measure(x);
                for &y in graph.neighbors(x) {
                    if partition.role(y) == Role::Plain {
                        continue;
                    }
                    let w = dt * graph.weight(y, x) / mx;
                    a[(x, x)] += w;
                    a[(x, y)] -= w;
                }
            }
            if kind == BoundaryKind::Neumann {
                for &z in partition.boundary() {
                    let mz = graph.measure(z);
                    a[(z, z)] = matrix::interior_degree(graph, partition, z) / mz;
                    for &y in graph.neighbors(z) {
                        if partition.is_interior(y) {
                            a[(z, y)] -= graph.weight(z, y) / mz;
                        }
                    }
                }
            }
            a
        }
    }
}

/// Initial state with boundary entries made consistent with the data at t = 0.
fn consistent_initial(geometry: Geometry<'_>, initial: &GraphFunction, boundary: &SpaceTimeData) -> GraphFunction {
    let mut u = initial.clone();
    if let Geometry::Bounded {
        graph,
        partition,
        kind,
    } = geometry
    {
        let g = boundary.eval_all(graph.len(), 0.0);
        match kind {
            BoundaryKind::Dirichlet => {
                for &z in partition.boundary() {
                    u[z] = g[z];
                }
            }
            BoundaryKind::Neumann => matrix::neumann_extend(graph, partition, &mut u, Some(&g)),
        }
    }
    u
}

/// IMEX integration (I − dt Δ) uⁿ⁺¹ = uⁿ + dt f(uⁿ) with boundary rows
/// enforcing the Dirichlet values or Neumann flux at tⁿ⁺¹. The matrix is
/// factored once.
pub fn integrate(s: &Scenario<'_>) -> Result<TimeSeries> {
    s.reaction.validate()?;
    let graph = s.geometry.graph();
    let n = graph.len();
    if s.initial.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: s.initial.len(),
        });
    }
    if !s.initial.is_finite() {
        return Err(Error::NonFinite("initial data"));
    }
    if !(s.dt > 0.0 && s.dt.is_finite() && s.horizon > 0.0 && s.horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and T > 0, got dt = {}, T = {}",
            s.dt, s.horizon
        )));
    }
    if s.stride == 0 {
        return Err(Error::InvalidParameter("stride must be at least 1".into()));
    }
    let steps = (s.horizon / s.dt).round() as usize;
    if steps == 0 || ((steps as f64) * s.dt - s.horizon).abs() > 1e-9 * s.horizon {
        return Err(Error::InvalidParameter(format!(
            "T = {} is not a whole number of steps dt = {}",
            s.horizon, s.dt
        )));
    }
    if let Some(p) = s.geometry.partition() {
        crate::graph::check_domain(graph, p)?;
    }
    let lu = step_matrix(s.geometry, s.dt).lu();
    if !lu.is_invertible() {
        return Err(Error::SingularSystem);
    }
    let active = s.geometry.active();
    let boundary = s.geometry.boundary();
    let dirichlet = s.geometry.boundary_kind() == Some(BoundaryKind::Dirichlet);

    let mut u = consistent_initial(s.geometry, &s.initial, &s.boundary);
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    let mut rhs = DVector::zeros(n);
    for k in 1..=steps {
        let t = k as f64 * s.dt;
        rhs.copy_from_slice(&u);
        for &x in &active {
            rhs[x] += s.dt * s.reaction.eval(x, u[x]);
        }
        for &z in boundary {
            rhs[z] = s.boundary.eval(z, t);
        }
        if !lu.solve_mut(&mut rhs) {
            return Err(Error::SingularSystem);
        }
        if rhs.iter().any(|v| !v.is_finite() || v.abs() > BLOW_UP) {
            return Err(Error::Divergence { time: t });
        }
        u.copy_from_slice(rhs.as_slice());
        if dirichlet {
            // Exact boundary values rather than the LU round-off.
            for &z in boundary {
                u[z] = s.boundary.eval(z, t);
            }
        }
        if k % s.stride == 0 || k == steps {
            times.push(if k == steps { s.horizon } else { t });
            states.push(u.clone());
        }
    }
    TimeSeries::new(times, states)
}

/// Horizon, step and decision thresholds for the classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunControls {
    pub horizon: f64,
    pub dt: f64,
    pub stride: usize,
    /// Final sup-norm required for extinction.
    pub extinction_threshold: f64,
    /// Sup-distance to a steady state required for convergence.
    pub state_tolerance: f64,
    /// Sup-distance to a constant equilibrium required for convergence.
    pub constant_tolerance: f64,
    /// Fraction of the recorded samples forming the trailing window.
    pub tail_fraction: f64,
}

impl Default for RunControls {
    fn default() -> Self {
        Self {
            horizon: 200.0,
            dt: 1e-3,
            stride: 100,
            extinction_threshold: 1e-3,
            state_tolerance: 1e-4,
            constant_tolerance: 1e-6,
            tail_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Extinction,
    ConvergenceToState { state: GraphFunction },
    ConvergenceToConstant { value: f64 },
    Undecided,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Extinction => "extinction",
            Outcome::ConvergenceToState { .. } => "convergence_to_state",
            Outcome::ConvergenceToConstant { .. } => "convergence_to_constant",
            Outcome::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl HypothesisCheck {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Comparison of a trajectory with scalar ODE solutions Z(t; m) ≤ u ≤ Z(t; M).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub lower_start: f64,
    pub upper_start: f64,
    pub tolerance: f64,
    /// Largest amount by which u leaves [Z(t; m), Z(t; M)].
    pub worst_violation: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Evidence {
    pub final_time: f64,
    pub final_sup: f64,
    /// (t, sup-norm) pairs, thinned to at most 101 entries.
    pub sup_trail: Vec<(f64, f64)>,
    pub tail_monotone: bool,
    /// Least-squares slope of ln sup-norm over the trailing window.
    pub log_slope: Option<f64>,
    /// Extinction decided by the trend test rather than the threshold.
    pub slow_decay: bool,
    pub distance_to_target: Option<f64>,
    pub steady_residual: Option<f64>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub sandwich: Option<SandwichReport>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub scenario: String,
    pub outcome: Outcome,
    /// Outcome the theory predicts from the verified hypotheses, if any.
    pub predicted: Option<String>,
    pub lambda1: Option<f64>,
    pub threshold_margin: Option<f64>,
    pub extinction_criterion: Option<CriterionReport>,
    pub steady_state: Option<GraphFunction>,
    pub evidence: Evidence,
    #[serde(skip)]
    pub trajectory: TimeSeries,
}

impl Classification {
    pub fn hypotheses_ok(&self) -> bool {
        self.evidence.hypotheses.iter().all(|h| h.passed)
    }
}

/// Trail statistics over `domain`.
fn trail_evidence(series: &TimeSeries, domain: &[usize], controls: &RunControls) -> Evidence {
    let trail = series.sup_trail(domain);
    let times = series.times();
    let stride = trail.len().div_ceil(100).max(1);
    let mut sup_trail: Vec<(f64, f64)> = (0..trail.len()).step_by(stride).map(|k| (times[k], trail[k])).collect();
    if !(trail.len() - 1).is_multiple_of(stride) {
        sup_trail.push((series.final_time(), trail[trail.len() - 1]));
    }
    let window = ((trail.len() as f64 * controls.tail_fraction).ceil() as usize).clamp(2, trail.len());
    let start = trail.len() - window;
    let slack = 1e-14 * trail[0].max(f64::MIN_POSITIVE);
    let tail_monotone = trail[start..].windows(2).all(|w| w[1] <= w[0] + slack);
    let log_slope = if trail[start..].iter().all(|&v| v > 0.0) {
        let xs = &times[start..];
        let ys: Vec<f64> = trail[start..].iter().map(|v| v.ln()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    } else {
        None
    };
    Evidence {
        final_time: series.final_time(),
        final_sup: trail[trail.len() - 1],
        sup_trail,
        tail_monotone,
        log_slope,
        ..Evidence::default()
    }
}

fn nonnegative_nonzero(u: &GraphFunction, domain: &[usize]) -> HypothesisCheck {
    let min = domain.iter().map(|&x| u[x]).fold(f64::INFINITY, f64::min);
    let max = domain.iter().map(|&x| u[x]).fold(f64::NEG_INFINITY, f64::max);
    HypothesisCheck::new(
        "initial_nonnegative_nonzero",
        min >= 0.0 && max > 0.0,
        format!("min {min}, max {max}"),
    )
}

fn extinction_decision(evidence: &mut Evidence, controls: &RunControls) -> Outcome {
    if evidence.final_sup <= controls.extinction_threshold && evidence.tail_monotone {
        Outcome::Extinction
    } else if evidence.tail_monotone && evidence.log_slope.is_some_and(|s| s < 0.0) {
        evidence.slow_decay = true;
        evidence
            .notes
            .push("slow decay: sup-norm above threshold but decreasing with negative log-slope".into());
        Outcome::Extinction
    } else {
        Outcome::Undecided
    }
}

/// Relative distance of a to λ₁ below which the horizon is extended tenfold.
const NEAR_CRITICAL: f64 = 1e-2;

/// Logistic growth u(a − b u) on Ω with zero Dirichlet data: extinction for
/// a ≤ λ₁, convergence to the unique positive steady state for a > λ₁.
pub fn classify_logistic_dirichlet(
    graph: &WeightedGraph,
    partition: &DomainPartition,
    a: f64,
    b: f64,
    initial: &GraphFunction,
    controls: &RunControls,
) -> Result<Classification> {
    let reaction = Reaction::Logistic { a, b };
    reaction.validate()?;
    let geometry = Geometry::dirichlet(graph, partition);
    let lambda1 = dirichlet_eigensystem(graph, partition)?.eigenvalue(0);
    let margin = a - lambda1;
    let mut hypotheses = vec![
        HypothesisCheck::new("growth_rate_positive", a > 0.0, format!("a = {a}")),
        nonnegative_nonzero(initial, partition.interior()),
    ];
    let mut controls = *controls;
    let mut notes = Vec::new();
    if margin.abs() <= NEAR_CRITICAL * lambda1 {
        controls.horizon *= 10.0;
        notes.push(format!("near-critical growth rate: horizon extended to {}", controls.horizon));
    }
    let zero = vec![0.0; graph.len()];
    let (bracket, warnings) = default_bracket(geometry, &reaction, &zero, (a / b).max(initial.max()))?;
    notes.extend(warnings);
    let steady = elliptic_monotone(geometry, &reaction, &zero, &bracket, MonotoneOptions::default())?;
    notes.extend(steady.warnings.iter().cloned());
    hypotheses.push(HypothesisCheck::new(
        "steady_state_unique",
        steady.unique,
        format!("gap between minimal and maximal solutions {:e}", steady.gap),
    ));

    let trajectory = integrate(&Scenario {
        geometry,
        reaction,
        boundary: SpaceTimeData::Zero,
        initial: initial.clone(),
        horizon: controls.horizon,
        dt: controls.dt,
        stride: controls.stride,
    })?;
    let mut evidence = trail_evidence(&trajectory, partition.interior(), &controls);
    evidence.steady_residual = Some(steady.residual_minimal);
    let u_s = steady.minimal.clone();
    let distance = trajectory.last().sup_distance(&u_s);
    evidence.distance_to_target = Some(distance);
    let (predicted, outcome) = if margin > 0.0 {
        let outcome = if distance <= controls.state_tolerance {
            Outcome::ConvergenceToState { state: u_s.clone() }
        } else {
            Outcome::Undecided
        };
        ("convergence_to_state", outcome)
    } else {
        ("extinction", extinction_decision(&mut evidence, &controls))
    };
    evidence.hypotheses = hypotheses;
    evidence.notes.extend(notes);
    Ok(Classification {
        scenario: "logistic_dirichlet".into(),
        outcome,
        predicted: Some(predicted.into()),
        lambda1: Some(lambda1),
        threshold_margin: Some(margin),
        extinction_criterion: None,
        steady_state: Some(u_s),
        evidence,
        trajectory,
    })
}

/// Logistic growth with zero Neumann flux: convergence to a/b, with the
/// trajectory checked against the scalar solutions started at min and max u₀.
pub fn classify_logistic_neumann(
    graph: &WeightedGraph,
    partition: &DomainPartition,
    a: f64,
    b: f64,
    initial: &GraphFunction,
    controls: &RunControls,
) -> Result<Classification> {
    let reaction = Reaction::Logistic { a, b };
    reaction.validate()?;
    let geometry = Geometry::neumann(graph, partition);
    let hypotheses = vec![
        HypothesisCheck::new("growth_rate_positive", a > 0.0, format!("a = {a}")),
        nonnegative_nonzero(initial, partition.interior()),
    ];
    let trajectory = integrate(&Scenario {
        geometry,
        reaction: reaction.clone(),
        boundary: SpaceTimeData::Zero,
        initial: initial.clone(),
        horizon: controls.horizon,
        dt: controls.dt,
        stride: controls.stride,
    })?;
    let mut closure = partition.interior().to_vec();
    closure.extend_from_slice(partition.boundary());
    let mut evidence = trail_evidence(&trajectory, &closure, controls);
    let target = a / b;
    let distance = closure
        .iter()
        .map(|&x| (trajectory.last()[x] - target).abs())
        .fold(0.0, f64::max);
    evidence.distance_to_target = Some(distance);

    let m = partition.interior().iter().map(|&x| initial[x]).fold(f64::INFINITY, f64::min);
    let big_m = partition.interior().iter().map(|&x| initial[x]).fold(f64::NEG_INFINITY, f64::max);
    let f = |z: f64| reaction.eval(0, z);
    let low = scalar_ode_bound(&f, m, controls.horizon, controls.dt)?;
    let high = scalar_ode_bound(&f, big_m, controls.horizon, controls.dt)?;
    let tolerance = 10.0 * controls.dt * target.max(1.0);
    let mut worst = f64::NEG_INFINITY;
    for (&t, u) in trajectory.times().iter().zip(trajectory.states()) {
        let (zl, zh) = (low.value_at(t), high.value_at(t));
        for &x in &closure {
            worst = worst.max(zl - u[x]).max(u[x] - zh);
        }
    }
    evidence.sandwich = Some(SandwichReport {
        lower_start: m,
        upper_start: big_m,
        tolerance,
        worst_violation: worst,
        holds: worst <= tolerance,
    });
    let outcome = if distance <= controls.constant_tolerance {
        Outcome::ConvergenceToConstant { value: target }
    } else {
        Outcome::Undecided
    };
    evidence.hypotheses = hypotheses;
    Ok(Classification {
        scenario: "logistic_neumann".into(),
        outcome,
        predicted: Some("convergence_to_constant".into()),
        lambda1: None,
        threshold_margin: None,
        extinction_criterion: None,
        steady_state: Some(GraphFunction::constant(graph.len(), target)),
        evidence,
        trajectory,
    })
}

/// Samples used for the structural checks on f over [0, 1].
const HYPOTHESIS_SAMPLES: usize = 1001;

/// Checks f(0) = f(1) = 0, f > 0 on (0, 1) and f(u)/u nonincreasing on (0, 1].
pub fn kpp_hypotheses(f: &Reaction) -> Vec<HypothesisCheck> {
    let eval = |u: f64| f.eval(0, u);
    let last = HYPOTHESIS_SAMPLES - 1;
    let u_at = |i: usize| i as f64 / last as f64;
    let ends = eval(0.0).abs().max(eval(1.0).abs());
    let min_inside = (1..last).map(|i| eval(u_at(i))).fold(f64::INFINITY, f64::min);
    let ratios: Vec<f64> = (1..=last).map(|i| eval(u_at(i)) / u_at(i)).collect();
    let worst_rise = ratios.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    vec![
        HypothesisCheck::new("zero_at_0_and_1", ends <= 1e-12, format!("max |f(0)|, |f(1)| = {ends:e}")),
        HypothesisCheck::new(
            "positive_on_open_interval",
            min_inside > 0.0,
            format!("min over samples {min_inside:e}"),
        ),
        HypothesisCheck::new(
            "ratio_nonincreasing",
            worst_rise <= 1e-12,
            format!("largest increase of f(u)/u between samples {worst_rise:e}"),
        ),
    ]
}

/// KPP reaction on the whole graph: convergence to 1 from nonnegative,
/// nonzero data. Failed hypotheses are flagged and the run still classified.
pub fn classify_kpp_cauchy(
    graph: &WeightedGraph,
    f: &Reaction,
    initial: &GraphFunction,
    controls: &RunControls,
) -> Result<Classification> {
    let all: Vec<usize> = (0..graph.len()).collect();
    let mut hypotheses = kpp_hypotheses(f);
    hypotheses.push(nonnegative_nonzero(initial, &all));
    let trajectory = integrate(&Scenario {
        geometry: Geometry::Whole(graph),
        reaction: f.clone(),
        boundary: SpaceTimeData::Zero,
        initial: initial.clone(),
        horizon: controls.horizon,
        dt: controls.dt,
        stride: controls.stride,
    })?;
    let mut evidence = trail_evidence(&trajectory, &all, controls);
    let one = GraphFunction::constant(graph.len(), 1.0);
    let distance = trajectory.last().sup_distance(&one);
    evidence.distance_to_target = Some(distance);
    let outcome = if distance <= controls.constant_tolerance {
        Outcome::ConvergenceToConstant { value: 1.0 }
    } else {
        Outcome::Undecided
    };
    let predicted = hypotheses.iter().all(|h| h.passed).then(|| "convergence_to_constant".to_string());
    evidence.hypotheses = hypotheses;
    Ok(Classification {
        scenario: "kpp_cauchy".into(),
        outcome,
        predicted,
        lambda1: None,
        threshold_margin: None,
        extinction_criterion: None,
        steady_state: Some(one),
        evidence,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{five_vertex_graph, five_vertex_initial, five_vertex_partition};
    use crate::graph::operators::integrate as integral;
    use crate::linear::{solve_ibvp_dirichlet, LinearParabolicProblem};
    use crate::series::uniform_grid;
    use crate::spectral::dirichlet_eigensystem;

    fn heat(geometry: Geometry<'_>, initial: GraphFunction, horizon: f64, dt: f64) -> TimeSeries {
        integrate(&Scenario {
            geometry,
            reaction: Reaction::Zero,
            boundary: SpaceTimeData::Zero,
            initial,
            horizon,
            dt,
            stride: 1,
        })
        .unwrap()
    }

    #[test]
    fn eigenmode_decay_is_first_order() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let geo = Geometry::dirichlet(&g, &p);
        let es = dirichlet_eigensystem(&g, &p).unwrap();
        let phi = es.eigenfunction(0).clone();
        let exact = phi.scaled((-es.eigenvalue(0)).exp());
        let e1 = heat(geo, phi.clone(), 1.0, 0.01).last().sup_distance(&exact);
        let e2 = heat(geo, phi.clone(), 1.0, 0.005).last().sup_distance(&exact);
        let ratio = e1 / e2;
        assert!((1.8..2.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn neumann_heat_conserves_mass() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let s = heat(Geometry::neumann(&g, &p), five_vertex_initial(), 1.0, 0.01);
        let mass0 = integral(&g, s.state(0), p.interior()).unwrap();
        for u in s.states() {
            assert!((integral(&g, u, p.interior()).unwrap() - mass0).abs() <= 1e-12 * mass0);
        }
    }

    #[test]
    fn imex_approaches_spectral_solution() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let geo = Geometry::dirichlet(&g, &p);
        let u0 = five_vertex_initial();
        let grid = uniform_grid(1.0, 1);
        let exact = solve_ibvp_dirichlet(&LinearParabolicProblem::homogeneous(geo, u0.clone()), &grid).unwrap();
        let err = heat(geo, u0, 1.0, 1e-4).last().sup_distance(exact.last());
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn rejects_bad_steps_and_detects_blow_up() {
        let g = five_vertex_graph();
        let mut s = Scenario {
            geometry: Geometry::Whole(&g),
            reaction: Reaction::Polynomial(vec![0.0, 0.0, 1.0]),
            boundary: SpaceTimeData::Zero,
            initial: GraphFunction::constant(5, 2.0),
            horizon: 5.0,
            dt: 0.01,
            stride: 10,
        };
        assert!(matches!(integrate(&s), Err(Error::Divergence { .. })));
        s.horizon = 0.015;
        assert!(matches!(integrate(&s), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn stride_and_final_time() {
        let g = five_vertex_graph();
        let s = integrate(&Scenario {
            geometry: Geometry::Whole(&g),
            reaction: Reaction::Zero,
            boundary: SpaceTimeData::Zero,
            initial: GraphFunction::constant(5, 0.5),
            horizon: 1.05,
            dt: 0.01,
            stride: 10,
        })
        .unwrap();
        assert_eq!(s.len(), 12);
        assert_eq!(s.final_time(), 1.05);
        assert!(s.states().iter().all(|u| u.sup_distance(&GraphFunction::constant(5, 0.5)) < 1e-13));
    }

    #[test]
    fn kpp_hypothesis_flags() {
        assert!(kpp_hypotheses(&Reaction::Logistic { a: 1.0, b: 1.0 }).iter().all(|h| h.passed));
        // f(u)/u = (1 − u)(u + 2) = 2 − u − u² is decreasing.
        let f = Reaction::Polynomial(vec![0.0, 2.0, -1.0, -1.0]);
        assert!(kpp_hypotheses(&f).iter().all(|h| h.passed));
        // f(u)/u = u(1 − u) increases near 0.
        let f = Reaction::Polynomial(vec![0.0, 0.0, 1.0, -1.0]);
        let checks = kpp_hypotheses(&f);
        assert!(checks[0].passed && checks[1].passed && !checks[2].passed);
    }

    #[test]
    fn equilibrium_data_stays_put() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let controls = RunControls {
            horizon: 1.0,
            stride: 10,
            ..RunControls::default()
        };
        let c = classify_logistic_neumann(&g, &p, 2.0, 1.0, &GraphFunction::constant(5, 2.0), &controls).unwrap();
        assert!(c.trajectory.states().iter().all(|u| u.sup_distance(&GraphFunction::constant(5, 2.0)) < 1e-12));
        let c = classify_kpp_cauchy(&g, &Reaction::Logistic { a: 1.0, b: 1.0 }, &GraphFunction::constant(5, 1.0), &controls)
            .unwrap();
        assert!(matches!(c.outcome, Outcome::ConvergenceToConstant { value } if value == 1.0));
    }
}
