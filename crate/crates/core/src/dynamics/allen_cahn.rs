//! Extinction and propagation criteria for bistable reactions on the whole
//! graph.
//!
//! Extinction is guaranteed when, for some ρ ∈ [0, α),
//! e^{1/2} [u₀(x) − ρ]⁺ μ(x) < α − ρ at every vertex; propagation to 1 when
//! u₀ > α everywhere. The comparison argument behind the first condition runs
//! the linear flow w_t = Δw + s(ρ) w up to t = 1/(2 s(ρ)), where
//! s(ρ) = sup_{u∈(α,1)} f(u)/(u − ρ).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Geometry, GraphFunction, WeightedGraph};
use crate::reaction::{real_roots_in, Reaction};
use crate::series::SpaceTimeData;

use super::{extinction_decision, integrate, trail_evidence, Classification, HypothesisCheck, Outcome, RunControls, Scenario};

/// Number of ρ values scanned in [0, α).
pub const RHO_SCAN: usize = 256;
const SUP_SAMPLES: usize = 401;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub alpha: f64,
    /// s(0).
    pub s_zero: f64,
    /// Scanned ρ values for which the extinction condition holds at every vertex.
    pub admissible_rho: Vec<f64>,
    /// ρ maximizing the smallest vertex slack.
    pub best_rho: f64,
    pub s_best: f64,
    /// (α − ρ) − e^{1/2} [u₀(x) − ρ]⁺ μ(x) at `best_rho`, per vertex.
    pub slack: Vec<f64>,
    /// Vertex with the smallest slack.
    pub binding_vertex: String,
    /// u₀ > α at every vertex.
    pub propagation: bool,
}

impl CriterionReport {
    pub fn extinction_guaranteed(&self) -> bool {
        !self.admissible_rho.is_empty()
    }
}

fn golden_max(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    g(0.5 * (a + b)).max(gc).max(gd)
}

/// s(ρ) = sup over u ∈ (α, 1) of f(u)/(u − ρ).
///
/// For the built-in cubic u(u − α)(1 − u) the maximum is taken at the
/// critical points, which solve −2u³ + (3ρ + 1 + α)u² − 2(1 + α)ρu + αρ = 0
/// (closed form ((1 − α)/2)² at ρ = 0). Other reactions use a 401-point
/// sample refined by golden-section search.
pub fn s_rho(f: &Reaction, alpha: f64, rho: f64) -> f64 {
    let ratio = |u: f64| f.eval(0, u) / (u - rho);
    if let Reaction::AllenCahn { alpha: a } = *f {
        if a == alpha {
            if rho == 0.0 {
                let h = 0.5 * (1.0 - alpha);
                return h * h;
            }
            let critical = [alpha * rho, -2.0 * (1.0 + alpha) * rho, 3.0 * rho + 1.0 + alpha, -2.0];
            return real_roots_in(&critical, alpha, 1.0)
                .into_iter()
                .map(ratio)
                .fold(0.0, f64::max);
        }
    }
    let u_at = |i: usize| alpha + (1.0 - alpha) * i as f64 / (SUP_SAMPLES - 1) as f64;
    let (best, _) = (1..SUP_SAMPLES - 1)
        .map(|i| (i, ratio(u_at(i))))
        .fold((1, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    golden_max(&ratio, u_at(best - 1), u_at(best + 1))
}

/// Evaluates the extinction condition on a scan of ρ and the propagation
/// condition u₀ > α.
pub fn allen_cahn_criterion(
    graph: &WeightedGraph,
    f: &Reaction,
    alpha: f64,
    initial: &GraphFunction,
) -> Result<CriterionReport> {
    let n = graph.len();
    if initial.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: initial.len(),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("root α = {alpha} must lie in (0, 1)")));
    }
    let e_half = 0.5_f64.exp();
    let slack_at = |rho: f64| -> Vec<f64> {
        (0..n)
            .map(|x| (alpha - rho) - e_half * (initial[x] - rho).max(0.0) * graph.measure(x))
            .collect()
    };
    let mut admissible = Vec::new();
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..RHO_SCAN {
        let rho = alpha * i as f64 / RHO_SCAN as f64;
        let min_slack = slack_at(rho).into_iter().fold(f64::INFINITY, f64::min);
        if min_slack > 0.0 {
            admissible.push(rho);
        }
        if min_slack > best.1 {
            best = (rho, min_slack);
        }
    }
    let slack = slack_at(best.0);
    let binding = (0..n)
        .min_by(|&a, &b| slack[a].total_cmp(&slack[b]))
        .expect("graph has vertices");
    Ok(CriterionReport {
        alpha,
        s_zero: s_rho(f, alpha, 0.0),
        admissible_rho: admissible,
        best_rho: best.0,
        s_best: s_rho(f, alpha, best.0),
        slack,
        binding_vertex: graph.id(binding).to_string(),
        propagation: initial.iter().all(|&v| v > alpha),
    })
}

/// Checks f(0) = f(α) = f(1) = 0, the sign pattern around α and ∫₀¹ f > 0.
pub fn bistable_hypotheses(f: &Reaction, alpha: f64) -> Vec<HypothesisCheck> {
    let eval = |u: f64| f.eval(0, u);
    let roots = eval(0.0).abs().max(eval(alpha).abs()).max(eval(1.0).abs());
    let samples = 1000;
    let below = (1..samples).map(|i| eval(alpha * i as f64 / samples as f64)).fold(f64::NEG_INFINITY, f64::max);
    let above = (1..samples)
        .map(|i| eval(alpha + (1.0 - alpha) * i as f64 / samples as f64))
        .fold(f64::INFINITY, f64::min);
    let h = 1.0 / samples as f64;
    let integral = (0..=samples)
        .map(|i| {
            let w = if i == 0 || i == samples { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            w * eval(i as f64 * h)
        })
        .sum::<f64>()
        * h
        / 3.0;
    vec![
        HypothesisCheck::new("roots_at_0_alpha_1", roots <= 1e-12, format!("largest |f| at the roots {roots:e}")),
        HypothesisCheck::new("negative_below_alpha", below < 0.0, format!("max on (0, α) {below:e}")),
        HypothesisCheck::new("positive_above_alpha", above > 0.0, format!("min on (α, 1) {above:e}")),
        HypothesisCheck::new("positive_integral", integral > 0.0, format!("integral over [0, 1] {integral:e}")),
    ]
}

/// Runs a bistable scenario on the whole graph and confirms the branch the
/// criteria select; data satisfying neither branch is reported as Undecided.
pub fn classify_allen_cahn(
    graph: &WeightedGraph,
    f: &Reaction,
    alpha: f64,
    initial: &GraphFunction,
    controls: &RunControls,
) -> Result<Classification> {
    let criterion = allen_cahn_criterion(graph, f, alpha, initial)?;
    let all: Vec<usize> = (0..graph.len()).collect();
    let mut hypotheses = bistable_hypotheses(f, alpha);
    let min = initial.min();
    hypotheses.push(HypothesisCheck::new(
        "initial_nonnegative",
        min >= 0.0,
        format!("min {min}"),
    ));
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
    let (predicted, outcome) = if criterion.extinction_guaranteed() {
        evidence.distance_to_target = Some(evidence.final_sup);
        (Some("extinction"), extinction_decision(&mut evidence, controls))
    } else if criterion.propagation {
        let distance = trajectory.last().sup_distance(&one);
        evidence.distance_to_target = Some(distance);
        let outcome = if distance <= controls.constant_tolerance {
            Outcome::ConvergenceToConstant { value: 1.0 }
        } else {
            Outcome::Undecided
        };
        (Some("convergence_to_constant"), outcome)
    } else {
        evidence
            .notes
            .push("initial data satisfies neither the extinction nor the propagation condition".into());
        (None, Outcome::Undecided)
    };
    evidence.hypotheses = hypotheses;
    Ok(Classification {
        scenario: "allen_cahn_cauchy".into(),
        outcome,
        predicted: predicted.map(str::to_string),
        lambda1: None,
        threshold_margin: None,
        extinction_criterion: Some(criterion),
        steady_state: None,
        evidence,
        trajectory,
    })
}
