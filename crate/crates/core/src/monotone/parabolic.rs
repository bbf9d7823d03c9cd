//! Picard iteration between trajectory brackets for semilinear parabolic
//! problems.
//!
//! Each iterate solves the linear problem u_t − Δu + M u = f(u_prev) + M u_prev
//! with the original initial and boundary data. The previous iterate lives on
//! the output grid and enters as piecewise-linear forcing.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Geometry, GraphFunction};
use crate::linear::{LinearParabolicProblem, ParabolicSolver};
use crate::reaction::Reaction;
use crate::series::{SpaceTimeData, TimeSeries};

use super::MonotoneOptions;

/// u_t − Δu = f(x, u) with boundary values or flux and initial data.
#[derive(Debug, Clone)]
pub struct SemilinearProblem<'a> {
    pub geometry: Geometry<'a>,
    pub reaction: Reaction,
    pub boundary: SpaceTimeData,
    pub initial: GraphFunction,
}

#[derive(Debug, Clone)]
pub struct TrajectoryBracket {
    pub lower: TimeSeries,
    pub upper: TimeSeries,
}

impl TrajectoryBracket {
    /// Constant-in-time bracket on `grid`.
    pub fn constant(grid: &[f64], n: usize, lower: f64, upper: f64) -> Result<Self> {
        Ok(Self {
            lower: TimeSeries::constant(grid.to_vec(), GraphFunction::constant(n, lower))?,
            upper: TimeSeries::constant(grid.to_vec(), GraphFunction::constant(n, upper))?,
        })
    }
}

/// Per-iteration chain measurements; every field is ≤ 0 for a perfect chain
/// except the increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateDiagnostics {
    pub lower_increment: f64,
    pub upper_increment: f64,
    /// max of previous − current lower iterate.
    pub lower_decrease: f64,
    /// max of current − previous upper iterate.
    pub upper_increase: f64,
    /// max of bracket lower − lower iterate.
    pub below_bracket: f64,
    /// max of upper iterate − bracket upper.
    pub above_bracket: f64,
    /// max of lower iterate − upper iterate.
    pub crossing: f64,
}

impl IterateDiagnostics {
    pub fn worst_violation(&self) -> f64 {
        [
            self.lower_decrease,
            self.upper_increase,
            self.below_bracket,
            self.above_bracket,
            self.crossing,
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct ParabolicMonotoneResult {
    pub minimal: TimeSeries,
    pub maximal: TimeSeries,
    pub iterations: usize,
    /// Largest sup-norm change in the last iteration; also the fixed-point
    /// residual ‖Φ(u) − u‖∞ of the returned trajectories.
    pub final_increment: f64,
    /// max over the grid of û − ũ.
    pub gap: f64,
    pub shift: f64,
    pub history: Vec<IterateDiagnostics>,
}

fn max_diff(a: &TimeSeries, b: &TimeSeries) -> f64 {
    a.states()
        .iter()
        .zip(b.states())
        .flat_map(|(p, q)| p.iter().zip(q.iter()).map(|(x, y)| x - y))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Picard iteration from a bracket of sub/supersolution trajectories on a
/// common grid. The shift M is the Lipschitz bound of f on the bracket range
/// and may be zero.
pub fn parabolic_monotone(
    problem: &SemilinearProblem<'_>,
    bracket: &TrajectoryBracket,
    opts: MonotoneOptions,
) -> Result<ParabolicMonotoneResult> {
    problem.reaction.validate()?;
    let graph = problem.geometry.graph();
    let n = graph.len();
    let grid = bracket.lower.times().to_vec();
    if bracket.upper.times() != grid.as_slice() {
        return Err(Error::GridMismatch);
    }
    if grid.len() < 2 {
        return Err(Error::GridTooCoarse {
            needed: 2,
            got: grid.len(),
        });
    }
    for s in [&bracket.lower, &bracket.upper] {
        if s.vertex_count() != n {
            return Err(Error::Dimension {
                expected: n,
                got: s.vertex_count(),
            });
        }
    }
    for (k, (l, u)) in bracket.lower.states().iter().zip(bracket.upper.states()).enumerate() {
        if let Some(x) = (0..n).find(|&x| l[x] > u[x]) {
            return Err(Error::BracketInverted {
                vertex: format!("{} at t = {}", graph.id(x), grid[k]),
                lower: l[x],
                upper: u[x],
            });
        }
    }
    let lo = bracket.lower.states().iter().map(|s| s.min()).fold(f64::INFINITY, f64::min);
    let hi = bracket.upper.states().iter().map(|s| s.max()).fold(f64::NEG_INFINITY, f64::max);
    let shift = problem.reaction.lipschitz_constant(lo, hi, n)?;
    let solver = ParabolicSolver::new(problem.geometry)?;
    let f = &problem.reaction;

    let step = |prev: &TimeSeries| -> Result<TimeSeries> {
        let states = prev
            .states()
            .iter()
            .map(|u| GraphFunction::from_fn(n, |x| f.eval(x, u[x]) + shift * u[x]))
            .collect();
        let forcing = TimeSeries::new(grid.clone(), states)?;
        let linear = LinearParabolicProblem {
            geometry: problem.geometry,
            shift,
            forcing: SpaceTimeData::Sampled(Arc::new(forcing)),
            boundary: problem.boundary.clone(),
            initial: problem.initial.clone(),
        };
        solver.solve(&linear, &grid)
    };

    let mut lower = bracket.lower.clone();
    let mut upper = bracket.upper.clone();
    let mut history = Vec::new();
    loop {
        if history.len() == opts.max_iters {
            let last: Option<&IterateDiagnostics> = history.last();
            return Err(Error::MaxIterations {
                iterations: opts.max_iters,
                increment: last.map_or(f64::NAN, |d| d.lower_increment.max(d.upper_increment)),
            });
        }
        let next_l = step(&lower)?;
        let next_u = step(&upper)?;
        let d = IterateDiagnostics {
            lower_increment: max_diff(&next_l, &lower).max(max_diff(&lower, &next_l)),
            upper_increment: max_diff(&next_u, &upper).max(max_diff(&upper, &next_u)),
            lower_decrease: max_diff(&lower, &next_l),
            upper_increase: max_diff(&next_u, &upper),
            below_bracket: max_diff(&bracket.lower, &next_l),
            above_bracket: max_diff(&next_u, &bracket.upper),
            crossing: max_diff(&next_l, &next_u),
        };
        if !(d.lower_increment.is_finite() && d.upper_increment.is_finite()) {
            return Err(Error::NonFinite("parabolic monotone iterate"));
        }
        history.push(d);
        lower = next_l;
        upper = next_u;
        if d.lower_increment.max(d.upper_increment) <= opts.tol {
            break;
        }
    }
    let last = history.last().expect("at least one iteration");
    Ok(ParabolicMonotoneResult {
        gap: max_diff(&upper, &lower).max(max_diff(&lower, &upper)),
        minimal: lower,
        maximal: upper,
        iterations: history.len(),
        final_increment: last.lower_increment.max(last.upper_increment),
        shift,
        history,
    })
}
