//! Spectral solution of linear parabolic problems
//!
//! u_t − Δu + c u = G on Ω (or V), with Dirichlet values or Neumann flux g on
//! ∂Ω, u(·, 0) = u₀.
//!
//! Mode coefficients v_j of u in the eigenbasis obey v_j' = −(λ_j + c) v_j + q_j,
//! and are advanced step by step as
//! v_j(b) = e^{−r_j (b−a)} v_j(a) + ∫_a^b e^{−r_j (b−s)} q_j(s) ds,
//! with the integral evaluated by [`quadrature::weighted_composite`] on
//! [`PANELS_PER_STEP`] internal panels. Stepping keeps every exponential
//! factor at most one for nonnegative rates.

pub mod elliptic;
pub mod quadrature;

use crate::error::{Error, Result};
use crate::graph::{matrix, BoundaryKind, Geometry, GraphFunction};
use crate::series::{check_grid, SpaceTimeData, TimeSeries};
use crate::spectral::{dirichlet_eigensystem, full_eigensystem, neumann_eigensystem, EigenSystem};

pub use elliptic::{
    coercivity_margin, drift_residual, elliptic_residual, solve_elliptic_drift, solve_elliptic_shifted,
    DriftEllipticSolver, EllipticSolver, NeumannLift,
};
pub use quadrature::forcing_mode_integral;

/// Internal quadrature panels per output step.
pub const PANELS_PER_STEP: usize = 10;

/// A linear parabolic problem; `boundary` holds Dirichlet values or Neumann
/// flux and is ignored on the whole graph.
#[derive(Debug, Clone)]
pub struct LinearParabolicProblem<'a> {
    pub geometry: Geometry<'a>,
    pub shift: f64,
    pub forcing: SpaceTimeData,
    pub boundary: SpaceTimeData,
    pub initial: GraphFunction,
}

impl<'a> LinearParabolicProblem<'a> {
    pub fn homogeneous(geometry: Geometry<'a>, initial: GraphFunction) -> Self {
        Self {
            geometry,
            shift: 0.0,
            forcing: SpaceTimeData::Zero,
            boundary: SpaceTimeData::Zero,
            initial,
        }
    }
}

/// Eigensystem (and Neumann lift) of a geometry, reusable across solves.
pub struct ParabolicSolver<'a> {
    geometry: Geometry<'a>,
    es: EigenSystem,
    lift: Option<NeumannLift<'a>>,
}

impl<'a> ParabolicSolver<'a> {
    pub fn new(geometry: Geometry<'a>) -> Result<Self> {
        let (es, lift) = match geometry {
            Geometry::Whole(g) => (full_eigensystem(g)?, None),
            Geometry::Bounded {
                graph,
                partition,
                kind: BoundaryKind::Dirichlet,
            } => (dirichlet_eigensystem(graph, partition)?, None),
            Geometry::Bounded {
                graph,
                partition,
                kind: BoundaryKind::Neumann,
            } => (
                neumann_eigensystem(graph, partition)?,
                Some(NeumannLift::new(graph, partition)?),
            ),
        };
        Ok(Self { geometry, es, lift })
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.es
    }

    pub fn geometry(&self) -> Geometry<'a> {
        self.geometry
    }

    /// Mode forcing q_j(s) for every mode.
    fn mode_forcing(&self, forcing: &SpaceTimeData, boundary: &SpaceTimeData, s: f64) -> Result<Vec<f64>> {
        let graph = self.geometry.graph();
        let n = graph.len();
        let mut h = forcing.eval_all(n, s);
        let mut extra: Option<(Vec<f64>, GraphFunction)> = None;
        if let Geometry::Bounded { partition, kind, .. } = self.geometry {
            if !boundary.is_zero() {
                let g = boundary.eval_all(n, s);
                match kind {
                    BoundaryKind::Dirichlet => {
                        let lift = matrix::dirichlet_lift(graph, partition, &g);
                        for (i, &x) in partition.interior().iter().enumerate() {
                            h[x] += lift[i];
                        }
                    }
                    BoundaryKind::Neumann => {
                        // u = w + û with Δû = I, ∂û/∂n = g; integrating the
                        // −û_t term by parts leaves the source I + K_j û_j.
                        let (level, uhat) = self
                            .lift
                            .as_ref()
                            .expect("Neumann solver carries its lift")
                            .solve(&g)?;
                        for &x in partition.interior() {
                            h[x] += level;
                        }
                        extra = Some((self.es.project(&uhat), uhat));
                    }
                }
            }
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("forcing"));
        }
        let mut q = self.es.project(&h);
        if let Some((coeffs, _)) = extra {
            for (j, qj) in q.iter_mut().enumerate() {
                *qj += self.es.eigenvalue(j) * coeffs[j];
            }
        }
        Ok(q)
    }

    /// Full-length state from mode coefficients, with boundary values at time t.
    fn state(&self, coeffs: &[f64], boundary: &SpaceTimeData, t: f64) -> GraphFunction {
        let mut u = self.es.synthesize(coeffs);
        if let Geometry::Bounded { graph, partition, kind } = self.geometry {
            let g = boundary.eval_all(graph.len(), t);
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

    pub fn solve(&self, problem: &LinearParabolicProblem<'_>, grid: &[f64]) -> Result<TimeSeries> {
        check_grid(grid)?;
        let n = self.geometry.graph().len();
        if problem.initial.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: problem.initial.len(),
            });
        }
        if !problem.initial.is_finite() {
            return Err(Error::NonFinite("initial data"));
        }
        let rates: Vec<f64> = self.es.eigenvalues().iter().map(|l| l + problem.shift).collect();
        let homogeneous = problem.forcing.is_zero()
            && (problem.boundary.is_zero() || matches!(self.geometry, Geometry::Whole(_)));

        let mut coeffs = self.es.project(&problem.initial);
        let mut states = Vec::with_capacity(grid.len());
        let mut first = self.state(&coeffs, &problem.boundary, 0.0);
        for &x in &self.geometry.active() {
            first[x] = problem.initial[x];
        }
        states.push(first);

        let mut left = if homogeneous {
            Vec::new()
        } else {
            self.mode_forcing(&problem.forcing, &problem.boundary, 0.0)?
        };
        let mut nodes: Vec<Vec<f64>> = Vec::with_capacity(PANELS_PER_STEP + 1);
        let mut column = vec![0.0; PANELS_PER_STEP + 1];
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let dt = b - a;
            for (c, r) in coeffs.iter_mut().zip(&rates) {
                *c *= (-r * dt).exp();
            }
            if !homogeneous {
                let h = dt / PANELS_PER_STEP as f64;
                nodes.clear();
                nodes.push(std::mem::take(&mut left));
                for i in 1..=PANELS_PER_STEP {
                    let s = if i == PANELS_PER_STEP { b } else { a + i as f64 * h };
                    nodes.push(self.mode_forcing(&problem.forcing, &problem.boundary, s)?);
                }
                for (j, c) in coeffs.iter_mut().enumerate() {
                    // σ = b − s runs from the right end of the step.
                    for (i, slot) in column.iter_mut().enumerate() {
                        *slot = nodes[PANELS_PER_STEP - i][j];
                    }
                    *c += quadrature::weighted_composite(&column, h, rates[j]);
                }
                left = nodes.pop().expect("nodes are nonempty");
            }
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("mode coefficients"));
            }
            states.push(self.state(&coeffs, &problem.boundary, b));
        }
        TimeSeries::new(grid.to_vec(), states)
    }
}

fn require(problem: &LinearParabolicProblem<'_>, want: Option<BoundaryKind>) -> Result<()> {
    if problem.geometry.boundary_kind() == want {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "expected boundary kind {want:?}, problem has {:?}",
            problem.geometry.boundary_kind()
        )))
    }
}

/// Dirichlet problem on Ω; boundary states equal g(·, t_n).
pub fn solve_ibvp_dirichlet(problem: &LinearParabolicProblem<'_>, grid: &[f64]) -> Result<TimeSeries> {
    require(problem, Some(BoundaryKind::Dirichlet))?;
    ParabolicSolver::new(problem.geometry)?.solve(problem, grid)
}

/// Neumann problem on Ω; boundary states follow from the flux condition.
pub fn solve_ibvp_neumann(problem: &LinearParabolicProblem<'_>, grid: &[f64]) -> Result<TimeSeries> {
    require(problem, Some(BoundaryKind::Neumann))?;
    ParabolicSolver::new(problem.geometry)?.solve(problem, grid)
}

/// Problem on the whole graph without boundary.
pub fn solve_cauchy(problem: &LinearParabolicProblem<'_>, grid: &[f64]) -> Result<TimeSeries> {
    require(problem, None)?;
    ParabolicSolver::new(problem.geometry)?.solve(problem, grid)
}

/// Dispatches on the geometry of the problem.
pub fn solve_linear(problem: &LinearParabolicProblem<'_>, grid: &[f64]) -> Result<TimeSeries> {
    ParabolicSolver::new(problem.geometry)?.solve(problem, grid)
}
