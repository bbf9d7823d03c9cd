//! Monotone iteration between a lower and an upper solution.
//!
//! Both sequences solve (L + M) u_{m+1} = M u_m + f(u_m), with L the elliptic
//! operator of the problem and M a Lipschitz shift making u ↦ M u + f(u)
//! nondecreasing on the bracket range. Starting from a sub/supersolution pair
//! the lower sequence increases to the minimal solution and the upper
//! sequence decreases to the maximal one.

mod parabolic;

pub use parabolic::{
    parabolic_monotone, IterateDiagnostics, ParabolicMonotoneResult, SemilinearProblem, TrajectoryBracket,
};

use crate::comparison::{certify_elliptic, BoundaryOperator};
use crate::error::{Error, Result};
use crate::graph::operators::normal_derivative;
use crate::graph::{BoundaryKind, DriftField, Geometry, GraphFunction, WeightedGraph};
use crate::linear::{DriftEllipticSolver, EllipticSolver};
use crate::reaction::Reaction;
use crate::series::SpaceTimeData;
use crate::spectral::{dirichlet_eigensystem, full_eigensystem, neumann_eigensystem};

/// Order interval ⟨lower, upper⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub lower: GraphFunction,
    pub upper: GraphFunction,
}

impl Bracket {
    pub fn new(lower: GraphFunction, upper: GraphFunction) -> Self {
        Self { lower, upper }
    }

    pub fn constant(n: usize, lower: f64, upper: f64) -> Self {
        Self::new(GraphFunction::constant(n, lower), GraphFunction::constant(n, upper))
    }

    /// Errors on the first vertex of `domain` where lower > upper.
    pub fn check(&self, graph: &WeightedGraph, domain: &[usize]) -> Result<()> {
        let n = graph.len();
        for len in [self.lower.len(), self.upper.len()] {
            if len != n {
                return Err(Error::Dimension { expected: n, got: len });
            }
        }
        match domain.iter().find(|&&x| self.lower[x] > self.upper[x]) {
            Some(&x) => Err(Error::BracketInverted {
                vertex: graph.id(x).to_string(),
                lower: self.lower[x],
                upper: self.upper[x],
            }),
            None => Ok(()),
        }
    }

    fn range(&self, domain: &[usize]) -> (f64, f64) {
        let lo = domain.iter().map(|&x| self.lower[x]).fold(f64::INFINITY, f64::min);
        let hi = domain.iter().map(|&x| self.upper[x]).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneOptions {
    /// Sup-norm increment tolerance; the equation residual must reach 10·tol.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for MonotoneOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 10_000,
        }
    }
}

/// Minimal and maximal solutions with the full iterate histories.
#[derive(Debug, Clone)]
pub struct MonotoneResult {
    pub minimal: GraphFunction,
    pub maximal: GraphFunction,
    /// Lower sequence, starting with the bracket's lower function.
    pub lower_iterates: Vec<GraphFunction>,
    /// Upper sequence, starting with the bracket's upper function.
    pub upper_iterates: Vec<GraphFunction>,
    pub iterations: usize,
    /// Sup-norm increments (lower, upper) per iteration.
    pub increments: Vec<(f64, f64)>,
    pub final_increment: f64,
    /// ‖û − ũ‖∞.
    pub gap: f64,
    /// Uniqueness is concluded when the gap is at most 100·tol.
    pub unique: bool,
    pub residual_minimal: f64,
    pub residual_maximal: f64,
    /// Largest boundary-condition defect of ũ and û.
    pub boundary_residual: f64,
    pub shift: f64,
    /// Set for drift problems: M + c₀ − |b|²/2.
    pub coercivity_margin: Option<f64>,
    pub warnings: Vec<String>,
}

/// Result of checking the monotone chains of a [`MonotoneResult`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    /// max over m, x of ũ_m − ũ_{m+1} (≤ 0 when nondecreasing).
    pub lower_decrease: f64,
    /// max over m, x of û_{m+1} − û_m (≤ 0 when nonincreasing).
    pub upper_increase: f64,
    /// max over m, x of ũ_m − û_m.
    pub crossing: f64,
    pub tolerance: f64,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.lower_decrease <= self.tolerance && self.upper_increase <= self.tolerance && self.crossing <= self.tolerance
    }

    pub fn worst(&self) -> f64 {
        self.lower_decrease.max(self.upper_increase).max(self.crossing)
    }
}

impl MonotoneResult {
    /// Checks the chains on `domain` with tolerance 1e-12·scale, where scale
    /// is the largest bracket magnitude (at least 1).
    pub fn check_chains(&self, domain: &[usize]) -> ChainReport {
        let scale = self.lower_iterates[0]
            .sup_norm()
            .max(self.upper_iterates[0].sup_norm())
            .max(1.0);
        let max_over = |a: &GraphFunction, b: &GraphFunction| domain.iter().map(|&x| a[x] - b[x]).fold(f64::NEG_INFINITY, f64::max);
        let lo = &self.lower_iterates;
        let up = &self.upper_iterates;
        let lower_decrease = lo.windows(2).map(|w| max_over(&w[0], &w[1])).fold(f64::NEG_INFINITY, f64::max);
        let upper_increase = up.windows(2).map(|w| max_over(&w[1], &w[0])).fold(f64::NEG_INFINITY, f64::max);
        let crossing = lo.iter().zip(up).map(|(l, u)| max_over(l, u)).fold(f64::NEG_INFINITY, f64::max);
        ChainReport {
            lower_decrease,
            upper_increase,
            crossing,
            tolerance: 1e-12 * scale,
        }
    }
}

/// Shared driver: `step` maps an iterate to the next, `residual` measures the
/// equation defect of an iterate.
fn run_sequences(
    bracket: &Bracket,
    opts: MonotoneOptions,
    step: impl Fn(&GraphFunction) -> Result<GraphFunction>,
    residual: impl Fn(&GraphFunction) -> Result<f64>,
) -> Result<(Vec<GraphFunction>, Vec<GraphFunction>, Vec<(f64, f64)>, f64, f64)> {
    let sup_diff = |a: &GraphFunction, b: &GraphFunction| a.sup_distance(b);
    let mut lower = vec![bracket.lower.clone()];
    let mut upper = vec![bracket.upper.clone()];
    let mut increments = Vec::new();
    loop {
        if increments.len() == opts.max_iters {
            let (a, b) = increments.last().copied().unwrap_or((f64::NAN, f64::NAN));
            return Err(Error::MaxIterations {
                iterations: opts.max_iters,
                increment: f64::max(a, b),
            });
        }
        let next_l = step(lower.last().expect("nonempty"))?;
        let next_u = step(upper.last().expect("nonempty"))?;
        if !(next_l.is_finite() && next_u.is_finite()) {
            return Err(Error::NonFinite("monotone iterate"));
        }
        let inc = (
            sup_diff(&next_l, lower.last().expect("nonempty")),
            sup_diff(&next_u, upper.last().expect("nonempty")),
        );
        increments.push(inc);
        lower.push(next_l);
        upper.push(next_u);
        if inc.0.max(inc.1) <= opts.tol {
            let rl = residual(lower.last().expect("nonempty"))?;
            let ru = residual(upper.last().expect("nonempty"))?;
            if rl.max(ru) <= 10.0 * opts.tol {
                return Ok((lower, upper, increments, rl, ru));
            }
        }
    }
}

fn finish(
    lower: Vec<GraphFunction>,
    upper: Vec<GraphFunction>,
    increments: Vec<(f64, f64)>,
    residuals: (f64, f64),
    boundary_residual: f64,
    shift: f64,
    coercivity_margin: Option<f64>,
    opts: MonotoneOptions,
    warnings: Vec<String>,
) -> MonotoneResult {
    let minimal = lower.last().expect("nonempty").clone();
    let maximal = upper.last().expect("nonempty").clone();
    let gap = minimal.sup_distance(&maximal);
    let final_increment = increments.last().map_or(0.0, |&(a, b)| a.max(b));
    MonotoneResult {
        minimal,
        maximal,
        iterations: increments.len(),
        lower_iterates: lower,
        upper_iterates: upper,
        increments,
        final_increment,
        gap,
        unique: gap <= 100.0 * opts.tol,
        residual_minimal: residuals.0,
        residual_maximal: residuals.1,
        boundary_residual,
        shift,
        coercivity_margin,
        warnings,
    }
}

/// Lipschitz shift on the bracket range; zero is replaced by one.
fn shift_for(f: &Reaction, bracket: &Bracket, domain: &[usize], n: usize) -> Result<f64> {
    let (lo, hi) = bracket.range(domain);
    let m = f.lipschitz_constant(lo, hi, n)?;
    Ok(if m > 0.0 { m } else { 1.0 })
}

fn closure_of(geometry: Geometry<'_>) -> Vec<usize> {
    let mut all = geometry.active();
    all.extend_from_slice(geometry.boundary());
    all
}

/// −Δu − f(u) on the active set, sup norm.
fn semilinear_residual(geometry: Geometry<'_>, f: &Reaction, u: &GraphFunction) -> Result<f64> {
    let zeros = vec![0.0; u.len()];
    let cert = certify_elliptic(u, geometry, None, &zeros, &|x, v| f.eval(x, v), None, Some(0.0))?;
    Ok(cert.min_residual.abs().max(cert.max_residual.abs()))
}

fn boundary_defect(geometry: Geometry<'_>, data: &[f64], u: &GraphFunction) -> Result<f64> {
    let mut worst = 0.0_f64;
    if let (Some(p), Some(kind)) = (geometry.partition(), geometry.boundary_kind()) {
        for &z in p.boundary() {
            let value = match kind {
                BoundaryKind::Dirichlet => u[z],
                BoundaryKind::Neumann => normal_derivative(geometry.graph(), p, u, z)?,
            };
            worst = worst.max((value - data[z]).abs());
        }
    }
    Ok(worst)
}

/// Warnings for a bracket whose ends fail their certificates.
fn bracket_warnings(
    geometry: Geometry<'_>,
    drift: Option<&DriftField>,
    c: &[f64],
    f: &Reaction,
    data: &[f64],
    bracket: &Bracket,
) -> Result<Vec<String>> {
    let op = BoundaryOperator::for_geometry(geometry, SpaceTimeData::Steady(GraphFunction::new(data.to_vec())));
    let source = |x: usize, v: f64| f.eval(x, v);
    let mut warnings = Vec::new();
    let low = certify_elliptic(&bracket.lower, geometry, drift, c, &source, op.as_ref(), None)?;
    if !low.verdict.is_sub() {
        warnings.push(format!(
            "lower bracket is not a certified subsolution (max residual {:e})",
            low.max_residual.max(low.max_boundary_margin.unwrap_or(f64::NEG_INFINITY))
        ));
    }
    let high = certify_elliptic(&bracket.upper, geometry, drift, c, &source, op.as_ref(), None)?;
    if !high.verdict.is_super() {
        warnings.push(format!(
            "upper bracket is not a certified supersolution (min residual {:e})",
            high.min_residual.min(high.min_boundary_margin.unwrap_or(f64::INFINITY))
        ));
    }
    Ok(warnings)
}

/// Monotone iteration for −Δ_Ω u = f(x, u) on Ω with Dirichlet values or
/// Neumann flux `data` on ∂Ω, or for −Δ_V u = f on the whole graph.
pub fn elliptic_monotone(
    geometry: Geometry<'_>,
    f: &Reaction,
    data: &[f64],
    bracket: &Bracket,
    opts: MonotoneOptions,
) -> Result<MonotoneResult> {
    f.validate()?;
    let graph = geometry.graph();
    let n = graph.len();
    if data.len() != n {
        return Err(Error::Dimension { expected: n, got: data.len() });
    }
    let domain = closure_of(geometry);
    bracket.check(graph, &domain)?;
    let warnings = bracket_warnings(geometry, None, &vec![0.0; n], f, data, bracket)?;
    let shift = shift_for(f, bracket, &domain, n)?;
    let solver = EllipticSolver::new(geometry, shift)?;
    let step = |u: &GraphFunction| {
        let rhs: Vec<f64> = (0..n).map(|x| shift * u[x] + f.eval(x, u[x])).collect();
        solver.solve(&rhs, data)
    };
    let residual = |u: &GraphFunction| semilinear_residual(geometry, f, u);
    let (lower, upper, increments, rl, ru) = run_sequences(bracket, opts, step, residual)?;
    let boundary_residual =
        boundary_defect(geometry, data, lower.last().expect("nonempty"))?.max(boundary_defect(
            geometry,
            data,
            upper.last().expect("nonempty"),
        )?);
    Ok(finish(
        lower,
        upper,
        increments,
        (rl, ru),
        boundary_residual,
        shift,
        None,
        opts,
        warnings,
    ))
}

/// Monotone iteration for −Δ_V u − b·∇u + c u = f(x, u) on the whole graph.
///
/// The shift is M = max(M_lip, 1 + |b|²/2 − c₀) + 1 with |b| the max norm and
/// c₀ = min c, which keeps the drift operator coercive.
pub fn cauchy_elliptic_monotone(
    graph: &WeightedGraph,
    f: &Reaction,
    drift: &DriftField,
    c: &[f64],
    bracket: &Bracket,
    opts: MonotoneOptions,
) -> Result<MonotoneResult> {
    f.validate()?;
    let n = graph.len();
    for len in [drift.len(), c.len()] {
        if len != n {
            return Err(Error::Dimension { expected: n, got: len });
        }
    }
    if !drift.is_nonnegative() {
        return Err(Error::InvalidParameter("drift b must be nonnegative".into()));
    }
    let domain: Vec<usize> = (0..n).collect();
    bracket.check(graph, &domain)?;
    let geometry = Geometry::Whole(graph);
    let warnings = bracket_warnings(geometry, Some(drift), c, f, &vec![0.0; n], bracket)?;
    let (lo, hi) = bracket.range(&domain);
    let lip = f.lipschitz_constant(lo, hi, n)?;
    let c0 = c.iter().copied().fold(f64::INFINITY, f64::min);
    let b = drift.max_norm();
    let shift = lip.max(1.0 + 0.5 * b * b - c0) + 1.0;
    let solver = DriftEllipticSolver::new(graph, drift, c, shift)?;
    let step = |u: &GraphFunction| {
        let rhs: Vec<f64> = (0..n).map(|x| shift * u[x] + f.eval(x, u[x])).collect();
        solver.solve(&rhs)
    };
    let residual = |u: &GraphFunction| {
        let cert = certify_elliptic(u, geometry, Some(drift), c, &|x, v| f.eval(x, v), None, Some(0.0))?;
        Ok(cert.min_residual.abs().max(cert.max_residual.abs()))
    };
    let (lower, upper, increments, rl, ru) = run_sequences(bracket, opts, step, residual)?;
    Ok(finish(
        lower,
        upper,
        increments,
        (rl, ru),
        0.0,
        shift,
        Some(solver.margin()),
        opts,
        warnings,
    ))
}

/// Bracket [δ φ₁, cap] with φ₁ the positive principal eigenfunction of the
/// geometry and δ the largest power 2^−k (k ≤ 60) for which δ φ₁ ≤ cap and
/// δ φ₁ is a subsolution with zero tolerance. Falls back to lower = 0 (with a
/// warning) when no δ qualifies.
pub fn default_bracket(geometry: Geometry<'_>, f: &Reaction, data: &[f64], cap: f64) -> Result<(Bracket, Vec<String>)> {
    let graph = geometry.graph();
    let n = graph.len();
    let es = match geometry {
        Geometry::Whole(g) => full_eigensystem(g)?,
        Geometry::Bounded {
            graph,
            partition,
            kind: BoundaryKind::Dirichlet,
        } => dirichlet_eigensystem(graph, partition)?,
        Geometry::Bounded { graph, partition, .. } => neumann_eigensystem(graph, partition)?,
    };
    let phi = es.eigenfunction(0);
    let upper = GraphFunction::constant(n, cap);
    let op = BoundaryOperator::for_geometry(geometry, SpaceTimeData::Steady(GraphFunction::new(data.to_vec())));
    let zeros = vec![0.0; n];
    let domain = closure_of(geometry);
    for k in 0..=60 {
        let delta = 0.5_f64.powi(k);
        let lower = phi.scaled(delta);
        if domain.iter().any(|&x| lower[x] > upper[x]) {
            continue;
        }
        let cert = certify_elliptic(&lower, geometry, None, &zeros, &|x, v| f.eval(x, v), op.as_ref(), Some(0.0))?;
        if cert.verdict.is_sub() {
            return Ok((Bracket::new(lower, upper), Vec::new()));
        }
    }
    Ok((
        Bracket::new(GraphFunction::zeros(n), upper),
        vec!["no positive multiple of the principal eigenfunction is a subsolution; lower bracket set to 0".into()],
    ))
}
