//! Numerical certificates for maximum and comparison principles.
//!
//! A certificate evaluates the equation residual of a candidate function on
//! its grid, together with boundary and initial margins, and classifies the
//! candidate as a super- or subsolution within a tolerance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::operators::{drift_dot_gradient, laplacian_domain, laplacian_full, normal_derivative};
use crate::graph::{DriftField, Geometry, GraphFunction};
use crate::series::{SpaceTimeData, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    ParabolicIbvp,
    ParabolicCauchy,
    EllipticBvp,
    EllipticCauchy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Supersolution,
    Subsolution,
    /// Residual and margins vanish within tolerance.
    Both,
    Neither,
}

impl Verdict {
    pub fn is_super(self) -> bool {
        matches!(self, Verdict::Supersolution | Verdict::Both)
    }

    pub fn is_sub(self) -> bool {
        matches!(self, Verdict::Subsolution | Verdict::Both)
    }

    fn from_flags(sup: bool, sub: bool) -> Self {
        match (sup, sub) {
            (true, true) => Verdict::Both,
            (true, false) => Verdict::Supersolution,
            (false, true) => Verdict::Subsolution,
            (false, false) => Verdict::Neither,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Equation,
    Boundary,
    Initial,
}

/// Where an extreme value was found; `time` is absent for elliptic checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Location {
    pub part: Part,
    pub vertex: usize,
    pub time: Option<f64>,
    pub value: f64,
}

/// Running minimum and maximum with their locations.
#[derive(Debug, Clone, Default)]
struct Extremes {
    min: Option<Location>,
    max: Option<Location>,
}

impl Extremes {
    fn push(&mut self, part: Part, vertex: usize, time: Option<f64>, value: f64) {
        let loc = || Location {
            part,
            vertex,
            time,
            value,
        };
        if self.min.as_ref().is_none_or(|m| value < m.value) {
            self.min = Some(loc());
        }
        if self.max.as_ref().is_none_or(|m| value > m.value) {
            self.max = Some(loc());
        }
    }

    fn min(&self) -> Option<f64> {
        self.min.as_ref().map(|l| l.value)
    }

    fn max(&self) -> Option<f64> {
        self.max.as_ref().map(|l| l.value)
    }
}

/// Outcome of a residual check. Margins are `None` when the corresponding
/// condition does not exist (no boundary, no initial data).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualCertificate {
    pub kind: CertificateKind,
    pub min_residual: f64,
    pub max_residual: f64,
    pub min_boundary_margin: Option<f64>,
    pub max_boundary_margin: Option<f64>,
    pub min_initial_margin: Option<f64>,
    pub max_initial_margin: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Most negative entry over all parts; the candidate location when the
    /// supersolution check fails.
    pub worst_low: Option<Location>,
    /// Most positive entry over all parts.
    pub worst_high: Option<Location>,
}

impl ResidualCertificate {
    fn build(
        kind: CertificateKind,
        eq: Extremes,
        bd: Extremes,
        init: Extremes,
        tolerance: f64,
    ) -> Result<Self> {
        let min_residual = eq.min().ok_or(Error::EmptySubset)?;
        let max_residual = eq.max().ok_or(Error::EmptySubset)?;
        let lows = [bd.min(), init.min()];
        let highs = [bd.max(), init.max()];
        let sup = min_residual >= -tolerance && lows.iter().flatten().all(|&v| v >= -tolerance);
        let sub = max_residual <= tolerance && highs.iter().flatten().all(|&v| v <= tolerance);
        let worst_low = [&eq.min, &bd.min, &init.min]
            .into_iter()
            .flatten()
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .cloned();
        let worst_high = [&eq.max, &bd.max, &init.max]
            .into_iter()
            .flatten()
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .cloned();
        Ok(Self {
            kind,
            min_residual,
            max_residual,
            min_boundary_margin: bd.min(),
            max_boundary_margin: bd.max(),
            min_initial_margin: init.min(),
            max_initial_margin: init.max(),
            tolerance,
            verdict: Verdict::from_flags(sup, sub),
            worst_low,
            worst_high,
        })
    }
}

/// Boundary operator α v + β ∂v/∂n − data on ∂Ω.
#[derive(Debug, Clone)]
pub struct BoundaryOperator {
    pub alpha: SpaceTimeData,
    pub beta: SpaceTimeData,
    pub data: SpaceTimeData,
}

impl BoundaryOperator {
    pub fn dirichlet(data: SpaceTimeData) -> Self {
        Self {
            alpha: SpaceTimeData::function(|_, _| 1.0),
            beta: SpaceTimeData::Zero,
            data,
        }
    }

    pub fn neumann(data: SpaceTimeData) -> Self {
        Self {
            alpha: SpaceTimeData::Zero,
            beta: SpaceTimeData::function(|_, _| 1.0),
            data,
        }
    }

    /// Dirichlet or Neumann according to the geometry; `None` on the whole graph.
    pub fn for_geometry(geometry: Geometry<'_>, data: SpaceTimeData) -> Option<Self> {
        match geometry.boundary_kind()? {
            crate::graph::BoundaryKind::Dirichlet => Some(Self::dirichlet(data)),
            crate::graph::BoundaryKind::Neumann => Some(Self::neumann(data)),
        }
    }
}

/// Reaction term of a residual: v_t − Δv − f(x, t, v).
pub type ReactionFn<'a> = dyn Fn(usize, f64, f64) -> f64 + 'a;

/// f(x, t, v) = k(x, t) v + source(x, t).
pub fn linear_reaction(k: SpaceTimeData, source: SpaceTimeData) -> impl Fn(usize, f64, f64) -> f64 {
    move |x, t, v| k.eval(x, t) * v + source.eval(x, t)
}

fn laplacian_active(geometry: Geometry<'_>, u: &[f64], x: usize) -> Result<f64> {
    match geometry.partition() {
        Some(p) => laplacian_domain(geometry.graph(), p, u, x),
        None => laplacian_full(geometry.graph(), u, x),
    }
}

/// Default parabolic tolerance 10·dt·(1 + ‖v‖∞) with dt the largest step.
pub fn default_parabolic_tolerance(series: &TimeSeries) -> f64 {
    let dt = series
        .times()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    let norm = series.states().iter().map(|s| s.sup_norm()).fold(0.0, f64::max);
    10.0 * dt * (1.0 + norm)
}

/// Checks v_t − Δv − f(x, t, v) against zero on the active set over (0, T],
/// the boundary operator on ∂Ω over (0, T], and v(·, 0) − `initial` on the
/// active set. `initial = None` compares against zero.
pub fn certify_parabolic(
    series: &TimeSeries,
    geometry: Geometry<'_>,
    reaction: &ReactionFn<'_>,
    boundary: Option<&BoundaryOperator>,
    initial: Option<&[f64]>,
    tolerance: Option<f64>,
) -> Result<ResidualCertificate> {
    let n = geometry.graph().len();
    if series.len() < 3 {
        return Err(Error::GridTooCoarse {
            needed: 3,
            got: series.len(),
        });
    }
    if series.vertex_count() != n {
        return Err(Error::Dimension {
            expected: n,
            got: series.vertex_count(),
        });
    }
    let active = geometry.active();
    let times = series.times();
    let states = series.states();
    let last = times.len() - 1;
    let tolerance = tolerance.unwrap_or_else(|| default_parabolic_tolerance(series));

    let mut eq = Extremes::default();
    let mut bd = Extremes::default();
    let mut init = Extremes::default();
    for k in 1..=last {
        let (lo, hi) = if k == last { (k - 1, k) } else { (k - 1, k + 1) };
        let span = times[hi] - times[lo];
        let t = times[k];
        let v = &states[k];
        for &x in &active {
            let vt = (states[hi][x] - states[lo][x]) / span;
            let r = vt - laplacian_active(geometry, v, x)? - reaction(x, t, v[x]);
            eq.push(Part::Equation, x, Some(t), r);
        }
        if let (Some(op), Some(p)) = (boundary, geometry.partition()) {
            for &z in p.boundary() {
                let beta = op.beta.eval(z, t);
                let flux = if beta != 0.0 {
                    normal_derivative(geometry.graph(), p, v, z)?
                } else {
                    0.0
                };
                let m = op.alpha.eval(z, t) * v[z] + beta * flux - op.data.eval(z, t);
                bd.push(Part::Boundary, z, Some(t), m);
            }
        }
    }
    for &x in &active {
        let base = initial.map_or(0.0, |u| u[x]);
        init.push(Part::Initial, x, Some(0.0), states[0][x] - base);
    }
    let kind = if geometry.partition().is_some() {
        CertificateKind::ParabolicIbvp
    } else {
        CertificateKind::ParabolicCauchy
    };
    ResidualCertificate::build(kind, eq, bd, init, tolerance)
}

/// Default elliptic tolerance 1e-9·(1 + ‖u‖∞).
pub fn default_elliptic_tolerance(u: &[f64]) -> f64 {
    1e-9 * (1.0 + u.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Checks −Δu − b·∇u + c u − source(x, u(x)) on the active set and the
/// boundary operator (time 0) on ∂Ω. The drift is only used on the whole
/// graph.
pub fn certify_elliptic(
    u: &[f64],
    geometry: Geometry<'_>,
    drift: Option<&DriftField>,
    c: &[f64],
    source: &dyn Fn(usize, f64) -> f64,
    boundary: Option<&BoundaryOperator>,
    tolerance: Option<f64>,
) -> Result<ResidualCertificate> {
    let graph = geometry.graph();
    let n = graph.len();
    for len in [u.len(), c.len()] {
        if len != n {
            return Err(Error::Dimension { expected: n, got: len });
        }
    }
    let tolerance = tolerance.unwrap_or_else(|| default_elliptic_tolerance(u));
    let mut eq = Extremes::default();
    let mut bd = Extremes::default();
    for x in geometry.active() {
        let mut r = -laplacian_active(geometry, u, x)? + c[x] * u[x] - source(x, u[x]);
        if let (Some(b), None) = (drift, geometry.partition()) {
            r -= drift_dot_gradient(graph, b, u, x)?;
        }
        eq.push(Part::Equation, x, None, r);
    }
    if let (Some(op), Some(p)) = (boundary, geometry.partition()) {
        for &z in p.boundary() {
            let beta = op.beta.eval(z, 0.0);
            let flux = if beta != 0.0 {
                normal_derivative(graph, p, u, z)?
            } else {
                0.0
            };
            bd.push(
                Part::Boundary,
                z,
                None,
                op.alpha.eval(z, 0.0) * u[z] + beta * flux - op.data.eval(z, 0.0),
            );
        }
    }
    let kind = if geometry.partition().is_some() {
        CertificateKind::EllipticBvp
    } else {
        CertificateKind::EllipticCauchy
    };
    ResidualCertificate::build(kind, eq, bd, Extremes::default(), tolerance)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    /// upper ≥ lower − tolerance everywhere.
    pub ordered: bool,
    pub tolerance: f64,
    /// min of upper − lower over all vertices and times.
    pub min_gap: f64,
    /// First (time, vertex) where upper < lower − tolerance.
    pub first_violation: Option<(f64, usize)>,
    /// min of upper − lower over `domain` × (0, T].
    pub strict_margin: f64,
}

impl OrderingReport {
    pub fn strictly_ordered(&self) -> bool {
        self.strict_margin > 0.0
    }
}

/// Compares two series on the same grid; the strict margin is taken over
/// `domain` at positive times.
pub fn assert_ordering(
    upper: &TimeSeries,
    lower: &TimeSeries,
    domain: &[usize],
    tolerance: f64,
) -> Result<OrderingReport> {
    if upper.times() != lower.times() {
        return Err(Error::GridMismatch);
    }
    if upper.vertex_count() != lower.vertex_count() {
        return Err(Error::Dimension {
            expected: upper.vertex_count(),
            got: lower.vertex_count(),
        });
    }
    let mut min_gap = f64::INFINITY;
    let mut strict_margin = f64::INFINITY;
    let mut first_violation = None;
    for (k, (&t, (a, b))) in upper
        .times()
        .iter()
        .zip(upper.states().iter().zip(lower.states()))
        .enumerate()
    {
        for x in 0..a.len() {
            let gap = a[x] - b[x];
            min_gap = min_gap.min(gap);
            if first_violation.is_none() && gap < -tolerance {
                first_violation = Some((t, x));
            }
        }
        if k > 0 {
            for &x in domain {
                strict_margin = strict_margin.min(a[x] - b[x]);
            }
        }
    }
    Ok(OrderingReport {
        ordered: first_violation.is_none(),
        tolerance,
        min_gap,
        first_violation,
        strict_margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityMode {
    /// min ≥ −tolerance over the domain at every time.
    Nonneg,
    /// min over the domain at positive times > 1e-14·‖u‖∞.
    StrictInterior,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub mode: PositivityMode,
    pub passed: bool,
    pub min_value: f64,
    pub location: Option<(f64, usize)>,
    pub threshold: f64,
}

/// Relative threshold for strict positivity.
pub const STRICT_THRESHOLD: f64 = 1e-14;

fn positivity<'a>(
    states: impl Iterator<Item = (f64, &'a GraphFunction)> + Clone,
    domain: &[usize],
    mode: PositivityMode,
    tolerance: f64,
) -> PositivityReport {
    let norm = states.clone().map(|(_, s)| s.sup_norm()).fold(0.0, f64::max);
    let mut min_value = f64::INFINITY;
    let mut location = None;
    for (t, s) in states {
        for &x in domain {
            if s[x] < min_value {
                min_value = s[x];
                location = Some((t, x));
            }
        }
    }
    let (passed, threshold) = match mode {
        PositivityMode::Nonneg => (min_value >= -tolerance, -tolerance),
        PositivityMode::StrictInterior => {
            let th = STRICT_THRESHOLD * norm;
            (min_value > th, th)
        }
    };
    PositivityReport {
        mode,
        passed,
        min_value,
        location,
        threshold,
    }
}

/// Sign check of a series on `domain`; strict mode skips t = 0.
pub fn check_positivity(
    series: &TimeSeries,
    domain: &[usize],
    mode: PositivityMode,
    tolerance: f64,
) -> PositivityReport {
    let skip = usize::from(mode == PositivityMode::StrictInterior && series.len() > 1);
    let states = series
        .times()
        .iter()
        .copied()
        .zip(series.states())
        .skip(skip);
    positivity(states, domain, mode, tolerance)
}

/// Sign check of a single vertex function on `domain`.
pub fn check_positivity_fn(
    u: &GraphFunction,
    domain: &[usize],
    mode: PositivityMode,
    tolerance: f64,
) -> PositivityReport {
    positivity(std::iter::once((0.0, u)), domain, mode, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{five_vertex_graph, five_vertex_initial, five_vertex_partition};
    use crate::linear::{solve_ibvp_dirichlet, LinearParabolicProblem};
    use crate::series::uniform_grid;
    use crate::spectral::dirichlet_eigensystem;

    fn zero_reaction(_: usize, _: f64, _: f64) -> f64 {
        0.0
    }

    #[test]
    fn zero_series_is_both() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let geo = Geometry::dirichlet(&g, &p);
        let s = TimeSeries::constant(uniform_grid(1.0, 10), GraphFunction::zeros(5)).unwrap();
        let k = linear_reaction(SpaceTimeData::function(|x, t| (x as f64 + t).sin()), SpaceTimeData::Zero);
        let op = BoundaryOperator::dirichlet(SpaceTimeData::Zero);
        let cert = certify_parabolic(&s, geo, &k, Some(&op), None, None).unwrap();
        assert_eq!(cert.verdict, Verdict::Both);
        assert!((cert.tolerance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heat_solution_is_certified_and_nonnegative() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let geo = Geometry::dirichlet(&g, &p);
        let u0 = five_vertex_initial();
        let grid = uniform_grid(1.0, 200);
        let s = solve_ibvp_dirichlet(&LinearParabolicProblem::homogeneous(geo, u0.clone()), &grid).unwrap();
        let op = BoundaryOperator::dirichlet(SpaceTimeData::Zero);
        let cert = certify_parabolic(&s, geo, &zero_reaction, Some(&op), Some(&u0), None).unwrap();
        assert!(cert.verdict.is_super(), "{cert:?}");
        let pos = check_positivity(&s, &[0, 1, 2, 3, 4], PositivityMode::Nonneg, 1e-9);
        assert!(pos.passed);
        let strict = check_positivity(&s, p.interior(), PositivityMode::StrictInterior, 0.0);
        assert!(strict.passed, "{strict:?}");
    }

    #[test]
    fn perturbed_initial_value_is_located() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let geo = Geometry::dirichlet(&g, &p);
        let grid = uniform_grid(1.0, 100);
        let mut states: Vec<GraphFunction> = vec![GraphFunction::zeros(5); grid.len()];
        states[0][1] -= 1.0;
        let s = TimeSeries::new(grid, states).unwrap();
        let op = BoundaryOperator::dirichlet(SpaceTimeData::Zero);
        let cert = certify_parabolic(&s, geo, &zero_reaction, Some(&op), None, None).unwrap();
        assert_eq!(cert.verdict, Verdict::Neither);
        let worst = cert.worst_low.unwrap();
        assert_eq!((worst.part, worst.vertex, worst.time), (Part::Initial, 1, Some(0.0)));
    }

    #[test]
    fn too_short_series_is_rejected() {
        let g = five_vertex_graph();
        let s = TimeSeries::constant(vec![0.0, 1.0], GraphFunction::zeros(5)).unwrap();
        let r = certify_parabolic(&s, Geometry::Whole(&g), &zero_reaction, None, None, None);
        assert!(matches!(r, Err(Error::GridTooCoarse { needed: 3, got: 2 })));
    }

    #[test]
    fn elliptic_certificates() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let geo = Geometry::dirichlet(&g, &p);
        let zero = vec![0.0; 5];
        let op = BoundaryOperator::dirichlet(SpaceTimeData::Zero);
        let cert = certify_elliptic(&zero, geo, None, &zero, &|_, _| 0.0, Some(&op), None).unwrap();
        assert_eq!(cert.verdict, Verdict::Both);

        let es = dirichlet_eigensystem(&g, &p).unwrap();
        let phi = es.eigenfunction(0).clone();
        let lambda = es.eigenvalue(0);
        let rhs = phi.scaled(lambda);
        let cert = certify_elliptic(&phi, geo, None, &zero, &|x, _| rhs[x], Some(&op), Some(1e-10)).unwrap();
        assert_eq!(cert.verdict, Verdict::Both);
        assert!(cert.min_residual.abs() < 1e-10 && cert.max_residual.abs() < 1e-10);

        let mut bumped = rhs.clone();
        bumped[2] += 1.0;
        let cert = certify_elliptic(&phi, geo, None, &zero, &|x, _| bumped[x], Some(&op), None).unwrap();
        assert_eq!(cert.verdict, Verdict::Subsolution);
        let mut mixed = bumped.clone();
        mixed[0] -= 1.0;
        let cert = certify_elliptic(&phi, geo, None, &zero, &|x, _| mixed[x], Some(&op), None).unwrap();
        assert_eq!(cert.verdict, Verdict::Neither);
        assert_eq!(cert.worst_low.unwrap().vertex, 2);
        assert_eq!(cert.worst_high.unwrap().vertex, 0);
    }

    #[test]
    fn ordering_reports() {
        let grid = uniform_grid(1.0, 4);
        let a = TimeSeries::constant(grid.clone(), GraphFunction::new(vec![1.0, 2.0])).unwrap();
        let same = assert_ordering(&a, &a, &[0, 1], 0.0).unwrap();
        assert!(same.ordered && same.strict_margin == 0.0 && !same.strictly_ordered());

        let states = (0..5)
            .map(|k| GraphFunction::new(vec![1.0, 1.0 + k as f64 * 0.5]))
            .collect();
        let b = TimeSeries::new(grid, states).unwrap();
        let report = assert_ordering(&a, &b, &[0, 1], 1e-12).unwrap();
        assert!(!report.ordered);
        assert_eq!(report.first_violation, Some((0.75, 1)));
        assert_eq!(report.min_gap, -1.0);
    }

    #[test]
    fn zero_series_is_nonnegative_but_not_strict() {
        let s = TimeSeries::constant(uniform_grid(1.0, 3), GraphFunction::zeros(3)).unwrap();
        assert!(check_positivity(&s, &[0, 1, 2], PositivityMode::Nonneg, 0.0).passed);
        assert!(!check_positivity(&s, &[0, 1, 2], PositivityMode::StrictInterior, 0.0).passed);
    }

    #[test]
    fn looser_tolerance_never_fails_more() {
        let g = five_vertex_graph();
        let p = five_vertex_partition();
        let geo = Geometry::dirichlet(&g, &p);
        let grid = uniform_grid(1.0, 50);
        let s = solve_ibvp_dirichlet(&LinearParabolicProblem::homogeneous(geo, five_vertex_initial()), &grid).unwrap();
        let op = BoundaryOperator::dirichlet(SpaceTimeData::Zero);
        let mut prev_super = false;
        for tol in [1e-6, 1e-4, 1e-2, 1.0, 10.0] {
            let cert = certify_parabolic(&s, geo, &zero_reaction, Some(&op), None, Some(tol)).unwrap();
            assert!(!prev_super || cert.verdict.is_super());
            prev_super = cert.verdict.is_super();
        }
        assert!(prev_super);
    }
}
