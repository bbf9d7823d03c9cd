//! Subcommand implementations.

use std::io::Write as _;
use std::path::PathBuf;

use graphpde::comparison::{
    certify_elliptic, certify_parabolic, check_positivity, default_elliptic_tolerance, linear_reaction,
    BoundaryOperator, PositivityMode, ReactionFn, Verdict,
};
use graphpde::demo::{five_vertex_file, five_vertex_graph, five_vertex_initial, five_vertex_partition};
use graphpde::dynamics::{
    classify_allen_cahn, classify_kpp_cauchy, classify_logistic_dirichlet, classify_logistic_neumann, integrate,
    Classification, RunControls, Scenario,
};
use graphpde::graph::io::parse_graph;
use graphpde::graph::{validate, DomainPartition, DriftField, Geometry, GraphFunction, WeightedGraph};
use graphpde::linear::{solve_linear, LinearParabolicProblem};
use graphpde::monotone::{
    cauchy_elliptic_monotone, default_bracket, elliptic_monotone, Bracket, MonotoneOptions, MonotoneResult,
};
use graphpde::reaction::Reaction;
use graphpde::series::{uniform_grid, SpaceTimeData, TimeSeries};
use graphpde::spectral::{dirichlet_eigensystem, full_eigensystem, neumann_eigensystem};
use graphpde::suite::{max_principle_suite, monotone_chain_suite, ordering_suite};
use rayon::prelude::*;

use crate::config::{ClassifyConfig, Model, ProblemKind, RunConfig, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::output::{
    num, plot_blocks, ChainSummary, Meta, OutDir, Report, SpectrumReport, SteadyReport, VerdictEntry,
};

pub struct Context {
    pub graph: Option<PathBuf>,
    pub config_path: Option<PathBuf>,
    pub config: RunConfig,
    pub out: OutDir,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub quiet: bool,
    pub pool: rayon::ThreadPool,
}

struct LoadedGraph {
    graph: WeightedGraph,
    partition: Option<DomainPartition>,
    path: String,
}

impl LoadedGraph {
    fn geometry(&self, kind: ProblemKind) -> Result<Geometry<'_>> {
        let g = &self.graph;
        match (kind, &self.partition) {
            (ProblemKind::Cauchy, _) => Ok(Geometry::Whole(g)),
            (ProblemKind::Dirichlet, Some(p)) => Ok(Geometry::dirichlet(g, p)),
            (ProblemKind::Neumann, Some(p)) => Ok(Geometry::neumann(g, p)),
            (_, None) => Err(CliError::Precondition(format!(
                "{}: a bounded problem needs interior and boundary roles in the graph file",
                self.path
            ))),
        }
    }

    fn ids(&self) -> &[String] {
        self.graph.ids()
    }
}

/// Ω ∪ ∂Ω in vertex order, or every vertex on the whole graph.
fn closure(geo: Geometry<'_>) -> Vec<usize> {
    let mut v = geo.active();
    v.extend_from_slice(geo.boundary());
    v.sort_unstable();
    v
}

impl Context {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            // A closed pipe only loses progress text; the files are what matter.
            let _ = writeln!(std::io::stdout(), "{}", line.as_ref());
        }
    }

    fn meta(&self, command: &'static str, graph: Option<String>) -> Meta {
        Meta {
            program: "graphpde",
            version: env!("CARGO_PKG_VERSION"),
            command,
            graph,
            config: self.config_path.as_ref().map(|p| p.display().to_string()),
            seed: self.seed.or(self.config.seed),
            tolerance: self.tol,
        }
    }

    fn load_graph(&self) -> Result<LoadedGraph> {
        let path = self
            .graph
            .clone()
            .or_else(|| self.config.graph.clone())
            .ok_or_else(|| CliError::config("graph", "no graph file given (use --graph or `graph` in the config)"))?;
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
            path: shown.clone(),
            source,
        })?;
        let file = parse_graph(&text).map_err(|e| CliError::config(shown.clone(), e.to_string()))?;
        Ok(LoadedGraph {
            graph: file.graph,
            partition: file.partition,
            path: shown,
        })
    }

    fn scenario(&self) -> Result<&ScenarioConfig> {
        self.config
            .scenario
            .as_ref()
            .ok_or_else(|| CliError::config("config", "missing [scenario] section (pass --config)"))
    }

    fn certificate_tolerance(&self) -> Option<f64> {
        self.tol.or(self.config.tolerances.certificate)
    }

    fn write_trajectory(&self, stem: &str, series: &TimeSeries, ids: &[String], vertices: &[usize]) -> Result<()> {
        let csv = self.out.write(&format!("{stem}.csv"), &series.to_csv(ids))?;
        let dat = self.out.write(&format!("{stem}.dat"), &plot_blocks(series, ids, vertices))?;
        self.say(format!("wrote {}", csv.display()));
        self.say(format!("wrote {}", dat.display()));
        Ok(())
    }

    fn finish(&self, report: &Report) -> Result<()> {
        let path = self.out.write_report("report.json", report)?;
        self.say(format!("wrote {}", path.display()));
        Ok(())
    }
}

/// A trajectory must solve its own equation to within the certificate
/// tolerance before it is reported.
fn require_solution(name: &str, entry: &VerdictEntry) -> Result<()> {
    if entry.certificate.verdict == Verdict::Both {
        return Ok(());
    }
    Err(CliError::Failed(format!(
        "{name}: output failed its residual certificate (verdict {:?}, residual range [{:e}, {:e}], tolerance {:e})",
        entry.certificate.verdict, entry.certificate.min_residual, entry.certificate.max_residual, entry.certificate.tolerance
    )))
}

pub fn validate_cmd(ctx: &Context) -> Result<()> {
    let g = ctx.load_graph()?;
    let report = validate(&g.graph, g.partition.as_ref());
    ctx.say(format!("{}: {} vertices, {} edges", g.path, g.graph.len(), g.graph.edges().len()));
    ctx.say(report.to_string().trim_end());
    let ok = report.is_ok();
    let count = report.violations.len();
    let mut out = Report::new(ctx.meta("validate", Some(g.path.clone())));
    out.validation = Some(report);
    ctx.finish(&out)?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Precondition(format!("{}: {count} violation(s)", g.path)))
    }
}

pub fn eig_cmd(ctx: &Context) -> Result<()> {
    let g = ctx.load_graph()?;
    let graph = &g.graph;
    let all: Vec<usize> = (0..graph.len()).collect();
    let mut spectra = vec![SpectrumReport::new(graph, &full_eigensystem(graph)?, &all)];
    if let Some(p) = &g.partition {
        let closure = closure(Geometry::dirichlet(graph, p));
        spectra.push(SpectrumReport::new(graph, &dirichlet_eigensystem(graph, p)?, &closure));
        spectra.push(SpectrumReport::new(graph, &neumann_eigensystem(graph, p)?, &closure));
    }
    for s in &spectra {
        ctx.say(format!("{:?} spectrum:", s.kind));
        for (j, l) in s.eigenvalues.iter().enumerate() {
            ctx.say(format!("  lambda{} = {}", j + 1, num(*l)));
        }
    }
    let mut out = Report::new(ctx.meta("eig", Some(g.path.clone())));
    out.spectrum = Some(spectra);
    ctx.finish(&out)
}

pub fn solve_cmd(ctx: &Context) -> Result<()> {
    let sc = ctx.scenario()?;
    let g = ctx.load_graph()?;
    let graph = &g.graph;
    let geo = g.geometry(sc.problem)?;
    let f = sc.reaction.build();
    f.validate()?;
    let initial = sc.initial.resolve(graph, "scenario.initial")?;
    let boundary = SpaceTimeData::Steady(sc.boundary.resolve(graph, "scenario.boundary")?);
    let forcing = sc.forcing.resolve(graph, "scenario.forcing")?;
    let linear = f.is_zero();
    if !linear && (sc.shift != 0.0 || !sc.forcing.is_zero()) {
        return Err(CliError::Precondition(
            "scenario.shift and scenario.forcing apply only to linear problems (reaction kind = \"zero\")".into(),
        ));
    }
    let series = if linear {
        let steps = ((sc.horizon / (sc.dt * sc.stride as f64)).round() as usize).max(1);
        let problem = LinearParabolicProblem {
            geometry: geo,
            shift: sc.shift,
            forcing: SpaceTimeData::Steady(forcing.clone()),
            boundary: boundary.clone(),
            initial: initial.clone(),
        };
        solve_linear(&problem, &uniform_grid(sc.horizon, steps))?
    } else {
        integrate(&Scenario {
            geometry: geo,
            reaction: f.clone(),
            boundary: boundary.clone(),
            initial: initial.clone(),
            horizon: sc.horizon,
            dt: sc.dt,
            stride: sc.stride,
        })?
    };
    let n = graph.len();
    let lin = linear_reaction(
        SpaceTimeData::Steady(GraphFunction::constant(n, -sc.shift)),
        SpaceTimeData::Steady(forcing.clone()),
    );
    let semi = |x: usize, _t: f64, v: f64| f.eval(x, v);
    let reaction: &ReactionFn<'_> = if linear { &lin } else { &semi };
    let op = BoundaryOperator::for_geometry(geo, boundary);
    let certificate = certify_parabolic(&series, geo, reaction, op.as_ref(), Some(&initial), ctx.certificate_tolerance())?;
    let vertices = closure(geo);
    let nonneg_data = initial.min() >= 0.0
        && sc.boundary.resolve(graph, "scenario.boundary")?.min() >= 0.0
        && forcing.min() >= 0.0
        && f.eval(0, 0.0) == 0.0;
    let positivity = nonneg_data.then(|| check_positivity(&series, &vertices, PositivityMode::Nonneg, 1e-12));
    let entry = VerdictEntry {
        name: "trajectory".into(),
        certificate,
        positivity,
    };
    require_solution("trajectory", &entry)?;
    ctx.say(format!(
        "{} samples to t = {}; certificate {:?}",
        series.len(),
        series.final_time(),
        entry.certificate.verdict
    ));
    ctx.write_trajectory("trajectory", &series, g.ids(), &vertices)?;
    let mut out = Report::new(ctx.meta("solve", Some(g.path.clone())));
    out.verdicts.push(entry);
    ctx.finish(&out)
}

/// Default upper bracket: the largest equilibrium of the built-in reactions,
/// raised to cover the boundary data.
fn default_cap(f: &Reaction, data: &GraphFunction) -> Option<f64> {
    let top = match f {
        Reaction::Logistic { a, b } => a / b,
        Reaction::AllenCahn { .. } => 1.0,
        _ => return None,
    };
    Some(top.max(data.max()).max(0.0))
}

fn steady_certificate(
    name: &str,
    u: &GraphFunction,
    geo: Geometry<'_>,
    drift: Option<&DriftField>,
    c: &[f64],
    f: &Reaction,
    op: Option<&BoundaryOperator>,
    tol: f64,
) -> Result<VerdictEntry> {
    let certificate = certify_elliptic(u, geo, drift, c, &|x, v| f.eval(x, v), op, Some(tol))?;
    Ok(VerdictEntry {
        name: name.into(),
        certificate,
        positivity: None,
    })
}

pub fn steady_cmd(ctx: &Context) -> Result<()> {
    let sc = ctx.scenario()?;
    let g = ctx.load_graph()?;
    let graph = &g.graph;
    let n = graph.len();
    let geo = g.geometry(sc.problem)?;
    let f = sc.reaction.build();
    f.validate()?;
    let cauchy = sc.problem == ProblemKind::Cauchy;
    let data = if cauchy {
        GraphFunction::zeros(n)
    } else {
        sc.boundary.resolve(graph, "scenario.boundary")?
    };
    if !cauchy && !(sc.drift.is_zero() && sc.c.is_zero()) {
        return Err(CliError::Precondition(
            "scenario.drift and scenario.c apply only to cauchy problems".into(),
        ));
    }
    let defaults = MonotoneOptions::default();
    let opts = MonotoneOptions {
        tol: ctx.tol.or(ctx.config.tolerances.monotone).unwrap_or(defaults.tol),
        max_iters: ctx.config.tolerances.max_iters.unwrap_or(defaults.max_iters),
    };
    let mut warnings = Vec::new();
    let bracket = match &sc.bracket {
        Some(b) => Bracket::new(
            b.lower.resolve(graph, "scenario.bracket.lower")?,
            b.upper.resolve(graph, "scenario.bracket.upper")?,
        ),
        None => {
            let cap = default_cap(&f, &data).ok_or_else(|| {
                CliError::Precondition("scenario.bracket is required for this reaction".into())
            })?;
            let (b, w) = default_bracket(geo, &f, &data, cap)?;
            warnings.extend(w);
            b
        }
    };
    let drift = sc.drift(graph)?;
    let c = sc.c.resolve(graph, "scenario.c")?;
    let result: MonotoneResult = if cauchy {
        cauchy_elliptic_monotone(graph, &f, &drift, &c, &bracket, opts)?
    } else {
        elliptic_monotone(geo, &f, data.values(), &bracket, opts)?
    };
    let vertices = closure(geo);
    let chains = result.check_chains(&vertices);
    let op = BoundaryOperator::for_geometry(geo, SpaceTimeData::Steady(data.clone()));
    let drift_ref = cauchy.then_some(&drift);
    let mut verdicts = Vec::new();
    for (name, u) in [("minimal", &result.minimal), ("maximal", &result.maximal)] {
        let tol = ctx
            .config
            .tolerances
            .certificate
            .unwrap_or_else(|| default_elliptic_tolerance(u).max(10.0 * opts.tol * (1.0 + u.sup_norm())));
        verdicts.push(steady_certificate(name, u, geo, drift_ref, &c, &f, op.as_ref(), tol)?);
    }
    ctx.say(format!(
        "{} iterations, shift {}, gap {:e}, unique {}",
        result.iterations, result.shift, result.gap, result.unique
    ));
    for &x in &vertices {
        ctx.say(format!(
            "  {}: {} {}",
            graph.id(x),
            num(result.minimal[x]),
            num(result.maximal[x])
        ));
    }
    let mut csv = String::from("vertex,minimal,maximal\n");
    for &x in &vertices {
        csv.push_str(&format!("{},{:.16e},{:.16e}\n", graph.id(x), result.minimal[x], result.maximal[x]));
    }
    let path = ctx.out.write("steady.csv", &csv)?;
    ctx.say(format!("wrote {}", path.display()));
    warnings.extend(result.warnings.iter().cloned());
    let bracket_warnings = result.warnings.clone();
    let mut out = Report::new(ctx.meta("steady", Some(g.path.clone())));
    out.verdicts = verdicts;
    out.steady = Some(SteadyReport {
        vertices: vertices.iter().map(|&x| graph.id(x).to_string()).collect(),
        minimal: result.minimal.clone(),
        maximal: result.maximal.clone(),
        iterations: result.iterations,
        shift: result.shift,
        gap: result.gap,
        unique: result.unique,
        residual_minimal: result.residual_minimal,
        residual_maximal: result.residual_maximal,
        boundary_residual: result.boundary_residual,
        coercivity_margin: result.coercivity_margin,
        chains: ChainSummary {
            lower_decrease: chains.lower_decrease,
            upper_increase: chains.upper_increase,
            crossing: chains.crossing,
            tolerance: chains.tolerance,
            passed: chains.passed(),
        },
        warnings,
    });
    ctx.finish(&out)?;
    for v in &out.verdicts {
        require_solution(&v.name, v)?;
    }
    if !chains.passed() {
        return Err(CliError::Failed(format!("monotone chains violated by {:e}", chains.worst())));
    }
    if !bracket_warnings.is_empty() {
        return Err(CliError::Hypothesis(bracket_warnings.join("; ")));
    }
    Ok(())
}

fn controls_for(ctx: &Context, c: &ClassifyConfig) -> RunControls {
    let mut controls = RunControls::default();
    if let Some(h) = c.horizon {
        controls.horizon = h;
    }
    if let Some(dt) = c.dt {
        controls.dt = dt;
    }
    if let Some(s) = c.stride {
        controls.stride = s;
    }
    if let Some(tol) = ctx.tol.or(ctx.config.tolerances.convergence) {
        controls.state_tolerance = tol;
        controls.constant_tolerance = tol;
    }
    controls
}

fn require(value: Option<f64>, field: String) -> Result<f64> {
    value.ok_or_else(|| CliError::config(field, "required for this model"))
}

/// Runs one classification and certifies its trajectory.
fn classify_one(
    ctx: &Context,
    g: &LoadedGraph,
    k: usize,
    c: &ClassifyConfig,
) -> Result<(Classification, VerdictEntry, Vec<usize>)> {
    let graph = &g.graph;
    let controls = controls_for(ctx, c);
    let initial = c.initial.resolve(graph, &format!("classify[{k}].initial"))?;
    let (class, geo, f) = match c.model {
        Model::LogisticDirichlet | Model::LogisticNeumann => {
            let a = require(c.a, format!("classify[{k}].a"))?;
            let b = c.b.unwrap_or(1.0);
            let dirichlet = c.model == Model::LogisticDirichlet;
            let kind = if dirichlet {
                ProblemKind::Dirichlet
            } else {
                ProblemKind::Neumann
            };
            let geo = g.geometry(kind)?;
            let p = geo.partition().expect("bounded geometry");
            let class = if dirichlet {
                classify_logistic_dirichlet(graph, p, a, b, &initial, &controls)?
            } else {
                classify_logistic_neumann(graph, p, a, b, &initial, &controls)?
            };
            (class, geo, Reaction::Logistic { a, b })
        }
        Model::Kpp => {
            let f = c
                .reaction
                .as_ref()
                .map_or(Reaction::Logistic { a: 1.0, b: 1.0 }, |r| r.build());
            (classify_kpp_cauchy(graph, &f, &initial, &controls)?, Geometry::Whole(graph), f)
        }
        Model::AllenCahn => {
            let alpha = require(c.alpha, format!("classify[{k}].alpha"))?;
            let f = c.reaction.as_ref().map_or(Reaction::AllenCahn { alpha }, |r| r.build());
            (
                classify_allen_cahn(graph, &f, alpha, &initial, &controls)?,
                Geometry::Whole(graph),
                f,
            )
        }
    };
    let op = BoundaryOperator::for_geometry(geo, SpaceTimeData::Zero);
    let certificate = certify_parabolic(
        &class.trajectory,
        geo,
        &|x, _t, v| f.eval(x, v),
        op.as_ref(),
        Some(&initial),
        ctx.certificate_tolerance(),
    )?;
    let entry = VerdictEntry {
        name: c.name.clone(),
        certificate,
        positivity: None,
    };
    Ok((class, entry, closure(geo)))
}

fn hypothesis_failures(classes: &[Classification]) -> Vec<String> {
    classes
        .iter()
        .flat_map(|c| {
            c.evidence
                .hypotheses
                .iter()
                .filter(|h| !h.passed)
                .map(move |h| format!("{}: {} ({})", c.scenario, h.name, h.detail))
        })
        .collect()
}

fn summarize(ctx: &Context, name: &str, c: &Classification) {
    let lambda = c.lambda1.map_or(String::new(), |l| format!(", lambda1 = {}", num(l)));
    let predicted = c.predicted.as_deref().map_or(String::new(), |p| format!(", predicted {p}"));
    ctx.say(format!("{name}: {}{predicted}{lambda}", c.outcome.name()));
}

pub fn classify_cmd(ctx: &Context) -> Result<()> {
    if ctx.config.classify.is_empty() {
        return Err(CliError::config("config", "no [[classify]] scenarios (pass --config)"));
    }
    let g = ctx.load_graph()?;
    let results: Vec<Result<(Classification, VerdictEntry, Vec<usize>)>> = ctx.pool.install(|| {
        ctx.config
            .classify
            .par_iter()
            .enumerate()
            .map(|(k, c)| classify_one(ctx, &g, k, c))
            .collect()
    });
    let mut out = Report::new(ctx.meta("classify", Some(g.path.clone())));
    for (c, r) in ctx.config.classify.iter().zip(results) {
        let (mut class, entry, vertices) = r?;
        class.scenario = c.name.clone();
        summarize(ctx, &c.name, &class);
        ctx.write_trajectory(&c.name, &class.trajectory, g.ids(), &vertices)?;
        out.verdicts.push(entry);
        out.classification.push(class);
    }
    ctx.finish(&out)?;
    for v in &out.verdicts {
        require_solution(&v.name, v)?;
    }
    let failed = hypothesis_failures(&out.classification);
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Hypothesis(failed.join("; ")))
    }
}

pub fn demo_cmd(ctx: &Context) -> Result<()> {
    let graph = five_vertex_graph();
    let p = five_vertex_partition();
    let u0 = five_vertex_initial();
    let geo = Geometry::dirichlet(&graph, &p);
    let vertices = closure(geo);
    let es = dirichlet_eigensystem(&graph, &p)?;
    let scenarios = [("extinction", 0.1), ("establishment", 1.8)];
    let runs: Vec<Result<Classification>> = ctx.pool.install(|| {
        scenarios
            .par_iter()
            .map(|&(_, a)| Ok(classify_logistic_dirichlet(&graph, &p, a, 1.0, &u0, &RunControls::default())?))
            .collect()
    });
    ctx.say(format!("lambda1 = {}", num(es.eigenvalue(0))));
    let graph_file = ctx.out.write("demo.graph", &five_vertex_file())?;
    ctx.say(format!("wrote {}", graph_file.display()));
    let mut out = Report::new(ctx.meta("demo", Some("built-in five-vertex demo".into())));
    out.spectrum = Some(vec![SpectrumReport::new(&graph, &es, &vertices)]);
    let op = BoundaryOperator::for_geometry(geo, SpaceTimeData::Zero);
    for ((name, a), run) in scenarios.into_iter().zip(runs) {
        let mut class = run?;
        class.scenario = format!("demo_{name}");
        let f = Reaction::Logistic { a, b: 1.0 };
        let certificate = certify_parabolic(
            &class.trajectory,
            geo,
            &|x, _t, v| f.eval(x, v),
            op.as_ref(),
            Some(&u0),
            ctx.certificate_tolerance(),
        )?;
        let positivity = check_positivity(&class.trajectory, p.interior(), PositivityMode::StrictInterior, 0.0);
        summarize(ctx, &format!("a = {a}"), &class);
        ctx.write_trajectory(&class.scenario, &class.trajectory, graph.ids(), p.interior())?;
        out.verdicts.push(VerdictEntry {
            name: class.scenario.clone(),
            certificate,
            positivity: Some(positivity),
        });
        out.classification.push(class);
    }
    ctx.finish(&out)?;
    for v in &out.verdicts {
        require_solution(&v.name, v)?;
    }
    Ok(())
}

pub fn props_cmd(ctx: &Context) -> Result<()> {
    let seed = ctx.seed.or(ctx.config.seed).unwrap_or(0);
    let (max_principle, (ordering, chains)) = ctx.pool.install(|| {
        rayon::join(
            || max_principle_suite(seed, 200),
            || rayon::join(|| ordering_suite(seed, 100), || monotone_chain_suite(seed, 60)),
        )
    });
    let suites = vec![max_principle, ordering, chains];
    let mut failures = 0;
    for s in &suites {
        failures += s.failures;
        ctx.say(format!(
            "{}: {}/{} passed, worst violation {:e}",
            s.name,
            s.cases - s.failures,
            s.cases,
            s.worst
        ));
        for d in &s.details {
            ctx.say(format!("  {d}"));
        }
    }
    let mut out = Report::new(ctx.meta("props", None));
    out.meta.seed = Some(seed);
    out.suites = Some(suites);
    ctx.finish(&out)?;
    if failures == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{failures} property case(s) failed")))
    }
}
