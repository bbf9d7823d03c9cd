//! TOML run configuration.
//!
//! ```toml
//! graph = "demo.graph"
//!
//! [scenario]
//! problem = "dirichlet"                        # dirichlet | neumann | cauchy
//! reaction = { kind = "logistic", a = 1.8, b = 1.0 }
//! initial = { x1 = 8.0, x2 = 1.0, x3 = 0.5 }   # or a single number
//! horizon = 20.0
//! dt = 1e-3
//! stride = 100
//!
//! [[classify]]
//! name = "establishment"
//! model = "logistic_dirichlet"
//! a = 1.8
//! initial = 0.5
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use graphpde::graph::{DriftField, GraphFunction, WeightedGraph};
use graphpde::reaction::Reaction;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Graph file, relative to the config file.
    pub graph: Option<PathBuf>,
    pub seed: Option<u64>,
    pub scenario: Option<ScenarioConfig>,
    #[serde(default)]
    pub classify: Vec<ClassifyConfig>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Dirichlet,
    Neumann,
    Cauchy,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReactionConfig {
    Zero,
    Logistic { a: f64, b: f64 },
    AllenCahn { alpha: f64 },
    /// Coefficients c₀, c₁, … of Σ cₖ uᵏ.
    Polynomial { coefficients: Vec<f64> },
}

impl Default for ReactionConfig {
    fn default() -> Self {
        ReactionConfig::Zero
    }
}

impl ReactionConfig {
    pub fn build(&self) -> Reaction {
        match self {
            ReactionConfig::Zero => Reaction::Zero,
            ReactionConfig::Logistic { a, b } => Reaction::Logistic { a: *a, b: *b },
            ReactionConfig::AllenCahn { alpha } => Reaction::AllenCahn { alpha: *alpha },
            ReactionConfig::Polynomial { coefficients } => Reaction::Polynomial(coefficients.clone()),
        }
    }
}

/// A number for every vertex, or values by vertex id (others are zero).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum VertexValues {
    Constant(f64),
    ById(BTreeMap<String, f64>),
}

impl Default for VertexValues {
    fn default() -> Self {
        VertexValues::Constant(0.0)
    }
}

impl VertexValues {
    pub fn resolve(&self, graph: &WeightedGraph, field: &str) -> Result<GraphFunction> {
        match self {
            VertexValues::Constant(v) => Ok(GraphFunction::constant(graph.len(), *v)),
            VertexValues::ById(map) => {
                let mut u = GraphFunction::zeros(graph.len());
                for (id, &v) in map {
                    let x = graph
                        .index_of(id)
                        .map_err(|_| CliError::config(field, format!("unknown vertex `{id}`")))?;
                    u[x] = v;
                }
                Ok(u)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            VertexValues::Constant(v) => *v == 0.0,
            VertexValues::ById(map) => map.values().all(|&v| v == 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketConfig {
    /// Defaults to zero.
    #[serde(default)]
    pub lower: VertexValues,
    pub upper: VertexValues,
}

fn default_horizon() -> f64 {
    1.0
}

fn default_dt() -> f64 {
    1e-3
}

fn default_stride() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub problem: ProblemKind,
    #[serde(default)]
    pub reaction: ReactionConfig,
    /// Dirichlet values or Neumann flux on ∂Ω, constant in time.
    #[serde(default)]
    pub boundary: VertexValues,
    #[serde(default)]
    pub initial: VertexValues,
    /// Linear problems only: source term, constant in time.
    #[serde(default)]
    pub forcing: VertexValues,
    /// Linear problems only: zeroth-order coefficient c in u_t − Δu + c u.
    #[serde(default)]
    pub shift: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    /// Cauchy steady problems only: nonnegative drift b.
    #[serde(default)]
    pub drift: VertexValues,
    /// Cauchy steady problems only: zeroth-order coefficient c ≥ 0.
    #[serde(default)]
    pub c: VertexValues,
    pub bracket: Option<BracketConfig>,
}

impl ScenarioConfig {
    pub fn drift(&self, graph: &WeightedGraph) -> Result<DriftField> {
        Ok(DriftField::new(self.drift.resolve(graph, "scenario.drift")?.into_inner()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    LogisticDirichlet,
    LogisticNeumann,
    Kpp,
    AllenCahn,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    /// Used for output file names: letters, digits, `_` and `-`.
    pub name: String,
    pub model: Model,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub alpha: Option<f64>,
    /// KPP and bistable models: overrides the default reaction.
    pub reaction: Option<ReactionConfig>,
    #[serde(default)]
    pub initial: VertexValues,
    pub horizon: Option<f64>,
    pub dt: Option<f64>,
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Residual certificate tolerance for emitted trajectories.
    pub certificate: Option<f64>,
    /// Monotone iteration increment tolerance.
    pub monotone: Option<f64>,
    pub max_iters: Option<usize>,
    /// Convergence tolerance of the classifiers.
    pub convergence: Option<f64>,
}

/// Reads a config file; the graph path is made relative to its directory.
pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut config: RunConfig =
        toml::from_str(&text).map_err(|e| CliError::config(path.display().to_string(), e.to_string()))?;
    if let Some(g) = &config.graph {
        if g.is_relative() {
            let base = path.parent().unwrap_or(Path::new(""));
            config.graph = Some(base.join(g));
        }
    }
    let mut names: Vec<&str> = Vec::new();
    for (k, c) in config.classify.iter().enumerate() {
        let ok = !c.name.is_empty() && c.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-');
        if !ok {
            return Err(CliError::config(
                format!("{}: classify[{k}].name", path.display()),
                format!("`{}` must be nonempty and use only letters, digits, `_` and `-`", c.name),
            ));
        }
        if names.contains(&c.name.as_str()) {
            return Err(CliError::config(
                format!("{}: classify[{k}].name", path.display()),
                format!("duplicate scenario name `{}`", c.name),
            ));
        }
        names.push(&c.name);
    }
    Ok(config)
}
