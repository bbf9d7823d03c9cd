//! Shared fixtures and the explicit-Euler oracle for the integration tests.
#![allow(dead_code)]

use graphpde::graph::random::{random_connected_graph, random_domain};
use graphpde::graph::{DomainPartition, Geometry, GraphFunction, Role, WeightedGraph};
use graphpde::linear::LinearParabolicProblem;
use graphpde::series::SpaceTimeData;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Dirichlet,
    Neumann,
    Cauchy,
}

/// Forcing knots sit at multiples of this spacing on [0, 1].
pub const KNOT_SPACING: f64 = 0.25;
const KNOTS: usize = 5;

/// A random linear problem u_t − Δu + c u = F with affine-in-time boundary
/// data, held in plain arrays so the oracle does not touch library solvers.
#[derive(Debug, Clone)]
pub struct RandomLinear {
    pub kind: Kind,
    pub graph: WeightedGraph,
    pub partition: Option<DomainPartition>,
    pub shift: f64,
    /// knots[k][x] = F(x, k·KNOT_SPACING); linear in between, constant after 1.
    pub knots: Vec<Vec<f64>>,
    /// g(z, t) = g0[z] + g1[z]·t.
    pub g0: Vec<f64>,
    pub g1: Vec<f64>,
    pub initial: Vec<f64>,
}

pub fn forcing_at(knots: &[Vec<f64>], x: usize, t: f64) -> f64 {
    let s = (t / KNOT_SPACING).clamp(0.0, (KNOTS - 1) as f64);
    let k = (s.floor() as usize).min(KNOTS - 2);
    let w = s - k as f64;
    (1.0 - w) * knots[k][x] + w * knots[k + 1][x]
}

impl RandomLinear {
    pub fn generate(seed: u64, kind: Kind) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(4..9);
        let (graph, partition) = match kind {
            Kind::Cauchy => (random_connected_graph(&mut rng, n, 0.3), None),
            _ => {
                let interior = rng.gen_range(1..n - 1);
                let (g, p) = random_domain(&mut rng, n, interior, 0.3);
                (g, Some(p))
            }
        };
        let n = graph.len();
        let shift = rng.gen_range(0.0..1.0);
        let knots = (0..KNOTS)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let g0 = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g1 = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let initial = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self {
            kind,
            graph,
            partition,
            shift,
            knots,
            g0,
            g1,
            initial,
        }
    }

    pub fn geometry(&self) -> Geometry<'_> {
        match (self.kind, &self.partition) {
            (Kind::Dirichlet, Some(p)) => Geometry::dirichlet(&self.graph, p),
            (Kind::Neumann, Some(p)) => Geometry::neumann(&self.graph, p),
            _ => Geometry::Whole(&self.graph),
        }
    }

    pub fn problem(&self) -> LinearParabolicProblem<'_> {
        let knots = self.knots.clone();
        let (g0, g1) = (self.g0.clone(), self.g1.clone());
        LinearParabolicProblem {
            geometry: self.geometry(),
            shift: self.shift,
            forcing: SpaceTimeData::function(move |x, t| forcing_at(&knots, x, t)),
            boundary: if self.kind == Kind::Cauchy {
                SpaceTimeData::Zero
            } else {
                SpaceTimeData::function(move |z, t| g0[z] + g1[z] * t)
            },
            initial: GraphFunction::new(self.initial.clone()),
        }
    }

    fn role(&self, x: usize) -> Role {
        self.partition.as_ref().map_or(Role::Interior, |p| p.role(x))
    }

    /// Boundary values from interior values: Dirichlet data, or the Neumann
    /// flux equation μ(z) g = Σ_{y∈Ω} ω (u(z) − u(y)) solved for u(z).
    fn fill_boundary(&self, u: &mut [f64], t: f64) {
        let g = &self.graph;
        for z in 0..g.len() {
            if self.role(z) != Role::Boundary {
                continue;
            }
            let data = self.g0[z] + self.g1[z] * t;
            match self.kind {
                Kind::Dirichlet => u[z] = data,
                Kind::Neumann => {
                    let mut num = g.measure(z) * data;
                    let mut den = 0.0;
                    for y in 0..g.len() {
                        if y != z && self.role(y) == Role::Interior {
                            let w = g.weight(z, y);
                            num += w * u[y];
                            den += w;
                        }
                    }
                    u[z] = num / den;
                }
                Kind::Cauchy => {}
            }
        }
    }

    /// Explicit Euler from t = 0 to `horizon` with step `dt`, using the
    /// dense weight matrix directly.
    pub fn euler(&self, dt: f64, horizon: f64) -> Vec<f64> {
        let g = &self.graph;
        let n = g.len();
        let w: Vec<f64> = (0..n * n).map(|k| g.weight(k / n, k % n)).collect();
        let included: Vec<bool> = (0..n).map(|x| self.role(x) != Role::Plain).collect();
        let interior: Vec<usize> = (0..n).filter(|&x| self.role(x) == Role::Interior).collect();
        let mut u = self.initial.clone();
        self.fill_boundary(&mut u, 0.0);
        let steps = (horizon / dt).round() as usize;
        let mut next = u.clone();
        for k in 0..steps {
            let t = k as f64 * dt;
            for &x in &interior {
                let mut lap = 0.0;
                for y in 0..n {
                    if included[y] {
                        lap += w[x * n + y] * (u[y] - u[x]);
                    }
                }
                lap /= g.measure(x);
                next[x] = u[x] + dt * (lap - self.shift * u[x] + forcing_at(&self.knots, x, t));
            }
            std::mem::swap(&mut u, &mut next);
            self.fill_boundary(&mut u, (k + 1) as f64 * dt);
            next.copy_from_slice(&u);
        }
        u
    }
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Vertices carrying a solution value: Ω ∪ ∂Ω, or everything for Cauchy problems.
pub fn closure(p: &RandomLinear) -> Vec<usize> {
    (0..p.graph.len()).filter(|&x| p.role(x) != Role::Plain).collect()
}
