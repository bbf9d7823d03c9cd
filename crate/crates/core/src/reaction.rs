//! Reaction terms f(x, u) and their Lipschitz bounds.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// Samples used when no closed-form derivative bound exists.
pub const LIPSCHITZ_SAMPLES: usize = 1001;
/// Safety factor applied to every derivative bound.
pub const LIPSCHITZ_SAFETY: f64 = 1.1;

#[derive(Clone)]
pub enum Reaction {
    Zero,
    /// u (a − b u).
    Logistic { a: f64, b: f64 },
    /// u (u − α)(1 − u).
    AllenCahn { alpha: f64 },
    /// Σ c_k u^k with coefficients in increasing degree.
    Polynomial(Vec<f64>),
    /// Vertex-dependent reaction with its u-derivative.
    Custom {
        name: String,
        f: ScalarFn,
        df: ScalarFn,
    },
}

impl fmt::Debug for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reaction::Zero => write!(f, "Zero"),
            Reaction::Logistic { a, b } => write!(f, "Logistic {{ a: {a}, b: {b} }}"),
            Reaction::AllenCahn { alpha } => write!(f, "AllenCahn {{ alpha: {alpha} }}"),
            Reaction::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            Reaction::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// Serializable description of a reaction, for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReactionSummary {
    Zero,
    Logistic { a: f64, b: f64 },
    AllenCahn { alpha: f64 },
    Polynomial { coefficients: Vec<f64> },
    Custom { name: String },
}

fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * u + ck)
}

fn derivative_coeffs(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect()
}

impl Reaction {
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Reaction::Custom {
            name: name.into(),
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    /// Checks parameter ranges: finite coefficients and 0 < α < 1.
    pub fn validate(&self) -> Result<()> {
        match self {
            Reaction::Logistic { a, b } if !(a.is_finite() && b.is_finite() && *b > 0.0) => Err(
                Error::InvalidParameter(format!("logistic needs finite a and b > 0, got a = {a}, b = {b}")),
            ),
            Reaction::AllenCahn { alpha } if !(*alpha > 0.0 && *alpha < 1.0) => Err(Error::InvalidParameter(
                format!("Allen-Cahn root must lie in (0, 1), got {alpha}"),
            )),
            Reaction::Polynomial(c) if c.iter().any(|v| !v.is_finite()) => {
                Err(Error::InvalidParameter("polynomial coefficients must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Coefficients in increasing degree when f is a polynomial in u alone.
    pub fn polynomial(&self) -> Option<Vec<f64>> {
        match *self {
            Reaction::Zero => Some(Vec::new()),
            Reaction::Logistic { a, b } => Some(vec![0.0, a, -b]),
            Reaction::AllenCahn { alpha } => Some(vec![0.0, -alpha, 1.0 + alpha, -1.0]),
            Reaction::Polynomial(ref c) => Some(c.clone()),
            Reaction::Custom { .. } => None,
        }
    }

    pub fn eval(&self, x: usize, u: f64) -> f64 {
        match self {
            Reaction::Zero => 0.0,
            Reaction::Logistic { a, b } => u * (a - b * u),
            Reaction::AllenCahn { alpha } => u * (u - alpha) * (1.0 - u),
            Reaction::Polynomial(c) => horner(c, u),
            Reaction::Custom { f, .. } => f(x, u),
        }
    }

    /// ∂f/∂u at (x, u).
    pub fn derivative(&self, x: usize, u: f64) -> f64 {
        match self {
            Reaction::Custom { df, .. } => df(x, u),
            _ => horner(&derivative_coeffs(&self.polynomial().expect("not custom")), u),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Reaction::Zero => true,
            Reaction::Polynomial(c) => c.iter().all(|&v| v == 0.0),
            _ => false,
        }
    }

    pub fn summary(&self) -> ReactionSummary {
        match self {
            Reaction::Zero => ReactionSummary::Zero,
            Reaction::Logistic { a, b } => ReactionSummary::Logistic { a: *a, b: *b },
            Reaction::AllenCahn { alpha } => ReactionSummary::AllenCahn { alpha: *alpha },
            Reaction::Polynomial(c) => ReactionSummary::Polynomial {
                coefficients: c.clone(),
            },
            Reaction::Custom { name, .. } => ReactionSummary::Custom { name: name.clone() },
        }
    }

    /// Bound on |∂f/∂u| over [lo, hi] and all `vertices`, times 1.1.
    ///
    /// Polynomials use the exact maximum of |p'| (endpoints and the real roots
    /// of p''); other reactions take the maximum over 1001 samples per vertex.
    pub fn lipschitz_constant(&self, lo: f64, hi: f64, vertices: usize) -> Result<f64> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidParameter(format!("invalid range [{lo}, {hi}]")));
        }
        let bound = match self.polynomial() {
            Some(c) => polynomial_derivative_bound(&c, lo, hi),
            None => {
                let mut m = 0.0_f64;
                for x in 0..vertices.max(1) {
                    for i in 0..LIPSCHITZ_SAMPLES {
                        let u = lo + (hi - lo) * i as f64 / (LIPSCHITZ_SAMPLES - 1) as f64;
                        let d = self.derivative(x, u);
                        if !d.is_finite() {
                            return Err(Error::NonFinite("reaction derivative"));
                        }
                        m = m.max(d.abs());
                    }
                }
                m
            }
        };
        if !bound.is_finite() {
            return Err(Error::NonFinite("reaction derivative"));
        }
        Ok(LIPSCHITZ_SAFETY * bound)
    }
}

/// max |p'(u)| over [lo, hi] for p with coefficients `c`.
pub fn polynomial_derivative_bound(c: &[f64], lo: f64, hi: f64) -> f64 {
    let d1 = derivative_coeffs(c);
    let d2 = derivative_coeffs(&d1);
    let mut candidates = vec![lo, hi];
    candidates.extend(real_roots_in(&d2, lo, hi));
    candidates
        .into_iter()
        .map(|u| horner(&d1, u).abs())
        .fold(0.0, f64::max)
}

/// Real roots of a polynomial inside [lo, hi]: closed forms up to degree 2,
/// otherwise sign changes on a fine grid refined by bisection.
pub(crate) fn real_roots_in(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let inside = |u: &f64| *u >= lo && *u <= hi;
    match c.len() {
        0 | 1 => Vec::new(),
        2 => [-c[0] / c[1]].into_iter().filter(inside).collect(),
        3 => {
            let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
            if disc < 0.0 {
                return Vec::new();
            }
            let q = -0.5 * (c[1] + c[1].signum() * disc.sqrt());
            let mut roots = vec![q / c[2]];
            if q != 0.0 {
                roots.push(c[0] / q);
            }
            roots.into_iter().filter(inside).collect()
        }
        _ => {
            let n = 4000;
            let mut roots = Vec::new();
            let u_at = |i: usize| lo + (hi - lo) * i as f64 / n as f64;
            for i in 0..n {
                let (mut a, mut b) = (u_at(i), u_at(i + 1));
                let (fa, fb) = (horner(&c, a), horner(&c, b));
                if fa == 0.0 {
                    roots.push(a);
                    continue;
                }
                if fa * fb >= 0.0 {
                    continue;
                }
                for _ in 0..100 {
                    let m = 0.5 * (a + b);
                    if horner(&c, a) * horner(&c, m) <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            roots
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn logistic_bound() {
        let f = Reaction::Logistic { a: 1.8, b: 1.0 };
        let m = f.lipschitz_constant(0.0, 1.8, 5).unwrap();
        assert!((m - 1.98).abs() < 1e-14);
        assert_eq!(Reaction::Zero.lipschitz_constant(0.0, 1.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn allen_cahn_bound_from_critical_point() {
        // f' = −α + 2(1+α)u − 3u², vertex at u = (1+α)/3.
        let alpha = 0.3;
        let f = Reaction::AllenCahn { alpha };
        let m = f.lipschitz_constant(0.0, 1.0, 1).unwrap();
        let ends = [alpha.abs(), (-alpha + 2.0 * (1.0 + alpha) - 3.0_f64).abs()];
        let uc = (1.0 + alpha) / 3.0;
        let peak = -alpha + 2.0 * (1.0 + alpha) * uc - 3.0 * uc * uc;
        let exact = ends.into_iter().fold(peak.abs(), f64::max);
        assert!((m - 1.1 * exact).abs() < 1e-14);
        // The interior critical point matters on a range that excludes the ends' max.
        let inner = f.lipschitz_constant(0.3, 0.6, 1).unwrap();
        assert!((inner - 1.1 * peak.abs()).abs() < 1e-14);
    }

    #[test]
    fn evaluation_and_derivatives() {
        let f = Reaction::AllenCahn { alpha: 0.3 };
        assert_eq!(f.eval(0, 0.3), 0.0);
        assert_eq!(f.eval(0, 1.0), 0.0);
        assert!(f.eval(0, 0.1) < 0.0 && f.eval(0, 0.5) > 0.0);
        let p = Reaction::Polynomial(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(0, 2.0), 17.0);
        assert_eq!(p.derivative(0, 2.0), 14.0);
        assert!(Reaction::AllenCahn { alpha: 1.0 }.validate().is_err());
        assert!(Reaction::Logistic { a: 1.0, b: 0.0 }.validate().is_err());
    }

    #[test]
    fn custom_reaction_is_sampled() {
        let f = Reaction::custom("sine", |x, u| (u + x as f64).sin(), |x, u| (u + x as f64).cos());
        let m = f.lipschitz_constant(0.0, 0.1, 2).unwrap();
        assert!((m - 1.1).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn exact_bound_dominates_samples(
            c in prop::collection::vec(-3.0..3.0f64, 1..6),
            lo in -2.0..1.0f64, width in 0.01..3.0f64
        ) {
            let hi = lo + width;
            let bound = polynomial_derivative_bound(&c, lo, hi);
            let f = Reaction::Polynomial(c);
            let mut sampled = 0.0_f64;
            for i in 0..=2000 {
                let u = lo + width * i as f64 / 2000.0;
                sampled = sampled.max(f.derivative(0, u).abs());
            }
            prop_assert!(bound >= sampled - 1e-9 * (1.0 + sampled));
            prop_assert!(bound <= sampled * (1.0 + 1e-4) + 1e-9);
        }
    }
}
