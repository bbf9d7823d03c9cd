//! Vertex functions.

use std::ops::{Deref, DerefMut};

use serde::Serialize;

/// Real values on the vertices of a graph, in the graph's vertex order.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct GraphFunction(Vec<f64>);

impl GraphFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    /// Indicator of a single vertex.
    pub fn indicator(n: usize, x: usize) -> Self {
        let mut v = vec![0.0; n];
        v[x] = 1.0;
        Self(v)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self((0..n).map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max |u − v| over all entries.
    pub fn sup_distance(&self, other: &GraphFunction) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|v| v * factor).collect())
    }

    /// a·self + b·other.
    pub fn combine(&self, a: f64, other: &GraphFunction, b: f64) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(u, v)| a * u + b * v)
                .collect(),
        )
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for GraphFunction {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl Deref for GraphFunction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for GraphFunction {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// Drift coefficients b(x), one per vertex.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct DriftField(Vec<f64>);

impl DriftField {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// max |b(x)|, the norm used in the coercivity margin.
    pub fn max_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&v| v >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

impl Deref for DriftField {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}
