//! Sampled trajectories and space-time data.

use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::GraphFunction;

/// `steps + 1` equally spaced times from 0 to `horizon`.
pub fn uniform_grid(horizon: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|k| if k == steps { horizon } else { horizon * k as f64 / steps as f64 })
        .collect()
}

pub(crate) fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("empty time grid".into()));
    }
    if times[0] != 0.0 {
        return Err(Error::InvalidGrid(format!("grid starts at {} instead of 0", times[0])));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::InvalidGrid(format!("times {} and {} are not increasing", w[0], w[1])));
    }
    Ok(())
}

/// States u(·, t_n) on an increasing time grid starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    states: Vec<GraphFunction>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, states: Vec<GraphFunction>) -> Result<Self> {
        check_grid(&times)?;
        if states.len() != times.len() {
            return Err(Error::Dimension {
                expected: times.len(),
                got: states.len(),
            });
        }
        if let Some(s) = states.iter().find(|s| s.len() != states[0].len()) {
            return Err(Error::Dimension {
                expected: states[0].len(),
                got: s.len(),
            });
        }
        Ok(Self { times, states })
    }

    /// The same state at every grid time.
    pub fn constant(times: Vec<f64>, state: GraphFunction) -> Result<Self> {
        let states = vec![state; times.len()];
        Self::new(times, states)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[GraphFunction] {
        &self.states
    }

    pub fn state(&self, n: usize) -> &GraphFunction {
        &self.states[n]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.states[0].len()
    }

    pub fn last(&self) -> &GraphFunction {
        self.states.last().expect("series is never empty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("series is never empty")
    }

    /// Step size if the grid is uniform to relative accuracy 1e-9.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let dt = self.final_time() / (self.times.len() - 1) as f64;
        self.times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt)
            .then_some(dt)
    }

    /// max_x |u(x, t_n)| over `subset` for every n.
    pub fn sup_trail(&self, subset: &[usize]) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| subset.iter().fold(0.0_f64, |m, &x| m.max(s[x].abs())))
            .collect()
    }

    /// max over time and `subset` of |u − v|.
    pub fn sup_distance(&self, other: &TimeSeries, subset: &[usize]) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| subset.iter().fold(0.0, |m: f64, &x| m.max((a[x] - b[x]).abs())))
            .fold(0.0, f64::max))
    }

    /// Piecewise-linear interpolation in time; constant beyond the ends.
    pub fn value_at(&self, x: usize, t: f64) -> f64 {
        let times = &self.times;
        if t <= times[0] {
            return self.states[0][x];
        }
        let last = times.len() - 1;
        if t >= times[last] {
            return self.states[last][x];
        }
        let k = times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (times[k], times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        (1.0 - w) * self.states[k][x] + w * self.states[k + 1][x]
    }

    /// CSV with header `t,<ids>` and 17 significant digits per value.
    pub fn to_csv(&self, ids: &[String]) -> String {
        let mut out = String::from("t");
        for id in ids {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t:.16e}");
            for v in s.iter() {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`TimeSeries::to_csv`]; returns ids and series.
    pub fn from_csv(text: &str) -> Result<(Vec<String>, TimeSeries)> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty CSV".into(),
        })?;
        let mut cols = header.split(',');
        if cols.next() != Some("t") {
            return Err(Error::Parse {
                line: 1,
                message: "header must start with `t`".into(),
            });
        }
        let ids: Vec<String> = cols.map(str::to_string).collect();
        let mut times = Vec::new();
        let mut states = Vec::new();
        for (k, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> = line.split(',').map(str::parse).collect();
            let vals = vals.map_err(|e| Error::Parse {
                line: k + 1,
                message: format!("{e}"),
            })?;
            if vals.len() != ids.len() + 1 {
                return Err(Error::Parse {
                    line: k + 1,
                    message: format!("expected {} columns, got {}", ids.len() + 1, vals.len()),
                });
            }
            times.push(vals[0]);
            states.push(GraphFunction::new(vals[1..].to_vec()));
        }
        Ok((ids, TimeSeries::new(times, states)?))
    }
}

type DataFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// A function of (vertex, time): forcing terms and boundary data.
#[derive(Clone, Default)]
pub enum SpaceTimeData {
    #[default]
    Zero,
    /// Independent of time.
    Steady(GraphFunction),
    Function(DataFn),
    /// Piecewise-linear interpolation of a sampled series.
    Sampled(Arc<TimeSeries>),
}

impl SpaceTimeData {
    pub fn function(f: impl Fn(usize, f64) -> f64 + Send + Sync + 'static) -> Self {
        SpaceTimeData::Function(Arc::new(f))
    }

    pub fn sampled(series: TimeSeries) -> Self {
        SpaceTimeData::Sampled(Arc::new(series))
    }

    pub fn eval(&self, x: usize, t: f64) -> f64 {
        match self {
            SpaceTimeData::Zero => 0.0,
            SpaceTimeData::Steady(u) => u[x],
            SpaceTimeData::Function(f) => f(x, t),
            SpaceTimeData::Sampled(s) => s.value_at(x, t),
        }
    }

    /// Values at every vertex at time `t`.
    pub fn eval_all(&self, n: usize, t: f64) -> Vec<f64> {
        match self {
            SpaceTimeData::Zero => vec![0.0; n],
            SpaceTimeData::Steady(u) => u.values().to_vec(),
            _ => (0..n).map(|x| self.eval(x, t)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SpaceTimeData::Zero)
    }

    /// a·self + b·other, evaluated lazily.
    pub fn combine(&self, a: f64, other: &SpaceTimeData, b: f64) -> Self {
        let (p, q) = (self.clone(), other.clone());
        SpaceTimeData::function(move |x, t| a * p.eval(x, t) + b * q.eval(x, t))
    }
}

impl fmt::Debug for SpaceTimeData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTimeData::Zero => write!(f, "Zero"),
            SpaceTimeData::Steady(u) => f.debug_tuple("Steady").field(u).finish(),
            SpaceTimeData::Function(_) => write!(f, "Function(..)"),
            SpaceTimeData::Sampled(s) => write!(f, "Sampled({} samples)", s.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series() -> TimeSeries {
        TimeSeries::new(
            vec![0.0, 0.5, 1.0],
            vec![
                GraphFunction::new(vec![0.0, 1.0]),
                GraphFunction::new(vec![1.0, 1.0]),
                GraphFunction::new(vec![3.0, -1.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn grid_checks() {
        assert_eq!(uniform_grid(1.0, 4), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(TimeSeries::new(vec![0.1], vec![GraphFunction::zeros(1)]).is_err());
        assert!(TimeSeries::new(vec![0.0, 0.0], vec![GraphFunction::zeros(1); 2]).is_err());
        assert!(TimeSeries::new(vec![0.0, 1.0], vec![GraphFunction::zeros(1)]).is_err());
        assert_eq!(series().uniform_step(), Some(0.5));
    }

    #[test]
    fn interpolation() {
        let s = series();
        assert_eq!(s.value_at(0, 0.25), 0.5);
        assert_eq!(s.value_at(0, 0.75), 2.0);
        assert_eq!(s.value_at(1, 2.0), -1.0);
        assert_eq!(s.value_at(0, 0.5), 1.0);
        let d = SpaceTimeData::sampled(s);
        assert_eq!(d.eval(1, 0.75), 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let s = series();
        let ids = vec!["a".to_string(), "b".to_string()];
        let text = s.to_csv(&ids);
        assert!(text.starts_with("t,a,b\n0.0000000000000000e0,"));
        let (back_ids, back) = TimeSeries::from_csv(&text).unwrap();
        assert_eq!(back_ids, ids);
        assert_eq!(back, s);
    }

    #[test]
    fn trails_and_distances() {
        let s = series();
        assert_eq!(s.sup_trail(&[0, 1]), vec![1.0, 1.0, 3.0]);
        assert_eq!(s.sup_distance(&s, &[0, 1]).unwrap(), 0.0);
        let other = TimeSeries::constant(vec![0.0, 1.0], GraphFunction::zeros(2)).unwrap();
        assert!(matches!(s.sup_distance(&other, &[0]), Err(Error::GridMismatch)));
    }
}
