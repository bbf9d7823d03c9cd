//! Classical Runge–Kutta integration of scalar autonomous ODEs.

use crate::error::{Error, Result};

/// Scalar solution sampled at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ScalarTrajectory {
    pub fn last(&self) -> f64 {
        *self.values.last().expect("trajectory is never empty")
    }

    /// Linear interpolation; constant beyond the ends.
    pub fn value_at(&self, t: f64) -> f64 {
        let times = &self.times;
        if t <= times[0] {
            return self.values[0];
        }
        let last = times.len() - 1;
        if t >= times[last] {
            return self.values[last];
        }
        let k = times.partition_point(|&s| s <= t) - 1;
        let w = (t - times[k]) / (times[k + 1] - times[k]);
        (1.0 - w) * self.values[k] + w * self.values[k + 1]
    }
}

/// z' = f(z), z(0) = z0 on [0, T] with fourth-order Runge–Kutta steps of
/// size `dt` (the last step is shortened to land on T).
pub fn scalar_ode_bound(f: &dyn Fn(f64) -> f64, z0: f64, horizon: f64, dt: f64) -> Result<ScalarTrajectory> {
    if !(dt > 0.0 && horizon >= 0.0 && z0.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0, T ≥ 0 and finite z0, got dt = {dt}, T = {horizon}, z0 = {z0}"
        )));
    }
    let steps = ((horizon / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(z0);
    let mut z = z0;
    for k in 1..=steps {
        let t0 = (k - 1) as f64 * dt;
        let t1 = if k == steps { horizon } else { k as f64 * dt };
        let h = t1 - t0;
        let k1 = f(z);
        let k2 = f(z + 0.5 * h * k1);
        let k3 = f(z + 0.5 * h * k2);
        let k4 = f(z + h * k3);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !z.is_finite() || z.abs() > 1e150 {
            return Err(Error::Divergence { time: t1 });
        }
        times.push(t1);
        values.push(z);
    }
    Ok(ScalarTrajectory { times, values })
}
