//! Detection of steady states in sampled trajectories.

use crate::comparison::certify_elliptic;
use crate::error::Result;
use crate::graph::{Geometry, GraphFunction};
use crate::reaction::Reaction;
use crate::series::TimeSeries;

/// Terminal state of `series` and the earliest time from which it was
/// steady, or `None`.
///
/// A window of `window` consecutive samples ending at index k is steady when
/// every state in it is within `tol` (sup norm over the active set) of the
/// state at k and the elliptic residual −Δu − f(u) of the state at k is at
/// most 10·tol. The trailing window must be steady; the reported time is the
/// end of the first steady window.
pub fn steady_state_detect(
    series: &TimeSeries,
    geometry: Geometry<'_>,
    f: &Reaction,
    window: usize,
    tol: f64,
) -> Result<Option<(GraphFunction, f64)>> {
    let window = window.max(1);
    if series.len() < window {
        return Ok(None);
    }
    let active = geometry.active();
    let zeros = vec![0.0; series.vertex_count()];
    let residual = |u: &GraphFunction| -> Result<f64> {
        let cert = certify_elliptic(u, geometry, None, &zeros, &|x, v| f.eval(x, v), None, Some(0.0))?;
        Ok(cert.min_residual.abs().max(cert.max_residual.abs()))
    };
    let steady_at = |k: usize| -> Result<bool> {
        let end = series.state(k);
        let flat = (k + 1 - window..=k).all(|j| {
            let s = series.state(j);
            active.iter().all(|&x| (s[x] - end[x]).abs() <= tol)
        });
        Ok(flat && residual(end)? <= 10.0 * tol)
    };
    let last = series.len() - 1;
    if !steady_at(last)? {
        return Ok(None);
    }
    let mut first = last;
    for k in window - 1..last {
        if steady_at(k)? {
            first = k;
            break;
        }
    }
    Ok(Some((series.last().clone(), series.times()[first])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::five_vertex_graph;
    use crate::series::uniform_grid;

    #[test]
    fn constant_series_is_detected_at_first_window() {
        let g = five_vertex_graph();
        let s = TimeSeries::constant(uniform_grid(1.0, 10), GraphFunction::constant(5, 0.7)).unwrap();
        let (state, t) = steady_state_detect(&s, Geometry::Whole(&g), &Reaction::Zero, 4, 1e-12)
            .unwrap()
            .unwrap();
        assert_eq!(state, GraphFunction::constant(5, 0.7));
        assert!((t - 0.3).abs() < 1e-15);
    }

    #[test]
    fn oscillation_is_not_steady() {
        let g = five_vertex_graph();
        let grid = uniform_grid(10.0, 100);
        let states = grid
            .iter()
            .map(|t| GraphFunction::constant(5, (3.0 * t).sin()))
            .collect();
        let s = TimeSeries::new(grid, states).unwrap();
        assert!(steady_state_detect(&s, Geometry::Whole(&g), &Reaction::Zero, 10, 1e-6)
            .unwrap()
            .is_none());
    }
}
