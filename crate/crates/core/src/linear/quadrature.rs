//! Exponentially weighted product quadrature.
//!
//! The forcing is replaced by its piecewise-quadratic interpolant on pairs of
//! panels and integrated exactly against e^{−rσ}, so the rule is exact for
//! forcing of degree ≤ 2 between nodes for every rate r.

use crate::error::{Error, Result};

/// Moments m_k = ∫_0^H e^{−rσ} σ^k dσ for k = 0, 1, 2.
pub fn exp_moments(r: f64, h: f64) -> [f64; 3] {
    let x = r * h;
    if x.abs() < 1.0 {
        // m_k = H^{k+1} Σ_i (−x)^i / (i! (k+i+1)); converges fast for |x| < 1.
        let mut out = [0.0; 3];
        for (k, m) in out.iter_mut().enumerate() {
            let mut term = 1.0;
            let mut sum = 0.0;
            for i in 0..40 {
                let add = term / (k + i + 1) as f64;
                sum += add;
                if add.abs() < 1e-18 * sum.abs() {
                    break;
                }
                term *= -x / (i + 1) as f64;
            }
            *m = sum * h.powi(k as i32 + 1);
        }
        return out;
    }
    let e = (-x).exp();
    [
        (1.0 - e) / r,
        (1.0 - e * (1.0 + x)) / (r * r),
        (2.0 - e * (2.0 + 2.0 * x + x * x)) / (r * r * r),
    ]
}

/// ∫_0^{2h} e^{−rσ} q(σ) dσ for the quadratic q through (0, f0), (h, f1), (2h, f2).
pub fn weighted_simpson(f0: f64, f1: f64, f2: f64, h: f64, r: f64) -> f64 {
    let [m0, m1, m2] = exp_moments(r, 2.0 * h);
    let h2 = h * h;
    let w0 = (m2 - 3.0 * h * m1 + 2.0 * h2 * m0) / (2.0 * h2);
    let w1 = -(m2 - 2.0 * h * m1) / h2;
    let w2 = (m2 - h * m1) / (2.0 * h2);
    w0 * f0 + w1 * f1 + w2 * f2
}

/// ∫_0^h e^{−rσ} q(σ) dσ for the linear q through (0, f0), (h, f1).
pub fn weighted_trapezoid(f0: f64, f1: f64, h: f64, r: f64) -> f64 {
    let [m0, m1, _] = exp_moments(r, h);
    f0 * m0 + (f1 - f0) * m1 / h
}

/// ∫_0^{nh} e^{−rσ} q(σ) dσ from equally spaced samples `f[i] = q(i h)`.
///
/// Panels are paired into quadratic pieces; an odd leftover panel uses the
/// linear rule.
pub fn weighted_composite(f: &[f64], h: f64, r: f64) -> f64 {
    let panels = f.len().saturating_sub(1);
    let mut total = 0.0;
    let mut decay = 1.0;
    let step = (-2.0 * r * h).exp();
    let mut i = 0;
    while i + 2 <= panels {
        total += decay * weighted_simpson(f[i], f[i + 1], f[i + 2], h, r);
        decay *= step;
        i += 2;
    }
    if i < panels {
        total += decay * weighted_trapezoid(f[i], f[i + 1], h, r);
    }
    total
}

/// ∫_0^t e^{r s} h(s) ds from samples of h on a uniform grid over [0, t].
pub fn forcing_mode_integral(samples: &[f64], rate: f64, t: f64) -> Result<f64> {
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("forcing samples"));
    }
    if samples.len() < 2 {
        return Err(Error::GridTooCoarse {
            needed: 2,
            got: samples.len(),
        });
    }
    let panels = samples.len() - 1;
    let h = t / panels as f64;
    // For r > 0 substitute σ = t − s, giving e^{rt} ∫_0^t e^{−rσ} h(t − σ) dσ,
    // so the weights inside the sum stay below one.
    if rate > 0.0 {
        let reversed: Vec<f64> = samples.iter().rev().copied().collect();
        Ok((rate * t).exp() * weighted_composite(&reversed, h, rate))
    } else {
        Ok(weighted_composite(samples, h, -rate))
    }
}
