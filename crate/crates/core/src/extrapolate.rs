//! Limits at `t = 0` from values on a geometric grid, by three-point Neville
//! extrapolation over sliding windows.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Extrapolants whose successive difference is above this do not count as
/// a settled limit.
pub const CAUCHY_TOLERANCE: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub value: Complex64,
    /// Difference between the reported extrapolant and its predecessor.
    pub residual: f64,
}

impl LimitEstimate {
    pub fn converged(&self) -> bool {
        self.residual <= CAUCHY_TOLERANCE
    }
}

/// Value at 0 of the quadratic through three points.
fn neville_at_zero(t: [f64; 3], y: [Complex64; 3]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if i != j {
                w *= -t[j] / (t[i] - t[j]);
            }
        }
        acc += y[i] * w;
    }
    acc
}

/// Extrapolates `values[k] ~ f(ts[k])` to `t = 0`.
///
/// Each window of three consecutive nodes gives one extrapolant; the
/// reported value is the extrapolant that differs least from its
/// predecessor. Truncation error shrinks along the grid while rounding
/// error grows, so the smallest successive difference marks the best
/// trade-off and doubles as the error estimate.
pub fn richardson_limit(ts: &[f64], values: &[Complex64]) -> Option<LimitEstimate> {
    assert_eq!(ts.len(), values.len());
    if ts.len() < 4 {
        return None;
    }
    let extrapolants: Vec<Complex64> = (2..ts.len())
        .map(|k| neville_at_zero([ts[k - 2], ts[k - 1], ts[k]], [values[k - 2], values[k - 1], values[k]]))
        .collect();
    let mut best: Option<LimitEstimate> = None;
    for k in 1..extrapolants.len() {
        let residual = (extrapolants[k] - extrapolants[k - 1]).norm();
        if !residual.is_finite() {
            continue;
        }
        if best.is_none_or(|b| residual < b.residual) {
            best = Some(LimitEstimate { value: extrapolants[k], residual });
        }
    }
    best
}

/// Like [`richardson_limit`] but fails with `DivergentLimit` when the
/// extrapolants do not settle.
pub fn settled_limit(quantity: &str, ts: &[f64], values: &[Complex64]) -> Result<LimitEstimate> {
    match richardson_limit(ts, values) {
        Some(est) if est.converged() => Ok(est),
        Some(est) => Err(Error::DivergentLimit { quantity: quantity.to_string(), residual: est.residual }),
        None => Err(Error::DivergentLimit { quantity: quantity.to_string(), residual: f64::INFINITY }),
    }
}
