//! Geometric-rate fits for sequences of partial values.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    /// Fitted ratio between successive differences.
    pub rate: f64,
    /// Extrapolated size of everything after the last partial value.
    pub bound: f64,
    /// False when the differences do not decay geometrically.
    pub geometric: bool,
}

/// Fits `|s_{n+1} - s_n| ~ C r^n` by least squares on the logarithms.
///
/// Zero differences are treated as converged; a sequence that has stopped
/// moving gets rate 0 and bound 0.
pub fn tail_estimate(values: &[f64]) -> Result<TailEstimate> {
    if values.len() < 4 {
        return Err(Error::input("tail_estimate needs at least 4 partial values"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("tail_estimate received a non-finite value"));
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    differences_estimate(&diffs)
}

/// Same fit, starting from precomputed difference magnitudes (at least 3).
pub fn differences_estimate(diffs: &[f64]) -> Result<TailEstimate> {
    if diffs.len() < 3 {
        return Err(Error::input("need at least 3 differences"));
    }
    let scale = diffs.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(TailEstimate { rate: 0.0, bound: 0.0, geometric: true });
    }
    let floor = scale * 1e-300_f64.max(f64::EPSILON * 1e-3);
    let pts: Vec<(f64, f64)> = diffs
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > floor)
        .map(|(i, d)| (i as f64, d.ln()))
        .collect();
    let last = *diffs.last().unwrap();
    if pts.len() < 2 {
        // all but one difference vanished
        return Ok(TailEstimate { rate: 0.0, bound: last, geometric: true });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rate = slope.exp();
    let resid = pts
        .iter()
        .map(|p| (p.1 - (my + slope * (p.0 - mx))).abs())
        .fold(0.0, f64::max);
    // one decade of scatter around the fitted line is still called geometric
    let geometric = rate < 1.0 && resid < std::f64::consts::LN_10;
    let bound = if rate < 1.0 { last * rate / (1.0 - rate) } else { f64::INFINITY };
    Ok(TailEstimate { rate, bound, geometric })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::input("loglog_slope needs two equal-length series of length >= 2"));
    }
    if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::input("loglog_slope needs positive finite data"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
