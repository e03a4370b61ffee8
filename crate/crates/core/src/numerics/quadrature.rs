//! Trapezoidal rule on circles.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::sum::pairwise_sum;
use crate::error::{Error, Result};

/// Nodes `center + radius * e^{i phi_j}` with `phi_j = 2 pi j / m`.
pub fn circle_nodes(center: Complex64, radius: f64, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| center + Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64))
        .collect()
}

/// `(1/2 pi i) \oint f(z) dz` over the positively oriented circle, approximated by
/// `(radius / m) * sum_j f(z_j) e^{i phi_j}`.
///
/// `f` receives the node index together with the node so callers can supply
/// angle-parameterized branch data.
pub fn circle_quadrature(
    center: Complex64,
    radius: f64,
    m: usize,
    mut f: impl FnMut(usize, Complex64) -> Complex64,
) -> Result<Complex64> {
    if m == 0 || !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::input("quadrature needs m >= 1 and a positive finite radius"));
    }
    if !(center.re.is_finite() && center.im.is_finite()) {
        return Err(Error::input("quadrature center must be finite"));
    }
    let mut terms = Vec::with_capacity(m);
    for j in 0..m {
        let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
        let v = f(j, center + e * radius);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::numerical(format!("non-finite integrand at quadrature node {j}")));
        }
        terms.push(v * e);
    }
    Ok(pairwise_sum(&terms) * (radius / m as f64))
}

/// Runs the rule at `m` and `2m` points and returns the finer value with the
/// difference between them.
pub fn circle_quadrature_refined(
    center: Complex64,
    radius: f64,
    m: usize,
    mut f: impl FnMut(usize, usize, Complex64) -> Complex64,
) -> Result<(Complex64, f64)> {
    let coarse = circle_quadrature(center, radius, m, |j, z| f(m, j, z))?;
    let fine = circle_quadrature(center, radius, 2 * m, |j, z| f(2 * m, j, z))?;
    Ok((fine, (fine - coarse).norm()))
}

/// Like `circle_quadrature_refined` but fails when the two rules disagree by more than `tol`.
pub fn circle_quadrature_checked(
    center: Complex64,
    radius: f64,
    m: usize,
    tol: f64,
    f: impl FnMut(usize, usize, Complex64) -> Complex64,
) -> Result<Complex64> {
    let (v, diff) = circle_quadrature_refined(center, radius, m, f)?;
    if diff > tol * v.norm().max(1.0) {
        return Err(Error::numerical(format!(
            "quadrature refinement disagrees by {diff:.3e} (m = {m})"
        )));
    }
    Ok(v)
}

/// Continuous argument along a closed sequence of samples: each entry's phase is
/// moved by a multiple of 2 pi to lie within pi of its predecessor.
/// Returns the unwrapped phases, starting from the principal argument of the first sample.
pub fn unwrap_phase(values: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<f64> = None;
    for v in values {
        let a = v.arg();
        let next = match prev {
            None => a,
            Some(p) => a + 2.0 * PI * ((p - a) / (2.0 * PI)).round(),
        };
        out.push(next);
        prev = Some(next);
    }
    out
}

/// Net winding number of a closed sampled curve around the origin.
pub fn winding_number(values: &[Complex64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut closed = values.to_vec();
    closed.push(values[0]);
    let ph = unwrap_phase(&closed);
    (ph[ph.len() - 1] - ph[0]) / (2.0 * PI)
}
