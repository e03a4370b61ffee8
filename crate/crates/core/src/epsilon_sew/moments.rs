use std::f64::consts::PI;

use num_complex::Complex64;

use super::{EpsilonModuli, Xi};
use crate::error::{Error, Result};
use crate::numerics::{circle_nodes, determinant, lu_solve, neumann_solve, ComplexMatrix, NumericConfig};
use crate::specialfn::{eisenstein_all, p1_series, p_k_all, TorusModulus, TwistPair};

/// Shortest nonzero vector of the lattice `2 pi i (Z tau + Z)`.
pub fn min_lattice_distance(tau: &TorusModulus) -> f64 {
    let t = tau.tau();
    // tau -> tau + n leaves the lattice unchanged
    let tr = Complex64::new(t.re - t.re.round(), t.im);
    let mmax = (1.0 / tr.im).ceil() as i64 + 1;
    let mut best = f64::INFINITY;
    for m in -mmax..=mmax {
        let c = (-(m as f64) * tr.re).round() as i64;
        for n in (c - 2)..=(c + 2) {
            if m == 0 && n == 0 {
                continue;
            }
            best = best.min((tr * m as f64 + n as f64).norm());
        }
    }
    2.0 * PI * best
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Laurent coefficients `C(k,l) = (-1)^l binom(k+l-2, k-1) E_{k+l-1}` of `P_1(x - y) - 1/(x - y)`.
pub fn c_matrix(tw: &TwistPair, order: usize, tau: &TorusModulus, cfg: &NumericConfig) -> Result<ComplexMatrix> {
    if order == 0 {
        return Err(Error::input("truncation order must be at least 1"));
    }
    let e = eisenstein_all(tw, 2 * order - 1, tau, cfg)?;
    Ok(ComplexMatrix::from_fn(order, order, |i, j| {
        let (k, l) = (i + 1, j + 1);
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        e[k + l - 2] * (sign * binomial(k + l - 2, k - 1))
    }))
}

/// Powers `s^0, s^1, ..., s^{n}` of the recorded `sqrt(epsilon)`.
fn sqrt_eps_powers(moduli: &EpsilonModuli, n: usize) -> Vec<Complex64> {
    let s = moduli.sqrt_epsilon();
    let mut out = Vec::with_capacity(n + 1);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        out.push(p);
        p *= s;
    }
    out
}

/// `F(k,l) = epsilon^{(k+l-1)/2} C(k,l)` on torus `which`.
pub fn f_matrix(
    tw: &TwistPair,
    order: usize,
    which: usize,
    moduli: &EpsilonModuli,
    cfg: &NumericConfig,
) -> Result<ComplexMatrix> {
    let c = c_matrix(tw, order, moduli.tau(which), cfg)?;
    let pw = sqrt_eps_powers(moduli, 2 * order);
    Ok(ComplexMatrix::from_fn(order, order, |i, j| c[(i, j)] * pw[i + j + 1]))
}

/// `F(k,l)` from the defining double contour integral of the torus kernel, with
/// `x` on the circle of radius `r_outer` and `y` on the concentric circle `r_inner < r_outer`.
/// The pole at `x = y` then contributes nothing to any moment with `k, l >= 1`.
pub fn f_matrix_quadrature(
    tw: &TwistPair,
    order: usize,
    which: usize,
    moduli: &EpsilonModuli,
    r_outer: f64,
    r_inner: f64,
    m: usize,
    cfg: &NumericConfig,
) -> Result<ComplexMatrix> {
    if !(r_inner > 0.0 && r_inner < r_outer) {
        return Err(Error::input("need 0 < r_inner < r_outer"));
    }
    if r_outer + r_inner >= min_lattice_distance(moduli.tau(which)) {
        return Err(Error::input("contours reach a lattice translate of the pole"));
    }
    let tau = moduli.tau(which);
    let xs = circle_nodes(Complex64::new(0.0, 0.0), r_outer, m);
    let ys = circle_nodes(Complex64::new(0.0, 0.0), r_inner, m);
    let mut kern = ComplexMatrix::zeros(m, m);
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            kern[(i, j)] = p1_series(tw, x - y, tau, cfg)?;
        }
    }
    // weights (r/m) e^{i phi} z^{-k} = z^{1-k} / m
    let a = ComplexMatrix::from_fn(order, m, |k, i| xs[i].powi(-(k as i32)) / m as f64);
    let b = ComplexMatrix::from_fn(m, order, |j, l| ys[j].powi(-(l as i32)) / m as f64);
    let raw = a.matmul(&kern)?.matmul(&b)?;
    let pw = sqrt_eps_powers(moduli, 2 * order);
    Ok(ComplexMatrix::from_fn(order, order, |i, j| raw[(i, j)] * pw[i + j + 1]))
}

/// `h(k, x) = epsilon^{k/2 - 1/4} P_k(x)` for `k = 1..=order`, with
/// `epsilon^{k/2-1/4} = (epsilon^{1/4})^{2k-1}`.
pub fn h_vector(
    tw: &TwistPair,
    order: usize,
    which: usize,
    x: Complex64,
    moduli: &EpsilonModuli,
    cfg: &NumericConfig,
) -> Result<Vec<Complex64>> {
    let p = p_k_all(tw, order, x, moduli.tau(which), cfg)?;
    let e4 = moduli.quarter_epsilon();
    let e2 = e4 * e4;
    let mut w = e4;
    Ok(p.into_iter()
        .map(|v| {
            let out = v * w;
            w *= e2;
            out
        })
        .collect())
}

/// `hbar[theta; phi](k, y) = -h[theta^{-1}; phi^{-1}](k, y)`.
pub fn hbar_vector(
    tw: &TwistPair,
    order: usize,
    which: usize,
    y: Complex64,
    moduli: &EpsilonModuli,
    cfg: &NumericConfig,
) -> Result<Vec<Complex64>> {
    Ok(h_vector(&tw.inverse(), order, which, y, moduli, cfg)?.into_iter().map(|v| -v).collect())
}

/// `Q = [[0, xi F_1], [-xi F_2, 0]]`.
pub fn build_q(f1: &ComplexMatrix, f2: &ComplexMatrix, xi: Xi) -> Result<ComplexMatrix> {
    if f1.rows() != f2.rows() || !f1.is_square() || !f2.is_square() {
        return Err(Error::input("F_1 and F_2 must be square of equal order"));
    }
    let n = f1.rows();
    let z = ComplexMatrix::zeros(n, n);
    ComplexMatrix::from_blocks(&z, &f1.scale(xi.value()), &f2.scale(-xi.value()), &z)
}

/// Gelfand-type estimate `||A^{16}||^{1/16}` (infinity norm) of the spectral radius.
pub fn spectral_radius_estimate(a: &ComplexMatrix) -> Result<f64> {
    let mut p = a.clone();
    let mut scale_log = 0.0;
    for _ in 0..4 {
        // renormalize each squaring so large norms do not overflow
        let nrm = p.norm_inf();
        if nrm == 0.0 {
            return Ok(0.0);
        }
        p = p.scale(Complex64::new(1.0 / nrm, 0.0));
        scale_log = 2.0 * (scale_log + nrm.ln());
        p = p.matmul(&p)?;
    }
    let nrm = p.norm_inf();
    if nrm == 0.0 {
        return Ok(0.0);
    }
    Ok(((scale_log + nrm.ln()) / 16.0).exp())
}

/// `X = (I - Q)^{-1} F` by dense factorization, with `F = diag(F_1, F_2)`.
pub fn solve_x(q: &ComplexMatrix, f: &ComplexMatrix, cfg: &NumericConfig) -> Result<ComplexMatrix> {
    let rho = spectral_radius_estimate(q)?;
    if !(rho < 1.0) {
        return Err(Error::domain(format!("Q has spectral radius estimate {rho:.4} >= 1")));
    }
    lu_solve(&q.identity_minus()?, f, cfg)
}

/// Partial sum `sum_{n <= terms} Q^n F` (cross-check mode).
pub fn solve_x_neumann(q: &ComplexMatrix, f: &ComplexMatrix, terms: usize) -> Result<ComplexMatrix> {
    Ok(neumann_solve(q, f, terms)?.0)
}

/// `det(I - F_1 F_2)` over the `N`-block.
pub fn det_i_minus_q(f1: &ComplexMatrix, f2: &ComplexMatrix) -> Result<Complex64> {
    determinant(&f1.matmul(f2)?.identity_minus()?)
}

/// `det(I - Q)` over the full `2N` block matrix.
pub fn det_i_minus_q_full(q: &ComplexMatrix) -> Result<Complex64> {
    determinant(&q.identity_minus()?)
}

/// `-sum_{n=1}^{terms} tr((F_1 F_2)^n) / n`, the logarithm of `det(I - F_1 F_2)` as a series.
pub fn log_det_series(f1: &ComplexMatrix, f2: &ComplexMatrix, terms: usize) -> Result<Complex64> {
    let a = f1.matmul(f2)?;
    let mut p = a.clone();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=terms {
        acc -= p.trace() / n as f64;
        p = p.matmul(&a)?;
    }
    Ok(acc)
}

/// Determinant computed both ways, for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetReport {
    pub det_block: Complex64,
    pub det_full: Complex64,
    pub det_series: Complex64,
}

impl DetReport {
    pub fn compute(f1: &ComplexMatrix, f2: &ComplexMatrix, xi: Xi, series_terms: usize) -> Result<Self> {
        Ok(Self {
            det_block: det_i_minus_q(f1, f2)?,
            det_full: det_i_minus_q_full(&build_q(f1, f2, xi)?)?,
            det_series: log_det_series(f1, f2, series_terms)?.exp(),
        })
    }
}
