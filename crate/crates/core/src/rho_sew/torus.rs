//! Genus two from a torus with punctures at `0` and `w` joined through `z_1 z_2 = rho`.
//!
//! The fractional power `U(x, y)^kappa` in the twisted torus kernel factors as
//! `E(x) / E(y)` with `E(x) = exp(kappa V(x))`, where `V(x) = log F(x) - log x`
//! and `F(y) = theta_1(y - w) theta_1'(0) y / (theta_1(y) theta_1(-w))` equals 1 at the
//! origin. Evaluation points take `log F` continued along the segment from the origin
//! and the principal `log x`. On contours the logarithms are taken locally: near the
//! origin as above, near `w` as `V = H + log(y - w) + log G(y)` with
//! `G(y) = theta_1(y - w) theta_1(w) / ((y - w) theta_1'(0) theta_1(y))` and
//! `H = handle_log - log rho`.

use num_complex::Complex64;

use super::branch::{circle_logs, continue_log};
use super::{HandleTwist, RhoModuliTorus};
use crate::error::{Error, Result};
use crate::numerics::{circle_quadrature, determinant, lu_solve, pairwise_sum, ComplexMatrix, NumericConfig};
use crate::specialfn::{theta1_prime_zero, theta_genus_one, TorusModulus, TwistPair};

/// Extra scale between the integral-equation contour and the moment contours.
const RESIDUAL_CONTOUR_SCALE: f64 = 1.5;

/// Truncation and quadrature settings for the torus self-sewing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoOptions {
    pub order: usize,
    pub quad_points: usize,
    /// Moment contours sit at `contour_scale * |rho|^{1/2}` around each puncture.
    pub contour_scale: f64,
}

impl Default for RhoOptions {
    fn default() -> Self {
        Self { order: 16, quad_points: 64, contour_scale: 1.0 }
    }
}

impl RhoOptions {
    pub fn from_config(cfg: &NumericConfig) -> Self {
        Self { order: cfg.trunc_order, quad_points: cfg.quad_points, contour_scale: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::input("truncation order must be at least 1"));
        }
        if self.quad_points < 8 {
            return Err(Error::input("at least 8 quadrature points are needed"));
        }
        if !(self.contour_scale > 0.0 && self.contour_scale.is_finite()) {
            return Err(Error::input("contour scale must be positive"));
        }
        Ok(())
    }
}

/// Distance from `z` to the nearest lattice point.
fn lattice_distance(tau: &TorusModulus, z: Complex64) -> f64 {
    let (zr, _, _) = tau.reduce(z);
    let mut best = f64::INFINITY;
    for m in -2..=2 {
        for n in -2..=2 {
            best = best.min((zr - tau.lattice_point(m, n)).norm());
        }
    }
    best
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Theta data of the twisted torus kernel for fixed `(tau, w, kappa)` and characteristics.
#[derive(Debug, Clone)]
struct TorusData {
    tau: TorusModulus,
    w: Complex64,
    kappa: f64,
    alpha: f64,
    beta: f64,
    theta1_prime: Complex64,
    theta1_w: Complex64,
    theta1_minus_w: Complex64,
    theta_kw: Complex64,
    cfg: NumericConfig,
}

impl TorusData {
    fn new(tw1: &TwistPair, handle: &HandleTwist, moduli: &RhoModuliTorus, cfg: &NumericConfig) -> Result<Self> {
        if handle.is_half() {
            return Err(Error::domain("kappa = -1/2 is not supported for the torus self-sewing"));
        }
        let tau = moduli.tau;
        let w = moduli.w();
        let kappa = handle.kappa();
        let (alpha, beta) = (tw1.alpha(), tw1.beta());
        let theta1_prime = theta1_prime_zero(&tau, cfg)?;
        let theta1_w = theta_genus_one(0.5, 0.5, w, &tau, cfg)?.0;
        let theta1_minus_w = theta_genus_one(0.5, 0.5, -w, &tau, cfg)?.0;
        let theta_kw = theta_genus_one(alpha, beta, w * kappa, &tau, cfg)?.0;
        if theta_kw.norm() < cfg.resonance_guard {
            return Err(Error::domain("theta constant at kappa w vanishes for these characteristics"));
        }
        Ok(Self { tau, w, kappa, alpha, beta, theta1_prime, theta1_w, theta1_minus_w, theta_kw, cfg: *cfg })
    }

    fn theta1(&self, z: Complex64) -> Result<Complex64> {
        Ok(theta_genus_one(0.5, 0.5, z, &self.tau, &self.cfg)?.0)
    }

    /// `theta[alpha; beta](z + kappa w) theta_1'(0) / (theta[alpha; beta](kappa w) theta_1(z))`.
    fn psi(&self, z: Complex64) -> Result<Complex64> {
        if lattice_distance(&self.tau, z) < self.cfg.pole_guard {
            return Err(Error::domain(format!("kernel evaluated within the pole guard at separation {z}")));
        }
        let num = theta_genus_one(self.alpha, self.beta, z + self.w * self.kappa, &self.tau, &self.cfg)?.0;
        Ok(num * self.theta1_prime / (self.theta_kw * self.theta1(z)?))
    }

    /// `F(y)`, equal to 1 at `y = 0`.
    fn f_origin(&self, y: Complex64) -> Result<Complex64> {
        if y.norm() == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(self.theta1(y - self.w)? * self.theta1_prime * y / (self.theta1(y)? * self.theta1_minus_w))
    }

    /// `G(y)`, equal to 1 at `y = w`.
    fn g_puncture(&self, y: Complex64) -> Result<Complex64> {
        let u = y - self.w;
        if u.norm() == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(self.theta1(u)? * self.theta1_w / (u * self.theta1_prime * self.theta1(y)?))
    }

    /// `V(x)` on the sheet reached along the segment from the origin.
    fn segment_log(&self, x: Complex64) -> Result<Complex64> {
        if !finite(x) || x.norm() == 0.0 {
            return Err(Error::domain("evaluation point must be finite and away from the puncture at 0"));
        }
        let start_len = 1e-3 * lattice_distance(&self.tau, self.w).min(1.0);
        let z0 = if x.norm() <= start_len { x } else { x * (start_len / x.norm()) };
        let f0 = self.f_origin(z0)?;
        let log_f = if z0 == x { f0.ln() } else { continue_log(|z| self.f_origin(z), z0, x, f0.ln())? };
        Ok(log_f - x.ln())
    }

    /// Samples of `log F` at `radius e^{i phi_j}`, on the branch vanishing at the origin.
    fn origin_logs(&self, nodes: &[Complex64]) -> Result<Vec<Complex64>> {
        let vals: Result<Vec<Complex64>> = nodes.iter().map(|&z| self.f_origin(z)).collect();
        circle_logs(&vals?)
    }

    /// Samples of `log G` at `w + u_j`, on the branch vanishing at `w`.
    fn puncture_logs(&self, offsets: &[Complex64]) -> Result<Vec<Complex64>> {
        let vals: Result<Vec<Complex64>> = offsets.iter().map(|&u| self.g_puncture(self.w + u)).collect();
        circle_logs(&vals?)
    }
}

fn circle(radius: f64, m: usize, offset: f64) -> Vec<Complex64> {
    (0..m)
        .map(|j| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (j as f64 + offset) / m as f64))
        .collect()
}

/// Columns `(rho^{1/2} / u_j)^{k-1} / M` for `k = 1..=order`: applied to samples they give
/// `rho^{(k-1)/2}` times the Taylor coefficient of `u^{k-1}`.
fn coefficient_weights(nodes: &[Complex64], sqrt_rho: Complex64, order: usize) -> ComplexMatrix {
    let m = nodes.len() as f64;
    ComplexMatrix::from_fn(nodes.len(), order, |j, k| (sqrt_rho / nodes[j]).powi(k as i32) / m)
}

fn weighted_coefficients(samples: &[Complex64], weights: &ComplexMatrix) -> Vec<Complex64> {
    (0..weights.cols())
        .map(|k| {
            let terms: Vec<Complex64> = samples.iter().enumerate().map(|(j, s)| s * weights[(j, k)]).collect();
            pairwise_sum(&terms)
        })
        .collect()
}

/// `A^T Phi B` for two coefficient-weight matrices.
fn double_coefficients(phi: &ComplexMatrix, left: &ComplexMatrix, right: &ComplexMatrix) -> Result<ComplexMatrix> {
    left.transpose().matmul(phi)?.matmul(right)
}

/// The twisted torus kernel as the coefficient of `dx^{1/2} dy^{1/2}`.
pub fn s_kappa_torus(
    tw1: &TwistPair,
    handle: &HandleTwist,
    x: Complex64,
    y: Complex64,
    moduli: &RhoModuliTorus,
    cfg: &NumericConfig,
) -> Result<Complex64> {
    let data = TorusData::new(tw1, handle, moduli, cfg)?;
    let (vx, vy) = (data.segment_log(x)?, data.segment_log(y)?);
    Ok((data.kappa * (vx - vy)).exp() * data.psi(x - y)?)
}

/// Precomputed moments of one self-sewing configuration.
#[derive(Debug, Clone)]
pub struct RhoTorusSewing {
    data: TorusData,
    handle: HandleTwist,
    moduli: RhoModuliTorus,
    opts: RhoOptions,
    g: ComplexMatrix,
    t: ComplexMatrix,
    // D (I - T)^{-1}
    w_mat: ComplexMatrix,
    det: Complex64,
}

impl RhoTorusSewing {
    pub fn new(
        tw1: &TwistPair,
        handle: &HandleTwist,
        moduli: &RhoModuliTorus,
        opts: &RhoOptions,
        cfg: &NumericConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        opts.validate()?;
        let data = TorusData::new(tw1, handle, moduli, cfg)?;
        let rc = moduli.contour_radius() * opts.contour_scale;
        let outer = moduli.radius();
        let inner = moduli.rho().norm() / outer;
        if !(rc < outer && rc > inner) {
            return Err(Error::domain(format!(
                "moment contour radius {rc:.3e} lies outside the annulus ({inner:.3e}, {outer:.3e})"
            )));
        }
        let mut s = Self {
            data,
            handle: *handle,
            moduli: *moduli,
            opts: *opts,
            g: ComplexMatrix::zeros(0, 0),
            t: ComplexMatrix::zeros(0, 0),
            w_mat: ComplexMatrix::zeros(0, 0),
            det: Complex64::new(1.0, 0.0),
        };
        s.g = s.build_g(rc)?;
        let n = opts.order;
        let theta = handle.theta();
        let dvals: Vec<Complex64> = (0..2 * n).map(|i| if i < n { theta.conj() } else { -theta }).collect();
        let d = ComplexMatrix::diagonal(&dvals);
        s.t = s.g.matmul(&d)?.scale(moduli.xi.value());
        let a = s.t.identity_minus()?;
        s.det = determinant(&a)?;
        let inv = lu_solve(&a, &ComplexMatrix::identity(2 * n), cfg)?;
        s.w_mat = d.matmul(&inv)?;
        Ok(s)
    }

    pub fn moduli(&self) -> &RhoModuliTorus {
        &self.moduli
    }

    pub fn handle(&self) -> &HandleTwist {
        &self.handle
    }

    pub fn options(&self) -> &RhoOptions {
        &self.opts
    }

    /// Moment matrix `G` in block order `(a, k)`, `a = 1, 2`.
    pub fn g(&self) -> &ComplexMatrix {
        &self.g
    }

    /// `T = xi G D` with `D = diag(theta^{-1}, -theta)`.
    pub fn t(&self) -> &ComplexMatrix {
        &self.t
    }

    /// `det(I - T)`.
    pub fn det(&self) -> Complex64 {
        self.det
    }

    /// `Y = (I - T)^{-1} G`.
    pub fn y(&self) -> Result<ComplexMatrix> {
        lu_solve(&self.t.identity_minus()?, &self.g, &self.data.cfg)
    }

    fn kappa(&self) -> f64 {
        self.data.kappa
    }

    fn sqrt_rho(&self) -> Complex64 {
        self.moduli.sqrt_rho()
    }

    fn exp_kh(&self, sign: f64) -> Complex64 {
        (self.moduli.puncture_log() * (sign * self.kappa())).exp()
    }

    fn build_g(&self, rc: f64) -> Result<ComplexMatrix> {
        let (n, m) = (self.opts.order, self.opts.quad_points);
        let kap = self.kappa();
        let w = self.data.w;
        let sr = self.sqrt_rho();
        let nodes = circle(rc, m, 0.0);
        let shifted = circle(rc, m, 0.5);
        let wts = coefficient_weights(&nodes, sr, n);
        let wts_shifted = coefficient_weights(&shifted, sr, n);
        let lf = self.data.origin_logs(&nodes)?;
        let lf_s = self.data.origin_logs(&shifted)?;
        let lg = self.data.puncture_logs(&nodes)?;
        let lg_s = self.data.puncture_logs(&shifted)?;

        // G_11: x = w + u_i, y = y_j around the origin
        let mut phi = ComplexMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let f = (kap * (lg[i] - lf[j])).exp();
                phi[(i, j)] = f * self.data.psi(w + nodes[i] - nodes[j])?;
            }
        }
        let g11 = double_coefficients(&phi, &wts, &wts)?.scale(self.moduli.rho_pow(0.5 + kap) * self.exp_kh(1.0));

        // G_22: x = x_i around the origin, y = w + u_j
        for i in 0..m {
            for j in 0..m {
                let f = (kap * (lf[i] - lg[j])).exp();
                phi[(i, j)] = f * self.data.psi(nodes[i] - w - nodes[j])?;
            }
        }
        let g22 = double_coefficients(&phi, &wts, &wts)?.scale(self.moduli.rho_pow(0.5 - kap) * self.exp_kh(-1.0));

        // G_12: both around w; G_21: both around the origin. The pole part 1/(x - y)
        // has no coefficients of nonnegative powers in both variables and is removed.
        for i in 0..m {
            for j in 0..m {
                let d = nodes[i] - shifted[j];
                let f = (kap * (lg[i] - lg_s[j])).exp();
                phi[(i, j)] = f * self.data.psi(d)? - 1.0 / d;
            }
        }
        let g12 = double_coefficients(&phi, &wts, &wts_shifted)?.scale(sr);
        for i in 0..m {
            for j in 0..m {
                let d = nodes[i] - shifted[j];
                let f = (kap * (lf[i] - lf_s[j])).exp();
                phi[(i, j)] = f * self.data.psi(d)? - 1.0 / d;
            }
        }
        let g21 = double_coefficients(&phi, &wts, &wts_shifted)?.scale(sr);
        ComplexMatrix::from_blocks(&g11, &g12, &g21, &g22)
    }

    /// Radius for moments at a point: the moment contour, shrunk when the point lies inside it.
    fn moment_radius(&self, dist: f64) -> f64 {
        let rc = self.moduli.contour_radius() * self.opts.contour_scale;
        rc.min(0.5 * dist)
    }

    fn distances(&self, x: Complex64) -> (f64, f64) {
        (lattice_distance(&self.data.tau, x), lattice_distance(&self.data.tau, x - self.data.w))
    }

    /// `h(x) / E(x)` in block order.
    fn h_stripped(&self, x: Complex64) -> Result<Vec<Complex64>> {
        let (n, m) = (self.opts.order, self.opts.quad_points);
        let kap = self.kappa();
        let w = self.data.w;
        let sr = self.sqrt_rho();
        let (d0, dw) = self.distances(x);
        let n0 = circle(self.moment_radius(d0), m, 0.0);
        let nw = circle(self.moment_radius(dw), m, 0.0);
        let lf = self.data.origin_logs(&n0)?;
        let lg = self.data.puncture_logs(&nw)?;
        let s1: Result<Vec<Complex64>> =
            (0..m).map(|j| Ok((-kap * lf[j]).exp() * self.data.psi(x - n0[j])?)).collect();
        let s2: Result<Vec<Complex64>> =
            (0..m).map(|j| Ok((-kap * lg[j]).exp() * self.data.psi(x - w - nw[j])?)).collect();
        let c1 = weighted_coefficients(&s1?, &coefficient_weights(&n0, sr, n));
        let c2 = weighted_coefficients(&s2?, &coefficient_weights(&nw, sr, n));
        let p1 = self.moduli.rho_pow(0.5 * (kap + 0.5));
        let p2 = self.moduli.rho_pow(0.5 * (0.5 - kap)) * self.exp_kh(-1.0);
        Ok(c1.into_iter().map(|v| v * p1).chain(c2.into_iter().map(|v| v * p2)).collect())
    }

    /// `hbar(y) E(y)` in block order.
    fn hbar_stripped(&self, y: Complex64) -> Result<Vec<Complex64>> {
        let (n, m) = (self.opts.order, self.opts.quad_points);
        let kap = self.kappa();
        let w = self.data.w;
        let sr = self.sqrt_rho();
        let (d0, dw) = self.distances(y);
        let n0 = circle(self.moment_radius(d0), m, 0.0);
        let nw = circle(self.moment_radius(dw), m, 0.0);
        let lf = self.data.origin_logs(&n0)?;
        let lg = self.data.puncture_logs(&nw)?;
        let s1: Result<Vec<Complex64>> =
            (0..m).map(|j| Ok((kap * lg[j]).exp() * self.data.psi(w + nw[j] - y)?)).collect();
        let s2: Result<Vec<Complex64>> =
            (0..m).map(|j| Ok((kap * lf[j]).exp() * self.data.psi(n0[j] - y)?)).collect();
        let c1 = weighted_coefficients(&s1?, &coefficient_weights(&nw, sr, n));
        let c2 = weighted_coefficients(&s2?, &coefficient_weights(&n0, sr, n));
        let p1 = self.moduli.rho_pow(0.5 * (kap + 0.5)) * self.exp_kh(1.0);
        let p2 = self.moduli.rho_pow(0.5 * (0.5 - kap));
        Ok(c1.into_iter().map(|v| v * p1).chain(c2.into_iter().map(|v| v * p2)).collect())
    }

    /// `h_a(k, x)` for all `(a, k)`, on the segment sheet at `x`.
    pub fn h(&self, x: Complex64) -> Result<Vec<Complex64>> {
        let e = (self.kappa() * self.data.segment_log(x)?).exp();
        Ok(self.h_stripped(x)?.into_iter().map(|v| v * e).collect())
    }

    /// `hbar_a(k, y)` for all `(a, k)`, on the segment sheet at `y`.
    pub fn hbar(&self, y: Complex64) -> Result<Vec<Complex64>> {
        let e = (-self.kappa() * self.data.segment_log(y)?).exp();
        Ok(self.hbar_stripped(y)?.into_iter().map(|v| v * e).collect())
    }

    /// Twisted torus kernel on the same sheets as [`RhoTorusSewing::kernel`].
    pub fn base_kernel(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        let (vx, vy) = (self.data.segment_log(x)?, self.data.segment_log(y)?);
        Ok((self.kappa() * (vx - vy)).exp() * self.data.psi(x - y)?)
    }

    /// Genus-two kernel at two points of the punctured torus.
    pub fn kernel(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        let (vx, vy) = (self.data.segment_log(x)?, self.data.segment_log(y)?);
        self.kernel_on_sheets(x, vx, y, vy)
    }

    /// Genus-two kernel with explicit values of `V` at both points.
    fn kernel_on_sheets(&self, x: Complex64, vx: Complex64, y: Complex64, vy: Complex64) -> Result<Complex64> {
        let hx = self.h_stripped(x)?;
        let hy = self.hbar_stripped(y)?;
        let n2 = hx.len();
        let mut terms = Vec::with_capacity(n2 * n2);
        for i in 0..n2 {
            for j in 0..n2 {
                terms.push(hx[i] * self.w_mat[(i, j)] * hy[j]);
            }
        }
        let corr = self.moduli.xi.value() * pairwise_sum(&terms);
        let v = (self.kappa() * (vx - vy)).exp() * (self.data.psi(x - y)? + corr);
        if !finite(v) {
            return Err(Error::numerical("non-finite kernel value"));
        }
        Ok(v)
    }

    fn base_on_sheets(&self, x: Complex64, vx: Complex64, y: Complex64, vy: Complex64) -> Result<Complex64> {
        Ok((self.kappa() * (vx - vy)).exp() * self.data.psi(x - y)?)
    }
}

/// One-shot genus-two kernel.
#[allow(clippy::too_many_arguments)]
pub fn szego_genus2_rho(
    tw1: &TwistPair,
    handle: &HandleTwist,
    x: Complex64,
    y: Complex64,
    moduli: &RhoModuliTorus,
    opts: &RhoOptions,
    cfg: &NumericConfig,
) -> Result<Complex64> {
    RhoTorusSewing::new(tw1, handle, moduli, opts, cfg)?.kernel(x, y)
}

/// Residual of the integral equation
/// `S(x, y) = S_kappa(x, y) + sum_a (1/2 pi i) \oint_{C_a} S_kappa(x, z_a) S(z_a, y)`.
///
/// On `C_a` the genus-two kernel is evaluated at the identified point `z_abar = rho / z_a`
/// on the other side of the handle and converted with the multiplier and half-form factors,
/// so the check exercises the truncated solve rather than its own expansion.
pub fn integral_equation_residual_rho(
    sewing: &RhoTorusSewing,
    x: Complex64,
    y: Complex64,
    m: usize,
) -> Result<Complex64> {
    let data = &sewing.data;
    let moduli = &sewing.moduli;
    let w = data.w;
    let rho = moduli.rho();
    let log_rho = moduli.log_rho();
    let h = moduli.puncture_log();
    let theta = sewing.handle.theta();
    let half = moduli.xi.value() * moduli.sqrt_rho();
    let s = RESIDUAL_CONTOUR_SCALE.min((moduli.radius() / moduli.contour_radius()).sqrt());
    let r = moduli.contour_radius() * s;
    let (vx, vy) = (data.segment_log(x)?, data.segment_log(y)?);

    let nodes = circle(r, m, 0.0);
    let images: Vec<Complex64> = nodes.iter().map(|z| rho / z).collect();
    let lf_nodes = data.origin_logs(&nodes)?;
    let lg_nodes = data.puncture_logs(&nodes)?;
    let lf_images = data.origin_logs(&images)?;
    let lg_images = data.puncture_logs(&images)?;

    let mut integral = Complex64::new(0.0, 0.0);
    for a in 1..=2 {
        let mut vals = Vec::with_capacity(m);
        for j in 0..m {
            let (z, zi) = (nodes[j], images[j]);
            let log_image = log_rho - z.ln();
            let v = if a == 1 {
                // z_1 = z near the origin, identified with w + rho / z
                let vp = lf_nodes[j] - z.ln();
                let vq = h + log_image + lg_images[j];
                let conv = -theta.conj() * zi / half;
                sewing.base_on_sheets(x, vx, z, vp)? * conv * sewing.kernel_on_sheets(w + zi, vq, y, vy)?
            } else {
                // z_2 = z near w, identified with rho / z near the origin
                let vp = h + z.ln() + lg_nodes[j];
                let vq = lf_images[j] - log_image;
                let conv = theta * zi / half;
                sewing.base_on_sheets(x, vx, w + z, vp)? * conv * sewing.kernel_on_sheets(zi, vq, y, vy)?
            };
            vals.push(v);
        }
        let center = if a == 1 { Complex64::new(0.0, 0.0) } else { w };
        integral += circle_quadrature(center, r, m, |j, _| vals[j])?;
    }
    let direct = sewing.kernel_on_sheets(x, vx, y, vy)?;
    let base = sewing.base_on_sheets(x, vx, y, vy)?;
    Ok(direct - base - integral)
}
