use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;
const UNIT_TOL: f64 = 1e-10;

pub(crate) fn i2pi() -> Complex64 {
    Complex64::new(0.0, TWO_PI)
}

/// Reduces a real number into `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn check_finite(name: &str, z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("{name} must be finite")))
    }
}

/// A point of the upper half-plane together with its nome `q = e^{2 pi i tau}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusModulus {
    tau: Complex64,
    q: Complex64,
}

impl TorusModulus {
    pub fn new(tau: Complex64) -> Result<Self> {
        check_finite("tau", tau)?;
        if !(tau.im > 0.0) {
            return Err(Error::input(format!("tau must have positive imaginary part, got {tau}")));
        }
        Ok(Self { tau, q: (i2pi() * tau).exp() })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    /// `2 pi i (m tau + n)`.
    pub fn lattice_point(&self, m: i64, n: i64) -> Complex64 {
        i2pi() * (self.tau * m as f64 + n as f64)
    }

    /// Writes `z = z_r + 2 pi i (m tau + n)` with `|Re z_r| <= pi Im tau` and `|Im z_r| <= pi`.
    pub fn reduce(&self, z: Complex64) -> (Complex64, i64, i64) {
        let m = -(z.re / (TWO_PI * self.tau.im)).round();
        let shifted_im = z.im - TWO_PI * m * self.tau.re;
        let n = (shifted_im / TWO_PI).round();
        let zr = z - self.lattice_point(m as i64, n as i64);
        (zr, m as i64, n as i64)
    }

    /// Lattice coordinates `(u, v)` with `z = 2 pi i (u + v tau)`.
    pub fn lattice_coords(&self, z: Complex64) -> (f64, f64) {
        let w = z / i2pi();
        let v = w.im / self.tau.im;
        let u = w.re - v * self.tau.re;
        (u, v)
    }

    pub fn from_lattice_coords(&self, u: f64, v: f64) -> Complex64 {
        i2pi() * (self.tau * v + u)
    }
}

/// Real characteristics `(alpha, beta)` of any genus, stored reduced into `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Characteristics {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl Characteristics {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() || alpha.is_empty() {
            return Err(Error::input("alpha and beta must be non-empty and of equal length"));
        }
        if alpha.iter().chain(&beta).any(|v| !v.is_finite()) {
            return Err(Error::input("characteristics must be finite"));
        }
        Ok(Self { alpha: alpha.into_iter().map(frac).collect(), beta: beta.into_iter().map(frac).collect() })
    }

    /// Keeps the given values without reducing them. Used where the lift matters,
    /// for example when comparing against the unreduced theta sum.
    pub fn unreduced(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() || alpha.is_empty() {
            return Err(Error::input("alpha and beta must be non-empty and of equal length"));
        }
        if alpha.iter().chain(&beta).any(|v| !v.is_finite()) {
            return Err(Error::input("characteristics must be finite"));
        }
        Ok(Self { alpha, beta })
    }

    pub fn genus(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `theta_j = -e^{-2 pi i beta_j}`.
    pub fn thetas(&self) -> Vec<Complex64> {
        self.beta.iter().map(|b| -Complex64::from_polar(1.0, -TWO_PI * b)).collect()
    }

    /// `phi_j = -e^{2 pi i alpha_j}`.
    pub fn phis(&self) -> Vec<Complex64> {
        self.alpha.iter().map(|a| -Complex64::from_polar(1.0, TWO_PI * a)).collect()
    }

    pub fn twist(&self, j: usize) -> TwistPair {
        TwistPair::from_characteristics(self.alpha[j], self.beta[j])
    }
}

/// Symmetric `g x g` matrix with positive-definite imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix {
    omega: DMatrix<Complex64>,
    min_eig_im: f64,
}

impl PeriodMatrix {
    /// Builds from the upper triangle (row-major, `g(g+1)/2` entries); the lower
    /// triangle is filled by symmetry.
    pub fn from_upper(g: usize, upper: &[Complex64]) -> Result<Self> {
        if upper.len() != g * (g + 1) / 2 || g == 0 {
            return Err(Error::input("wrong number of upper-triangle entries"));
        }
        let mut omega = DMatrix::zeros(g, g);
        let mut it = upper.iter();
        for i in 0..g {
            for j in i..g {
                let v = *it.next().unwrap();
                check_finite("period matrix entry", v)?;
                omega[(i, j)] = v;
                omega[(j, i)] = v;
            }
        }
        Self::checked(omega)
    }

    pub fn genus_one(tau: &TorusModulus) -> Self {
        Self { omega: DMatrix::from_element(1, 1, tau.tau()), min_eig_im: tau.tau().im }
    }

    fn checked(omega: DMatrix<Complex64>) -> Result<Self> {
        let y = omega.map(|z| z.im);
        if y.clone().cholesky().is_none() {
            return Err(Error::input("imaginary part of the period matrix is not positive definite"));
        }
        let min_eig_im = SymmetricEigen::new(y).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(Self { omega, min_eig_im })
    }

    pub fn genus(&self) -> usize {
        self.omega.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.omega[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.omega
    }

    pub fn min_eig_im(&self) -> f64 {
        self.min_eig_im
    }

    /// `Im(Omega)^{-1}`; invertibility is guaranteed by construction.
    pub fn im_inverse(&self) -> DMatrix<f64> {
        self.omega.map(|z| z.im).try_inverse().expect("positive definite")
    }
}

/// Genus-one multipliers `(theta, phi)` with `phi = e^{2 pi i lambda}`, `0 <= lambda < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistPair {
    theta: Complex64,
    phi: Complex64,
    lambda: f64,
}

fn unit(name: &str, z: Complex64) -> Result<Complex64> {
    check_finite(name, z)?;
    if (z.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::input(format!("{name} must have unit modulus, got |{name}| = {}", z.norm())));
    }
    Ok(z / z.norm())
}

impl TwistPair {
    pub fn new(theta: Complex64, phi: Complex64) -> Result<Self> {
        let theta = unit("theta", theta)?;
        let phi = unit("phi", phi)?;
        let lambda = frac(phi.arg() / TWO_PI);
        Ok(Self { theta, phi, lambda })
    }

    /// Uses `lambda` exactly as given (after reduction) rather than recovering it from `phi`.
    pub fn from_lambda(theta: Complex64, lambda: f64) -> Result<Self> {
        let theta = unit("theta", theta)?;
        if !lambda.is_finite() {
            return Err(Error::input("lambda must be finite"));
        }
        let lambda = frac(lambda);
        Ok(Self { theta, phi: Complex64::from_polar(1.0, TWO_PI * lambda), lambda })
    }

    pub fn from_characteristics(alpha: f64, beta: f64) -> Self {
        let lambda = frac(alpha + 0.5);
        Self {
            theta: -Complex64::from_polar(1.0, -TWO_PI * beta),
            phi: Complex64::from_polar(1.0, TWO_PI * lambda),
            lambda,
        }
    }

    pub fn theta(&self) -> Complex64 {
        self.theta
    }

    pub fn phi(&self) -> Complex64 {
        self.phi
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `kappa` in `[-1/2, 1/2)` with `phi = -e^{2 pi i kappa}`.
    pub fn kappa(&self) -> f64 {
        self.lambda - 0.5
    }

    pub fn alpha(&self) -> f64 {
        frac(self.lambda - 0.5)
    }

    pub fn beta(&self) -> f64 {
        frac(0.5 - self.theta.arg() / TWO_PI)
    }

    pub fn is_trivial(&self) -> bool {
        (self.theta - 1.0).norm() < UNIT_TOL && self.lambda == 0.0
    }

    /// `(theta^{-1}, phi^{-1})`.
    pub fn inverse(&self) -> Self {
        Self {
            theta: self.theta.conj(),
            phi: self.phi.conj(),
            lambda: if self.lambda == 0.0 { 0.0 } else { 1.0 - self.lambda },
        }
    }

    /// `(theta^a phi^b, theta^c phi^d)` for an integer matrix `[[a, b], [c, d]]`.
    pub fn transform(&self, a: i64, b: i64, c: i64, d: i64) -> Self {
        let theta = self.theta.powi(a as i32) * self.phi.powi(b as i32);
        let lambda = frac(c as f64 * self.theta_lambda() + d as f64 * self.lambda);
        let phi = self.theta.powi(c as i32) * self.phi.powi(d as i32);
        Self { theta, phi, lambda: frac_consistent(lambda, phi) }
    }

    fn theta_lambda(&self) -> f64 {
        frac(self.theta.arg() / TWO_PI)
    }
}

// Recover lambda from phi when the exact bookkeeping drifted by rounding.
fn frac_consistent(lambda: f64, phi: Complex64) -> f64 {
    let from_phi = frac(phi.arg() / TWO_PI);
    let d = (lambda - from_phi).abs();
    if d < 1e-9 || (1.0 - d) < 1e-9 {
        lambda
    } else {
        from_phi
    }
}
