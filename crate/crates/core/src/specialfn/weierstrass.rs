//! The twisted Weierstrass function `P_1[theta; phi](z, tau)` and its normalized
//! derivatives `P_k = (-1)^{k-1}/(k-1)! d^{k-1}/dz^{k-1} P_1`.

use num_complex::Complex64;

use super::series::{ln_factorial, terms_needed};
use super::theta::{prime_form_k, theta_genus_one};
use super::types::{TorusModulus, TwistPair};
use crate::error::{Error, Result};
use crate::numerics::{pairwise_sum, NumericConfig};

const SERIES_ABS_TOL: f64 = 1e-19;

/// `P_1` from the theta quotient `theta[a;b](z) / (theta[a;b](0) K(z))`.
pub fn p1_theta(tw: &TwistPair, z: Complex64, tau: &TorusModulus, cfg: &NumericConfig) -> Result<Complex64> {
    if tw.is_trivial() {
        return Err(Error::input("(theta, phi) = (1, 1) has no genus-one kernel"));
    }
    let (zr, _, _) = tau.reduce(z);
    if zr.norm() < cfg.pole_guard {
        return Err(Error::domain(format!("z = {z} is within the pole guard of a lattice point")));
    }
    let (a, b) = (tw.alpha(), tw.beta());
    let (num, _) = theta_genus_one(a, b, z, tau, cfg)?;
    let (den, _) = theta_genus_one(a, b, Complex64::new(0.0, 0.0), tau, cfg)?;
    if den.norm() < cfg.resonance_guard {
        return Err(Error::domain("theta constant of the characteristic vanishes"));
    }
    Ok(num / (den * prime_form_k(z, tau, cfg)?))
}

/// `P_1` from the `q`-series after reduction into the band `|Re z| <= pi Im tau`.
pub fn p1_series(tw: &TwistPair, z: Complex64, tau: &TorusModulus, cfg: &NumericConfig) -> Result<Complex64> {
    Ok(p_k_all(tw, 1, z, tau, cfg)?[0])
}

/// Single `P_k`, `k >= 1`.
pub fn p_k(tw: &TwistPair, k: usize, z: Complex64, tau: &TorusModulus, cfg: &NumericConfig) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::input("P_k needs k >= 1"));
    }
    Ok(p_k_all(tw, k, z, tau, cfg)?[k - 1])
}

/// Coefficients of the polynomials `p_m` with `d^m/dz^m (1/(e^z - 1)) = p_m(g)`, `g = 1/(e^z - 1)`.
fn g_derivative_polys(mmax: usize) -> Vec<Vec<f64>> {
    let mut polys = vec![vec![0.0, 1.0]];
    for m in 0..mmax {
        let p = &polys[m];
        // p'(g) * (-g - g^2)
        let mut next = vec![0.0; p.len() + 1];
        for (j, &c) in p.iter().enumerate().skip(1) {
            let d = c * j as f64;
            next[j] -= d;
            next[j + 1] -= d;
        }
        polys.push(next);
    }
    polys
}

fn poly_eval(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// `P_1, ..., P_kmax` at one point, sharing the series terms.
pub fn p_k_all(
    tw: &TwistPair,
    kmax: usize,
    z: Complex64,
    tau: &TorusModulus,
    cfg: &NumericConfig,
) -> Result<Vec<Complex64>> {
    if kmax == 0 {
        return Err(Error::input("P_k needs k >= 1"));
    }
    if tw.is_trivial() {
        return Err(Error::input("(theta, phi) = (1, 1) has no genus-one kernel"));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::input("P_k argument must be finite"));
    }
    let (zr, m, n) = tau.reduce(z);
    if zr.norm() < cfg.pole_guard {
        return Err(Error::domain(format!("z = {z} is within the pole guard of a lattice point")));
    }
    let multiplier = tw.theta().powi(m as i32) * tw.phi().powi(n as i32);
    let lam = tw.lambda();
    let jmax = kmax - 1;

    // derivatives of e^{lambda z} / (e^z - 1)
    let g = 1.0 / (zr.exp() - 1.0);
    let polys = g_derivative_polys(jmax);
    let gder: Vec<Complex64> = polys.iter().map(|p| poly_eval(p, g)).collect();
    let elz = (zr * lam).exp();
    let mut derivs = vec![Complex64::new(0.0, 0.0); kmax];
    for (j, d) in derivs.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        for i in 0..=j {
            // binom(j, i) lambda^{j-i}
            let w = binom * lam.powi((j - i) as i32);
            acc += gder[i] * w;
            binom = binom * (j - i) as f64 / (i + 1) as f64;
        }
        *d = elz * acc;
    }

    let qabs = tau.q().norm();
    let tau_c = tau.tau();
    let i2pi = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let thinv = tw.theta().conj();
    let th = tw.theta();

    // - sum_{r>=0} theta^{-1} q^s e^{s z} / (1 - theta^{-1} q^s),  s = r + lambda
    let rho1 = qabs * zr.re.exp();
    let count1 = terms_needed(rho1, qabs, lam, jmax, SERIES_ABS_TOL)?;
    let mut sum1: Vec<Vec<Complex64>> = vec![Vec::with_capacity(count1); kmax];
    for r in 0..count1 {
        let s = r as f64 + lam;
        let qs = (i2pi * tau_c * s).exp();
        let den = 1.0 - thinv * qs;
        if den.norm() < cfg.resonance_guard {
            return Err(Error::domain(format!("resonant series denominator at r = {r}")));
        }
        let base = -thinv * qs / den * (zr * s).exp();
        let mut pw = Complex64::new(1.0, 0.0);
        for acc in sum1.iter_mut() {
            acc.push(base * pw);
            pw *= s;
        }
    }
    // + sum_{r>=1} theta q^s e^{-s z} / (1 - theta q^s),  s = r - lambda
    let rho2 = qabs * (-zr.re).exp();
    let count2 = terms_needed(rho2, qabs, 1.0 - lam, jmax, SERIES_ABS_TOL)?;
    let mut sum2: Vec<Vec<Complex64>> = vec![Vec::with_capacity(count2); kmax];
    for r in 1..=count2 {
        let s = r as f64 - lam;
        let qs = (i2pi * tau_c * s).exp();
        let den = 1.0 - th * qs;
        if den.norm() < cfg.resonance_guard {
            return Err(Error::domain(format!("resonant series denominator at r = {r}")));
        }
        let base = th * qs / den * (-zr * s).exp();
        let mut pw = Complex64::new(1.0, 0.0);
        for acc in sum2.iter_mut() {
            acc.push(base * pw);
            pw *= -s;
        }
    }

    let mut out = Vec::with_capacity(kmax);
    for j in 0..kmax {
        let total = derivs[j] + pairwise_sum(&sum1[j]) + pairwise_sum(&sum2[j]);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let v = total * (sign * (-ln_factorial(j)).exp()) * multiplier;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::numerical(format!("non-finite P_{} value", j + 1)));
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::eisenstein::eisenstein_all;
    use crate::numerics::circle_quadrature;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    #[test]
    fn routes_agree_on_grid() {
        let tau = TorusModulus::new(c(0.3, 1.0)).unwrap();
        let tw = TwistPair::from_characteristics(0.3, 0.1);
        for i in 0..5 {
            for j in 0..5 {
                let z = tau.from_lattice_coords(0.1 + 0.18 * i as f64, 0.1 + 0.18 * j as f64);
                let a = p1_theta(&tw, z, &tau, &cfg()).unwrap();
                let b = p1_series(&tw, z, &tau, &cfg()).unwrap();
                assert!((a - b).norm() < 1e-10 * a.norm(), "z={z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn residue_at_origin() {
        let tau = TorusModulus::new(c(0.1, 0.9)).unwrap();
        let tw = TwistPair::from_characteristics(0.2, 0.7);
        let z = c(1e-6, 0.0);
        // z P_1(z) = 1 - E_1 z + O(z^2)
        assert!((p1_series(&tw, z, &tau, &cfg()).unwrap() * z - 1.0).norm() < 1e-6);
        assert!((p1_theta(&tw, z, &tau, &cfg()).unwrap() * z - 1.0).norm() < 1e-6);
        for k in 2..5 {
            let v = p_k(&tw, k, z, &tau, &cfg()).unwrap() * z.powi(k as i32);
            assert!((v - 1.0).norm() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn half_characteristic_is_odd() {
        let tau = TorusModulus::new(c(0.2, 1.1)).unwrap();
        let tw = TwistPair::from_lambda(c(-1.0, 0.0), 0.5).unwrap();
        let z = c(0.9, 2.1);
        let a = p1_series(&tw, z, &tau, &cfg()).unwrap();
        let b = p1_series(&tw, -z, &tau, &cfg()).unwrap();
        assert!((a + b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        let tau = TorusModulus::new(c(0.0, 1.0)).unwrap();
        let tw = TwistPair::from_characteristics(0.25, 0.4);
        let z = c(0.7, 1.2);
        let h = 1e-5;
        let fd = (p1_series(&tw, z + h, &tau, &cfg()).unwrap() - p1_series(&tw, z - h, &tau, &cfg()).unwrap())
            / (2.0 * h);
        let p2 = p_k(&tw, 2, z, &tau, &cfg()).unwrap();
        assert!((p2 + fd).norm() < 1e-7, "{p2} vs {}", -fd);
    }

    #[test]
    fn multipliers_along_periods() {
        let tau = TorusModulus::new(c(-0.2, 0.8)).unwrap();
        let tw = TwistPair::from_characteristics(0.15, 0.35);
        let z = c(0.3, -0.6);
        let base = p1_theta(&tw, z, &tau, &cfg()).unwrap();
        let a = p1_theta(&tw, z + tau.lattice_point(0, 1), &tau, &cfg()).unwrap();
        let b = p1_theta(&tw, z + tau.lattice_point(1, 0), &tau, &cfg()).unwrap();
        assert!((a - tw.phi() * base).norm() < 1e-11 * base.norm());
        assert!((b - tw.theta() * base).norm() < 1e-11 * base.norm());
    }

    #[test]
    fn laurent_coefficients_are_eisenstein() {
        let tau = TorusModulus::new(c(0.2, 1.0)).unwrap();
        let tw = TwistPair::from_lambda(Complex64::from_polar(1.0, 1.1), 0.35).unwrap();
        let e = eisenstein_all(&tw, 6, &tau, &cfg()).unwrap();
        for n in 1..=6 {
            let coeff = circle_quadrature(c(0.0, 0.0), 0.5, 64, |_, z| {
                (p1_series(&tw, z, &tau, &cfg()).unwrap() - 1.0 / z) / z.powi(n as i32)
            })
            .unwrap();
            assert!((coeff + e[n - 1]).norm() < 1e-12, "n={n}");
        }
    }
}
