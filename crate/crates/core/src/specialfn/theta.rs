//! Theta functions with real characteristics in the `2 pi i`-periodic normalization
//! `sum_m exp(i pi (m+a).Omega.(m+a) + (m+a).(z + 2 pi i b))`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::types::{i2pi, Characteristics, PeriodMatrix, TorusModulus};
use crate::error::{Error, Result};
use crate::numerics::{pairwise_sum, NumericConfig};

pub const MAX_BOX_RADIUS: usize = 64;

/// Bound on the sum of all terms outside the box of half-width `r`, relative to
/// the largest possible term. Uses `|n - n*|_2 >= j - 1/2` on the shell at
/// sup-distance `j` from the rounded centre.
fn relative_tail_bound(g: usize, min_eig: f64, r: usize) -> f64 {
    let mut total = 0.0;
    for j in (r + 1)..(r + 400) {
        let shell = 2.0 * g as f64 * (2.0 * j as f64 + 1.0).powi(g as i32 - 1);
        let d = j as f64 - 0.5;
        let t = shell * (-PI * min_eig * d * d).exp();
        total += t;
        if t < total * 1e-18 || t == 0.0 {
            break;
        }
    }
    total
}

/// Smallest half-width `>= trunc` whose Gaussian tail bound is below `tol`.
pub fn box_radius(g: usize, min_eig: f64, trunc: usize, tol: f64) -> Result<usize> {
    let mut r = trunc.max(1);
    while relative_tail_bound(g, min_eig, r) > tol {
        r += 1;
        if r > MAX_BOX_RADIUS {
            return Err(Error::numerical(format!(
                "theta sum needs a box radius above {MAX_BOX_RADIUS} (min eigenvalue of Im Omega = {min_eig:.3e})"
            )));
        }
    }
    Ok(r)
}

/// Theta function of any genus, summed over a box centred on the dominant lattice term.
pub fn theta_char(
    chars: &Characteristics,
    z: &[Complex64],
    omega: &PeriodMatrix,
    trunc: usize,
    cfg: &NumericConfig,
) -> Result<Complex64> {
    let g = omega.genus();
    if chars.genus() != g || z.len() != g {
        return Err(Error::input("genus mismatch between characteristics, argument and period matrix"));
    }
    if trunc == 0 {
        return Err(Error::input("theta truncation must be at least 1"));
    }
    if z.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::input("theta argument must be finite"));
    }
    let r = box_radius(g, omega.min_eig_im(), trunc, cfg.theta_tol)? as i64;
    let re_z = DVector::from_iterator(g, z.iter().map(|v| v.re / (2.0 * PI)));
    let nstar = omega.im_inverse() * re_z;
    let center: Vec<i64> = (0..g).map(|i| (nstar[i] - chars.alpha()[i]).round() as i64).collect();
    let shifted: Vec<Complex64> =
        (0..g).map(|i| z[i] + i2pi() * chars.beta()[i]).collect();

    let side = (2 * r + 1) as usize;
    let count = side.pow(g as u32);
    let mut terms = Vec::with_capacity(count);
    let mut n = vec![0.0; g];
    for idx in 0..count {
        let mut rest = idx;
        for i in 0..g {
            let off = (rest % side) as i64 - r;
            rest /= side;
            n[i] = (center[i] + off) as f64 + chars.alpha()[i];
        }
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                quad += omega.entry(i, j) * (n[i] * n[j]);
            }
        }
        let lin: Complex64 = (0..g).map(|i| shifted[i] * n[i]).sum();
        terms.push((Complex64::new(0.0, PI) * quad + lin).exp());
    }
    Ok(pairwise_sum(&terms))
}

/// Genus-one theta value and its `z`-derivative.
pub fn theta_genus_one(
    alpha: f64,
    beta: f64,
    z: Complex64,
    tau: &TorusModulus,
    cfg: &NumericConfig,
) -> Result<(Complex64, Complex64)> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::input("theta argument must be finite"));
    }
    let t = tau.tau();
    let r = box_radius(1, t.im, 1, cfg.theta_tol)? as i64;
    let center = (z.re / (2.0 * PI * t.im) - alpha).round() as i64;
    let shifted = z + i2pi() * beta;
    let ipt = Complex64::new(0.0, PI) * t;
    let mut vals = Vec::with_capacity((2 * r + 1) as usize);
    let mut ders = Vec::with_capacity((2 * r + 1) as usize);
    for m in (center - r)..=(center + r) {
        let n = m as f64 + alpha;
        let term = (ipt * (n * n) + shifted * n).exp();
        vals.push(term);
        ders.push(term * n);
    }
    Ok((pairwise_sum(&vals), pairwise_sum(&ders)))
}

/// `d/dz theta_1(0)` for `theta_1 = theta[1/2; 1/2]`.
pub fn theta1_prime_zero(tau: &TorusModulus, cfg: &NumericConfig) -> Result<Complex64> {
    let (_, d) = theta_genus_one(0.5, 0.5, Complex64::new(0.0, 0.0), tau, cfg)?;
    if d.norm() == 0.0 {
        return Err(Error::numerical("theta_1'(0) evaluated to zero"));
    }
    Ok(d)
}

/// Genus-one prime-form factor `K(z) = theta_1(z) / theta_1'(0)`.
///
/// Returns (numerically) zero on lattice points; callers guard poles of `1/K`.
pub fn prime_form_k(z: Complex64, tau: &TorusModulus, cfg: &NumericConfig) -> Result<Complex64> {
    let (v, _) = theta_genus_one(0.5, 0.5, z, tau, cfg)?;
    Ok(v / theta1_prime_zero(tau, cfg)?)
}
