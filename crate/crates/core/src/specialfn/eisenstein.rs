use std::f64::consts::PI;

use num_complex::Complex64;

use super::series::{ln_factorial, terms_needed};
use super::types::{i2pi, TorusModulus, TwistPair};
use crate::error::{Error, Result};
use crate::numerics::{pairwise_sum, NumericConfig};

const SERIES_ABS_TOL: f64 = 1e-20;

// B_k / k! for k = 0..7
const SCALED_BERNOULLI: [f64; 8] = [1.0, -0.5, 1.0 / 12.0, 0.0, -1.0 / 720.0, 0.0, 1.0 / 30240.0, 0.0];

/// `B_n(lambda) / n!`, the coefficient of `z^{n-1}` in `e^{lambda z}/(e^z - 1)`.
///
/// Low orders use the polynomial expansion; from `n = 8` on the Fourier series
/// `-2 (2 pi)^{-n} sum_k cos(2 pi k lambda - n pi/2) / k^n` avoids the cancellation
/// in the polynomial (valid for `0 <= lambda <= 1`, so the argument is reduced first).
pub fn bernoulli_scaled(n: usize, lambda: f64) -> f64 {
    if n < SCALED_BERNOULLI.len() {
        let mut acc = 0.0;
        let mut inv_fact = 1.0;
        for j in 0..=n {
            // j indexes the power of lambda
            if j > 0 {
                inv_fact /= j as f64;
            }
            acc += SCALED_BERNOULLI[n - j] * lambda.powi(j as i32) * inv_fact;
        }
        return acc;
    }
    let x = lambda - lambda.floor();
    let mut terms = Vec::new();
    let mut k = 1usize;
    loop {
        let kk = k as f64;
        let w = kk.powi(-(n as i32));
        terms.push((2.0 * PI * kk * x - n as f64 * PI / 2.0).cos() * w);
        if w < 1e-19 {
            break;
        }
        k += 1;
    }
    -2.0 * (2.0 * PI).powi(-(n as i32)) * crate::numerics::pairwise_sum_real(&terms)
}

/// Bernoulli polynomial `B_n(lambda)`.
pub fn bernoulli_poly(n: usize, lambda: f64) -> f64 {
    if n < SCALED_BERNOULLI.len() || (lambda >= 0.0 && lambda <= 1.0) {
        bernoulli_scaled(n, lambda) * ln_factorial(n).exp()
    } else {
        // outside [0, 1] the Fourier route would return the periodic extension
        let b: Vec<f64> = (0..=n).map(|k| bernoulli_number(k)).collect();
        let mut acc = 0.0;
        let mut binom = 1.0;
        for k in 0..=n {
            acc += binom * b[k] * lambda.powi((n - k) as i32);
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        acc
    }
}

fn bernoulli_number(k: usize) -> f64 {
    bernoulli_scaled(k, 0.0) * ln_factorial(k).exp()
}

/// Twisted Eisenstein series `E_n[theta; phi](tau)` for `n = 1..=nmax`.
///
/// When `lambda = 0` the `r = 0` term of the first sum carries the factor
/// `0^{n-1}`; it is dropped for `n >= 2`, and for `n = 1` it is resonant exactly
/// when `theta = 1`.
pub fn eisenstein_all(tw: &TwistPair, nmax: usize, tau: &TorusModulus, cfg: &NumericConfig) -> Result<Vec<Complex64>> {
    eisenstein_range(tw, 1, nmax, tau, cfg)
}

/// Single twisted Eisenstein series.
pub fn eisenstein_twisted(tw: &TwistPair, n: usize, tau: &TorusModulus, cfg: &NumericConfig) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::input("Eisenstein index must be at least 1"));
    }
    Ok(eisenstein_range(tw, n, n, tau, cfg)?[0])
}

fn eisenstein_range(
    tw: &TwistPair,
    nmin: usize,
    nmax: usize,
    tau: &TorusModulus,
    cfg: &NumericConfig,
) -> Result<Vec<Complex64>> {
    if nmin == 0 || nmax < nmin {
        return Err(Error::input("Eisenstein index range must start at 1"));
    }
    let lam = tw.lambda();
    let th = tw.theta();
    let thinv = th.conj();
    let qabs = tau.q().norm();
    let count = nmax - nmin + 1;
    let mut first: Vec<Vec<Complex64>> = vec![Vec::new(); count];
    let mut second: Vec<Vec<Complex64>> = vec![Vec::new(); count];

    let r1 = terms_needed(qabs, qabs, lam, nmax - 1, SERIES_ABS_TOL)?;
    for r in 0..r1 {
        let s = r as f64 + lam;
        if s == 0.0 && nmin >= 2 {
            continue;
        }
        let qs = (i2pi() * tau.tau() * s).exp();
        let den = 1.0 - thinv * qs;
        if den.norm() < cfg.resonance_guard {
            return Err(Error::domain(format!(
                "resonant Eisenstein denominator at r = {r} (|1 - theta^-1 q^(r+lambda)| = {:.3e})",
                den.norm()
            )));
        }
        let base = thinv * qs / den;
        for (idx, n) in (nmin..=nmax).enumerate() {
            if s == 0.0 && n >= 2 {
                continue;
            }
            let w = if n == 1 { 1.0 } else { (((n - 1) as f64) * s.ln() - ln_factorial(n - 1)).exp() };
            first[idx].push(base * w);
        }
    }
    let r2 = terms_needed(qabs, qabs, 1.0 - lam, nmax - 1, SERIES_ABS_TOL)?;
    for r in 1..=r2 {
        let s = r as f64 - lam;
        let qs = (i2pi() * tau.tau() * s).exp();
        let den = 1.0 - th * qs;
        if den.norm() < cfg.resonance_guard {
            return Err(Error::domain(format!("resonant Eisenstein denominator at r = {r}")));
        }
        let base = th * qs / den;
        for (idx, n) in (nmin..=nmax).enumerate() {
            let w = (((n - 1) as f64) * s.ln() - ln_factorial(n - 1)).exp();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            second[idx].push(base * (w * sign));
        }
    }
    let mut out = Vec::with_capacity(count);
    for (idx, n) in (nmin..=nmax).enumerate() {
        let v = -bernoulli_scaled(n, lam) + pairwise_sum(&first[idx]) + pairwise_sum(&second[idx]);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::numerical(format!("non-finite Eisenstein value at n = {n}")));
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn first_bernoulli_polynomials() {
        for &l in &[0.0, 0.3, 0.75] {
            assert!((bernoulli_poly(1, l) - (l - 0.5)).abs() < 1e-15);
            assert!((bernoulli_poly(2, l) - (l * l - l + 1.0 / 6.0)).abs() < 1e-15);
        }
        assert!((bernoulli_poly(2, 0.0) - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn generating_function_partial_sum() {
        let (z, l): (f64, f64) = (0.1, 0.3);
        let exact = (l * z).exp() / (z.exp() - 1.0) - 1.0 / z;
        let partial: f64 = (1..=8).map(|n| bernoulli_scaled(n, l) * z.powi(n as i32 - 1)).sum();
        assert!((exact - partial).abs() < 1e-9);
    }

    #[test]
    fn polynomial_and_fourier_routes_meet() {
        // both formulas evaluated at n = 8..12 against the exact recurrence in rationals
        // B_8 = -1/30, B_10 = 5/66, B_12 = -691/2730
        let exact = [(8usize, -1.0 / 30.0), (10, 5.0 / 66.0), (12, -691.0 / 2730.0)];
        for (n, b) in exact {
            assert!((bernoulli_poly(n, 0.0) - b).abs() < 1e-13 * b.abs(), "n={n}");
        }
        // Fourier route vs direct polynomial at an interior point
        let l: f64 = 0.37;
        let nums: Vec<f64> = (0..=9).map(bernoulli_number).collect();
        let mut direct = 0.0;
        let mut binom = 1.0;
        for k in 0..=9 {
            direct += binom * nums[k] * l.powi(9 - k as i32);
            binom = binom * (9 - k) as f64 / (k + 1) as f64;
        }
        assert!((bernoulli_poly(9, l) - direct).abs() < 1e-12);
    }

    #[test]
    fn odd_untwisted_series_vanish() {
        let tau = TorusModulus::new(c(0.1, 1.0)).unwrap();
        let tw = TwistPair::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        for n in [3, 5, 7] {
            let e = eisenstein_twisted(&tw, n, &tau, &NumericConfig::default()).unwrap();
            assert!(e.norm() < 1e-14, "n={n}: {e}");
        }
        assert!(eisenstein_twisted(&tw, 1, &tau, &NumericConfig::default()).is_err());
    }

    #[test]
    fn untwisted_e2_is_the_classical_series() {
        // E_2 = -1/12 + 2 sum sigma_1(n) q^n in this normalization
        let tau = TorusModulus::new(c(0.0, 0.8)).unwrap();
        let tw = TwistPair::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let e2 = eisenstein_twisted(&tw, 2, &tau, &NumericConfig::default()).unwrap();
        let q = tau.q();
        let mut s = c(0.0, 0.0);
        for n in 1..200u32 {
            let sigma: u32 = (1..=n).filter(|d| n % d == 0).sum();
            s += q.powu(n) * sigma as f64;
        }
        let expected = -1.0 / 12.0 + 2.0 * s;
        assert!((e2 - expected).norm() < 1e-14);
    }

    #[test]
    fn small_nome_limit_of_e1() {
        // E_1 + B_1(lambda) is dominated by theta^{-1} q^lambda - theta q^{1-lambda}
        let tau = TorusModulus::new(c(0.0, (1e8f64).ln() / (2.0 * PI))).unwrap();
        let qa: f64 = 1e-8;
        for &l in &[0.2, 0.5, 0.9] {
            let th = c(-1.0, 0.0);
            let tw = TwistPair::from_lambda(th, l).unwrap();
            let e1 = eisenstein_twisted(&tw, 1, &tau, &NumericConfig::default()).unwrap();
            let lead = th.conj() * qa.powf(l) - th * qa.powf(1.0 - l);
            let next = qa.powf(2.0 * l.min(1.0 - l));
            assert!((e1 + (l - 0.5) - lead).norm() < 2.0 * next, "lambda={l}");
        }
    }
}
