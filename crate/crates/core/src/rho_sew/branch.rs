//! Logarithms continued along paths, for the fractional powers in the torus kernels.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_HALVINGS: usize = 40;
const MAX_STEP_ARG: f64 = 0.5;

/// Continues `log f` along the straight segment from `z0` to `z1`, starting from `log_f0`
/// (a logarithm of `f(z0)`). Steps are halved until each increment of the argument is small.
pub fn continue_log(
    mut f: impl FnMut(Complex64) -> Result<Complex64>,
    z0: Complex64,
    z1: Complex64,
    log_f0: Complex64,
) -> Result<Complex64> {
    let mut t = 0.0f64;
    let mut dt = 0.125f64;
    let mut acc = log_f0;
    let mut prev = f(z0)?;
    if prev.norm() == 0.0 {
        return Err(Error::numerical("continuation starts at a zero"));
    }
    let mut halvings = 0;
    while t < 1.0 {
        let step = dt.min(1.0 - t);
        let next = f(z0 + (z1 - z0) * (t + step))?;
        if next.norm() == 0.0 || !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::numerical("continuation path meets a zero or pole"));
        }
        let ratio = next / prev;
        if ratio.arg().abs() > MAX_STEP_ARG || !(0.5..2.0).contains(&ratio.norm()) {
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::numerical("continuation path passes too close to a zero or pole"));
            }
            dt = step * 0.5;
            continue;
        }
        acc += ratio.ln();
        prev = next;
        t += step;
        dt = (step * 2.0).min(0.125);
    }
    Ok(acc)
}

/// Logarithm of a function sampled at equally spaced points on a circle, for a function that
/// is holomorphic and nonvanishing on the closed disc and equals 1 at its centre. The phase is
/// unwrapped around the circle and the branch is fixed by the mean-value property.
pub fn circle_logs(values: &[Complex64]) -> Result<Vec<Complex64>> {
    if values.is_empty() {
        return Err(Error::input("no samples"));
    }
    let phases = crate::numerics::unwrap_phase(values);
    let m = values.len() as f64;
    let closing = (values[0] / values[values.len() - 1]).arg();
    let total = phases[phases.len() - 1] + closing - phases[0];
    if total.abs() > 1e-6 {
        return Err(Error::numerical(format!(
            "sampled function winds {:.3} times around zero on the contour",
            total / (2.0 * PI)
        )));
    }
    let mut logs: Vec<Complex64> =
        values.iter().zip(&phases).map(|(v, &p)| Complex64::new(v.norm().ln(), p)).collect();
    let mean: f64 = phases.iter().sum::<f64>() / m;
    let shift = 2.0 * PI * (mean / (2.0 * PI)).round();
    for l in logs.iter_mut() {
        l.im -= shift;
    }
    Ok(logs)
}
