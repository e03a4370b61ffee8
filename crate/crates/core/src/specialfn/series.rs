//! Term counts for the `q`-series sums `sum_r (r+s)^j / j! * rho^{r+s}`.

use crate::error::{Error, Result};

const MAX_TERMS: usize = 1_000_000;

pub(crate) fn ln_factorial(j: usize) -> f64 {
    (2..=j).map(|i| (i as f64).ln()).sum()
}

/// Number of terms `r = 0..R` after which every tail
/// `sum_{r >= R} (r+shift)^j / j! * rho^{r+shift}`, `j <= jmax`, is below `tol`.
/// Denominators `1 - c q^{r+shift}` are accounted for by the factor `1/(1 - qabs)`.
pub(crate) fn terms_needed(rho: f64, qabs: f64, shift: f64, jmax: usize, tol: f64) -> Result<usize> {
    if !(rho < 1.0) || !(qabs < 1.0) {
        return Err(Error::numerical(format!("q-series does not converge (ratio {rho})")));
    }
    if rho == 0.0 {
        return Ok(1);
    }
    let lnrho = rho.ln();
    let lnfac: Vec<f64> = (0..=jmax).map(ln_factorial).collect();
    let target = (tol * (1.0 - qabs)).ln();
    for r in 0..MAX_TERMS {
        let s = r as f64 + shift;
        if s <= 0.0 {
            continue;
        }
        let mut ok = true;
        for j in 0..=jmax {
            let ratio = rho * ((s + 1.0) / s).powi(j as i32);
            if ratio >= 1.0 {
                ok = false;
                break;
            }
            // tail after the term at s, bounded by a geometric series in `ratio`
            let ln_next = j as f64 * (s + 1.0).ln() - lnfac[j] + (s + 1.0) * lnrho;
            if ln_next - (1.0 - ratio).ln() > target {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(r + 1);
        }
    }
    Err(Error::numerical(format!("q-series needs more than {MAX_TERMS} terms (ratio {rho})")))
}
