//! The torus obtained by sewing the Riemann sphere to itself at `0` and `infinity`.
//!
//! Everything here is closed form: the moment matrix is diagonal.

use num_complex::Complex64;

use super::{index_shift, HandleTwist, RhoModuliSphere};
use crate::error::{Error, Result};
use crate::numerics::{determinant, ComplexMatrix};

fn check_point(name: &str, z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::input(format!("{name} must be finite")));
    }
    if z.norm() == 0.0 {
        return Err(Error::domain(format!("{name} sits on the puncture at 0")));
    }
    Ok(())
}

fn half_term(handle: &HandleTwist) -> Result<Complex64> {
    let th = handle.theta();
    let den = 1.0 - th;
    if den.norm() < 1e-14 {
        return Err(Error::domain("theta = 1 with kappa = -1/2 makes 1 - theta vanish"));
    }
    Ok(th / den)
}

/// Genus-zero kernel with the handle twist, as the coefficient of `dx^{1/2} dy^{1/2}`.
/// Powers take the principal branch.
pub fn s_kappa_sphere(handle: &HandleTwist, x: Complex64, y: Complex64) -> Result<Complex64> {
    check_point("x", x)?;
    check_point("y", y)?;
    s_kappa_log(handle, x.ln(), y.ln())
}

// Same kernel with explicit logarithms for x and y.
fn s_kappa_log(handle: &HandleTwist, lx: Complex64, ly: Complex64) -> Result<Complex64> {
    let (x, y) = (lx.exp(), ly.exp());
    if (x - y).norm() == 0.0 {
        return Err(Error::domain("x = y is the pole of the kernel"));
    }
    let k = handle.kappa();
    let mut s = (k * (lx - ly)).exp() / (x - y);
    if handle.is_half() {
        s += half_term(handle)? * (-0.5 * (lx + ly)).exp();
    }
    Ok(s)
}

fn sign_xi(moduli: &RhoModuliSphere) -> Complex64 {
    moduli.xi.value()
}

fn h_log(handle: &HandleTwist, moduli: &RhoModuliSphere, a: usize, k: usize, lx: Complex64) -> Complex64 {
    let kap = handle.kappa();
    let ka = index_shift(a, k, kap);
    let qp = moduli.pow(0.5 * (ka - 0.5));
    if a == 1 {
        -sign_xi(moduli) * qp * ((k as f64 + kap - 1.0) * lx).exp()
    } else {
        qp * ((kap - k as f64) * lx).exp()
    }
}

fn hbar_log(handle: &HandleTwist, moduli: &RhoModuliSphere, a: usize, k: usize, ly: Complex64) -> Complex64 {
    let kap = handle.kappa();
    let ka = index_shift(a, k, kap);
    let qp = moduli.pow(0.5 * (ka - 0.5));
    if a == 1 {
        -qp * ((-(k as f64) - kap) * ly).exp()
    } else {
        sign_xi(moduli) * qp * ((k as f64 - kap - 1.0) * ly).exp()
    }
}

fn check_index(a: usize, k: usize) -> Result<()> {
    if a != 1 && a != 2 {
        return Err(Error::input(format!("puncture label must be 1 or 2, got {a}")));
    }
    if k == 0 {
        return Err(Error::input("moment index starts at 1"));
    }
    Ok(())
}

/// `h_a(k, x)`: puncture 1 is `infinity` (coordinate `1/x`), puncture 2 is `0`.
pub fn sphere_h(handle: &HandleTwist, moduli: &RhoModuliSphere, a: usize, k: usize, x: Complex64) -> Result<Complex64> {
    check_index(a, k)?;
    check_point("x", x)?;
    Ok(h_log(handle, moduli, a, k, x.ln()))
}

/// `hbar_a(k, y)`.
pub fn sphere_hbar(
    handle: &HandleTwist,
    moduli: &RhoModuliSphere,
    a: usize,
    k: usize,
    y: Complex64,
) -> Result<Complex64> {
    check_index(a, k)?;
    check_point("y", y)?;
    Ok(hbar_log(handle, moduli, a, k, y.ln()))
}

fn t_diagonal(handle: &HandleTwist, moduli: &RhoModuliSphere, order: usize) -> Vec<Complex64> {
    let kap = handle.kappa();
    let th = handle.theta();
    let mut d = Vec::with_capacity(2 * order);
    for k in 1..=order {
        d.push(th.conj() * moduli.pow(index_shift(1, k, kap) - 0.5));
    }
    for k in 1..=order {
        d.push(th * moduli.pow(index_shift(2, k, kap) - 0.5));
    }
    d
}

/// The `2N x 2N` moment matrix `T`, diagonal with entries `theta^{a - abar} q^{k_a - 1/2}`.
pub fn sphere_t(handle: &HandleTwist, moduli: &RhoModuliSphere, order: usize) -> Result<ComplexMatrix> {
    if order == 0 {
        return Err(Error::input("truncation order must be at least 1"));
    }
    Ok(ComplexMatrix::diagonal(&t_diagonal(handle, moduli, order)))
}

/// `det(I - T)` two ways: the closed-form product and the determinant of the truncated matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereDet {
    pub product: Complex64,
    pub matrix: Complex64,
}

pub fn det_i_minus_t_sphere(handle: &HandleTwist, moduli: &RhoModuliSphere, order: usize) -> Result<SphereDet> {
    let t = sphere_t(handle, moduli, order)?;
    let matrix = determinant(&t.identity_minus()?)?;
    let kap = handle.kappa();
    let th = handle.theta();
    let mut product = Complex64::new(1.0, 0.0);
    for k in 1..=order {
        let kf = k as f64;
        product *= (1.0 - th.conj() * moduli.pow(kf + kap - 0.5)) * (1.0 - th * moduli.pow(kf - kap - 0.5));
    }
    Ok(SphereDet { product, matrix })
}

/// Torus kernel from the sewn sphere, in logarithmic coordinates `x = e^X`, `y = e^Y`.
///
/// Returns the kernel times `(xy)^{1/2}`, which is the coefficient of `dX^{1/2} dY^{1/2}`.
pub fn torus_from_sphere(
    handle: &HandleTwist,
    log_x: Complex64,
    log_y: Complex64,
    moduli: &RhoModuliSphere,
    order: usize,
) -> Result<Complex64> {
    if order == 0 {
        return Err(Error::input("truncation order must be at least 1"));
    }
    for (name, v) in [("X", log_x), ("Y", log_y)] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::input(format!("{name} must be finite")));
        }
    }
    // the sewn annulus is |q|^{1/2} < |x| < |q|^{-1/2} with both discs removed
    let bound = -0.5 * moduli.log_q().re;
    if log_x.re.abs() >= bound || log_y.re.abs() >= bound {
        return Err(Error::domain("points must satisfy |q|^(1/2) < |x|, |y| < |q|^(-1/2)"));
    }
    // At kappa = -1/2 the k = 1 mode at puncture 1 has T entry theta^{-1}, which is not small.
    // It is absorbed into the genus-zero kernel x^{1/2} y^{-1/2} / (x - y) + theta / (1 - theta) (xy)^{-1/2}
    // and dropped from the sums.
    let half = handle.is_half();
    let base = if half {
        let (x, y) = (log_x.exp(), log_y.exp());
        if (x - y).norm() == 0.0 {
            return Err(Error::domain("x = y is the pole of the kernel"));
        }
        (0.5 * (log_x - log_y)).exp() / (x - y) + half_term(handle)? * (-0.5 * (log_x + log_y)).exp()
    } else {
        s_kappa_log(handle, log_x, log_y)?
    };
    let diag = t_diagonal(handle, moduli, order);
    let th = handle.theta();
    let xi = sign_xi(moduli);
    let mut corr = Vec::with_capacity(2 * order);
    for k in (if half { 2 } else { 1 })..=order {
        let d = th.conj() / (1.0 - diag[k - 1]);
        corr.push(h_log(handle, moduli, 1, k, log_x) * d * hbar_log(handle, moduli, 1, k, log_y));
    }
    for k in 1..=order {
        let d = -th / (1.0 - diag[order + k - 1]);
        corr.push(h_log(handle, moduli, 2, k, log_x) * d * hbar_log(handle, moduli, 2, k, log_y));
    }
    for (i, v) in diag.iter().enumerate().skip(usize::from(half)) {
        if (1.0 - v).norm() < 1e-14 {
            return Err(Error::domain(format!("resonant diagonal entry {i} of I - T")));
        }
    }
    let s = base + xi * crate::numerics::pairwise_sum(&corr);
    Ok(s * (0.5 * (log_x + log_y)).exp())
}
