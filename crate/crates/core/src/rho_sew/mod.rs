//! Self-sewing through `z_1 z_2 = rho`: the torus built from the sphere, and a genus-two
//! surface built from a torus with two punctures at `0` and `w`.

mod branch;
mod sphere;
mod torus;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specialfn::{prime_form_k, TorusModulus, TwistPair};
use crate::numerics::NumericConfig;

pub use crate::epsilon_sew::Xi;
pub use branch::{circle_logs, continue_log};
pub use sphere::{
    det_i_minus_t_sphere, s_kappa_sphere, sphere_h, sphere_hbar, sphere_t, torus_from_sphere, SphereDet,
};
pub use torus::{
    integral_equation_residual_rho, s_kappa_torus, szego_genus2_rho, RhoOptions, RhoTorusSewing,
};

/// Fraction of `min(D(q), min |w - lambda|)` used as the outer annulus radius at each puncture.
pub const RADIUS_FRACTION: f64 = 0.45;

/// Multipliers `(theta, phi)` on the new handle, with `phi = -e^{2 pi i kappa}`, `kappa` in `[-1/2, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandleTwist {
    tw: TwistPair,
}

impl HandleTwist {
    pub fn new(theta: Complex64, phi: Complex64) -> Result<Self> {
        Ok(Self { tw: TwistPair::new(theta, phi)? })
    }

    pub fn from_kappa(theta: Complex64, kappa: f64) -> Result<Self> {
        Ok(Self { tw: TwistPair::from_lambda(theta, kappa + 0.5)? })
    }

    pub fn theta(&self) -> Complex64 {
        self.tw.theta()
    }

    pub fn phi(&self) -> Complex64 {
        self.tw.phi()
    }

    pub fn kappa(&self) -> f64 {
        self.tw.kappa()
    }

    pub fn is_half(&self) -> bool {
        self.tw.lambda() == 0.0
    }

    pub fn inverse(&self) -> Self {
        Self { tw: self.tw.inverse() }
    }

    /// The same multipliers read as a genus-one pair (`lambda = kappa + 1/2`).
    pub fn as_twist(&self) -> TwistPair {
        self.tw
    }
}

/// `k_a = k + (-1)^{abar} kappa`: `k + kappa` on puncture 1 and `k - kappa` on puncture 2.
pub fn index_shift(a: usize, k: usize, kappa: f64) -> f64 {
    if a == 1 {
        k as f64 + kappa
    } else {
        k as f64 - kappa
    }
}

/// Sewing parameter for the sphere, stored through `log q` so that fractional powers are unambiguous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoModuliSphere {
    log_q: Complex64,
    pub xi: Xi,
}

impl RhoModuliSphere {
    /// Principal logarithm of `q`.
    pub fn new(q: Complex64, xi: Xi) -> Result<Self> {
        if !(q.re.is_finite() && q.im.is_finite()) || q.norm() == 0.0 {
            return Err(Error::input("q must be finite and nonzero"));
        }
        Self::from_log(q.ln(), xi)
    }

    /// `q = e^{2 pi i tau}`.
    pub fn from_tau(tau: &TorusModulus, xi: Xi) -> Result<Self> {
        Self::from_log(Complex64::new(0.0, 2.0 * PI) * tau.tau(), xi)
    }

    pub fn from_log(log_q: Complex64, xi: Xi) -> Result<Self> {
        if !(log_q.re.is_finite() && log_q.im.is_finite()) {
            return Err(Error::input("log q must be finite"));
        }
        if !(log_q.re < 0.0) {
            return Err(Error::domain(format!("|q| = {:.6} is not below 1", log_q.re.exp())));
        }
        Ok(Self { log_q, xi })
    }

    pub fn q(&self) -> Complex64 {
        self.log_q.exp()
    }

    pub fn log_q(&self) -> Complex64 {
        self.log_q
    }

    pub fn sqrt_q(&self) -> Complex64 {
        (self.log_q * 0.5).exp()
    }

    /// `q^p` on the recorded branch.
    pub fn pow(&self, p: f64) -> Complex64 {
        (self.log_q * p).exp()
    }
}

/// Moduli `(tau, w, rho)` of a self-sewn torus with its branch data.
///
/// `log_rho` fixes every fractional power of `rho`. `handle_log` is the leading part of
/// `2 pi i Omega_22`, i.e. a logarithm of `-rho / K(w)^2`; it records which sheet of the
/// covering space the point lies on and is transported exactly by the modular actions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoModuliTorus {
    pub tau: TorusModulus,
    w: Complex64,
    log_rho: Complex64,
    handle_log: Complex64,
    pub xi: Xi,
}

impl RhoModuliTorus {
    /// Principal `log rho` and the canonical `handle_log = log rho + i pi - 2 Log K(w)`.
    pub fn new(tau: TorusModulus, w: Complex64, rho: Complex64, xi: Xi, cfg: &NumericConfig) -> Result<Self> {
        if !(rho.re.is_finite() && rho.im.is_finite()) || rho.norm() == 0.0 {
            return Err(Error::input("rho must be finite and nonzero"));
        }
        Self::from_log_rho(tau, w, rho.ln(), xi, cfg)
    }

    pub fn from_log_rho(
        tau: TorusModulus,
        w: Complex64,
        log_rho: Complex64,
        xi: Xi,
        cfg: &NumericConfig,
    ) -> Result<Self> {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::input("w must be finite"));
        }
        if !(log_rho.re.is_finite() && log_rho.im.is_finite()) {
            return Err(Error::input("log rho must be finite"));
        }
        let k = prime_form_k(w, &tau, cfg)?;
        if k.norm() == 0.0 {
            return Err(Error::domain("w lies on the lattice"));
        }
        let handle_log = log_rho + Complex64::new(0.0, PI) - 2.0 * k.ln();
        Self::with_branch_data(tau, w, log_rho, handle_log, xi)
    }

    /// Fully explicit branch data, as produced by the modular actions.
    pub fn with_branch_data(
        tau: TorusModulus,
        w: Complex64,
        log_rho: Complex64,
        handle_log: Complex64,
        xi: Xi,
    ) -> Result<Self> {
        for (name, v) in [("w", w), ("log rho", log_rho), ("handle log", handle_log)] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::input(format!("{name} must be finite")));
            }
        }
        let m = Self { tau, w, log_rho, handle_log, xi };
        let d = m.puncture_distance();
        let s = m.rho().norm().sqrt();
        if !(d > 2.0 * s) {
            return Err(Error::domain(format!(
                "min |w - lambda| = {d:.6e} must exceed 2 |rho|^(1/2) = {:.6e}",
                2.0 * s
            )));
        }
        if !(s < m.radius()) {
            return Err(Error::domain(format!(
                "|rho|^(1/2) = {s:.6e} is not below the annulus radius {:.6e}",
                m.radius()
            )));
        }
        Ok(m)
    }

    pub fn w(&self) -> Complex64 {
        self.w
    }

    pub fn rho(&self) -> Complex64 {
        self.log_rho.exp()
    }

    pub fn log_rho(&self) -> Complex64 {
        self.log_rho
    }

    pub fn sqrt_rho(&self) -> Complex64 {
        (self.log_rho * 0.5).exp()
    }

    pub fn handle_log(&self) -> Complex64 {
        self.handle_log
    }

    /// `rho^p` on the recorded branch.
    pub fn rho_pow(&self, p: f64) -> Complex64 {
        (self.log_rho * p).exp()
    }

    /// `handle_log - log rho`: the offset between the local logarithms at the two punctures.
    pub fn puncture_log(&self) -> Complex64 {
        self.handle_log - self.log_rho
    }

    /// `min_lambda |w - lambda|`.
    pub fn puncture_distance(&self) -> f64 {
        let (wr, _, _) = self.tau.reduce(self.w);
        let mut best = f64::INFINITY;
        for m in -2..=2 {
            for n in -2..=2 {
                best = best.min((wr - self.tau.lattice_point(m, n)).norm());
            }
        }
        best
    }

    /// Outer radius of both annuli.
    pub fn radius(&self) -> f64 {
        RADIUS_FRACTION * crate::epsilon_sew::min_lattice_distance(&self.tau).min(self.puncture_distance())
    }

    /// Geometric mean of the annulus bounds `|rho| / r` and `r`, i.e. `|rho|^{1/2}`.
    pub fn contour_radius(&self) -> f64 {
        self.rho().norm().sqrt()
    }

}
