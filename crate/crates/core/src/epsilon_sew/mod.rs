//! Two tori sewn through `z_1 z_2 = epsilon`: moment matrices, the block solve and
//! the resulting genus-two Szegő kernel.

mod kernel;
mod moments;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specialfn::{TorusModulus, TwistPair};

pub use kernel::{
    integral_equation_residual, szego_genus2_eps, EpsilonSewing, INTEGRAL_EQUATION_QUAD_POINTS,
};
pub use moments::{
    build_q, c_matrix, det_i_minus_q, det_i_minus_q_full, f_matrix, f_matrix_quadrature, h_vector, hbar_vector,
    log_det_series, min_lattice_distance, solve_x, solve_x_neumann, spectral_radius_estimate, DetReport,
};

/// Fraction of the minimal lattice distance used as the disc radius on each torus.
pub const RADIUS_FRACTION: f64 = 0.45;

/// Square-root branch for `dz_a^{1/2}` across the sewing annulus: `xi = +i` or `-i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Xi {
    PlusI,
    MinusI,
}

impl Xi {
    pub fn value(self) -> Complex64 {
        match self {
            Xi::PlusI => Complex64::new(0.0, 1.0),
            Xi::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Xi::PlusI => Xi::MinusI,
            Xi::MinusI => Xi::PlusI,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "+i" | "i" => Ok(Xi::PlusI),
            "-i" => Ok(Xi::MinusI),
            other => Err(Error::input(format!("xi must be +i or -i, got {other:?}"))),
        }
    }
}

impl std::fmt::Display for Xi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Xi::PlusI => "+i",
            Xi::MinusI => "-i",
        })
    }
}

/// A point `(tau_1, tau_2, epsilon)` of the sewing domain with its recorded branch data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonModuli {
    pub tau1: TorusModulus,
    pub tau2: TorusModulus,
    epsilon: Complex64,
    sqrt_epsilon: Complex64,
    pub xi: Xi,
}

impl EpsilonModuli {
    /// Uses the principal square root of `epsilon`.
    pub fn new(tau1: TorusModulus, tau2: TorusModulus, epsilon: Complex64, xi: Xi) -> Result<Self> {
        Self::with_sqrt(tau1, tau2, epsilon.sqrt(), xi)
    }

    /// Builds from an explicit root; `epsilon` is its square.
    pub fn with_sqrt(tau1: TorusModulus, tau2: TorusModulus, sqrt_epsilon: Complex64, xi: Xi) -> Result<Self> {
        if !(sqrt_epsilon.re.is_finite() && sqrt_epsilon.im.is_finite()) {
            return Err(Error::input("epsilon must be finite"));
        }
        let m = Self { tau1, tau2, epsilon: sqrt_epsilon * sqrt_epsilon, sqrt_epsilon, xi };
        let bound = m.bound();
        if !(m.epsilon.norm() < bound) {
            return Err(Error::domain(format!(
                "|epsilon| = {:.6e} is not below D(q1) D(q2) / 4 = {bound:.6e}",
                m.epsilon.norm()
            )));
        }
        Ok(m)
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }

    pub fn sqrt_epsilon(&self) -> Complex64 {
        self.sqrt_epsilon
    }

    /// `epsilon^{1/4}`, taken as the principal root of the recorded `sqrt_epsilon`.
    pub fn quarter_epsilon(&self) -> Complex64 {
        self.sqrt_epsilon.sqrt()
    }

    /// Domain bound `D(q_1) D(q_2) / 4`.
    pub fn bound(&self) -> f64 {
        0.25 * min_lattice_distance(&self.tau1) * min_lattice_distance(&self.tau2)
    }

    pub fn tau(&self, which: usize) -> &TorusModulus {
        if which == 1 {
            &self.tau1
        } else {
            &self.tau2
        }
    }

    /// Disc radius `r_a` around the puncture on torus `a`.
    pub fn radius(&self, which: usize) -> f64 {
        RADIUS_FRACTION * min_lattice_distance(self.tau(which))
    }

    /// The same surface after a Dehn twist: both branch choices flipped.
    pub fn dehn_twisted(&self) -> Self {
        Self { sqrt_epsilon: -self.sqrt_epsilon, xi: self.xi.flipped(), ..*self }
    }

    /// Only the square root flipped (not a symmetry by itself).
    pub fn with_negated_sqrt(&self) -> Self {
        Self { sqrt_epsilon: -self.sqrt_epsilon, ..*self }
    }

    /// Circle radius for contours around the puncture on torus `a`: the geometric
    /// mean of the annulus bounds `|epsilon| / r_abar` and `r_a`.
    pub fn contour_radius(&self, which: usize) -> f64 {
        let other = 3 - which;
        (self.epsilon.norm() / self.radius(other) * self.radius(which)).sqrt()
    }
}

/// A point on one of the two punctured tori, in that torus' coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub which: usize,
    pub z: Complex64,
}

impl SurfacePoint {
    pub fn new(which: usize, z: Complex64) -> Result<Self> {
        if which != 1 && which != 2 {
            return Err(Error::input(format!("torus label must be 1 or 2, got {which}")));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::input("point coordinate must be finite"));
        }
        Ok(Self { which, z })
    }

    /// Point with lattice coordinates `(u, v)`: `z = 2 pi i (u + v tau_a)`.
    pub fn from_lattice(which: usize, u: f64, v: f64, moduli: &EpsilonModuli) -> Result<Self> {
        Self::new(which, moduli.tau(which).from_lattice_coords(u, v))
    }

    /// Rejects points inside the excised disc `|z| <= |epsilon| / r_abar` (modulo the lattice).
    pub fn validate(&self, moduli: &EpsilonModuli) -> Result<()> {
        let (zr, _, _) = moduli.tau(self.which).reduce(self.z);
        let inner = moduli.epsilon().norm() / moduli.radius(3 - self.which);
        if zr.norm() <= inner || zr.norm() == 0.0 {
            return Err(Error::domain(format!(
                "point {} on torus {} lies in the excised disc of radius {inner:.3e}",
                self.z, self.which
            )));
        }
        Ok(())
    }
}

/// Multipliers of the genus-two surface on the homology inherited from each torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenusTwoCharacteristicsEps {
    pub tw1: TwistPair,
    pub tw2: TwistPair,
}

impl GenusTwoCharacteristicsEps {
    pub fn new(tw1: TwistPair, tw2: TwistPair) -> Result<Self> {
        if tw1.is_trivial() || tw2.is_trivial() {
            return Err(Error::input("neither torus may carry the trivial multipliers (1, 1)"));
        }
        Ok(Self { tw1, tw2 })
    }

    pub fn twist(&self, which: usize) -> &TwistPair {
        if which == 1 {
            &self.tw1
        } else {
            &self.tw2
        }
    }

    pub fn inverse(&self) -> Self {
        Self { tw1: self.tw1.inverse(), tw2: self.tw2.inverse() }
    }
}
