//! Symmetries of the self-sewn torus: the Heisenberg group moving the second puncture by lattice
//! vectors, `SL(2, Z)` on the torus, and winding of `rho` about zero.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::eps::InvarianceReport;
use super::group::{multipliers, sp4_identity, sp4_mul, transform_characteristics, Sl2, Sp4};
use crate::error::Result;
use crate::numerics::NumericConfig;
use crate::rho_sew::{HandleTwist, RhoModuliTorus, RhoOptions, RhoTorusSewing};
use crate::specialfn::TwistPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoGenerator {
    /// `w -> w + 2 pi i (a tau + b)`; `c` counts windings of `rho`.
    Mu { a: i64, b: i64, c: i64 },
    /// `(tau, w, rho) -> (g tau, w / (c tau + d), rho / (c tau + d)^2)`.
    Gamma1(Sl2),
}

impl RhoGenerator {
    pub fn sp4(&self) -> Sp4 {
        match *self {
            RhoGenerator::Mu { a, b, c } => [[1, 0, 0, b], [a, 1, b, c], [0, 0, 1, -a], [0, 0, 0, 1]],
            RhoGenerator::Gamma1(Sl2 { a, b, c, d }) => {
                [[a, 0, b, 0], [0, 1, 0, 0], [c, 0, d, 0], [0, 0, 0, 1]]
            }
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            // mu(a, b, c) mu(-a, -b, -c) = 1 in the group law read off the matrices.
            RhoGenerator::Mu { a, b, c } => RhoGenerator::Mu { a: -a, b: -b, c: -c },
            RhoGenerator::Gamma1(s) => RhoGenerator::Gamma1(s.inverse()),
        }
    }
}

/// A word `g_1 g_2 ... g_n`; the rightmost generator acts first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RhoGroupElement {
    pub word: Vec<RhoGenerator>,
}

impl RhoGroupElement {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(g: RhoGenerator) -> Self {
        Self { word: vec![g] }
    }

    pub fn mu(a: i64, b: i64, c: i64) -> Self {
        Self::generator(RhoGenerator::Mu { a, b, c })
    }

    /// `mu(1, 0, 0)`.
    pub fn a() -> Self {
        Self::mu(1, 0, 0)
    }

    /// `mu(0, 1, 0)`.
    pub fn b() -> Self {
        Self::mu(0, 1, 0)
    }

    /// `C^n = mu(0, 0, n)`.
    pub fn c_power(n: i64) -> Self {
        Self::mu(0, 0, n)
    }

    pub fn gamma1(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Ok(Self::generator(RhoGenerator::Gamma1(Sl2::new(a, b, c, d)?)))
    }

    /// `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Self { word }
    }

    pub fn inverse(&self) -> Self {
        Self { word: self.word.iter().rev().map(RhoGenerator::inverse).collect() }
    }

    /// `x y x^{-1} y^{-1}`.
    pub fn commutator(x: &Self, y: &Self) -> Self {
        x.compose(y).compose(&x.inverse()).compose(&y.inverse())
    }

    pub fn sp4(&self) -> Sp4 {
        self.word.iter().fold(sp4_identity(), |m, g| sp4_mul(&m, &g.sp4()))
    }
}

/// Multipliers of the self-sewn surface: `(theta_1, phi_1)` on the torus and the handle pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoCharacteristics {
    pub tw1: TwistPair,
    pub handle: HandleTwist,
}

fn generator_on_moduli(g: &RhoGenerator, m: &RhoModuliTorus) -> Result<RhoModuliTorus> {
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let tau = m.tau.tau();
    match *g {
        RhoGenerator::Mu { a, b, c } => {
            let (a, b, c) = (a as f64, b as f64, c as f64);
            let w = m.w() + two_pi_i * (tau * a + b);
            let handle = m.handle_log() + two_pi_i * (tau * (a * a) + (a * b + c)) + m.w() * (2.0 * a);
            let log_rho = m.log_rho() + two_pi_i * c;
            // K(w) changes sign under each lattice step of w, and so does the sewing sign.
            let xi = if (a + b) as i64 % 2 == 0 { m.xi } else { m.xi.flipped() };
            RhoModuliTorus::with_branch_data(m.tau, w, log_rho, handle, xi)
        }
        RhoGenerator::Gamma1(s) => {
            let f = s.factor(&m.tau);
            let w = m.w() / f;
            let handle = m.handle_log() - m.w() * m.w() * s.c as f64 / (two_pi_i * f);
            let log_rho = m.log_rho() - 2.0 * f.ln();
            RhoModuliTorus::with_branch_data(s.apply(&m.tau)?, w, log_rho, handle, m.xi)
        }
    }
}

fn generator_on_chars(g: &RhoGenerator, ch: &RhoCharacteristics) -> Result<RhoCharacteristics> {
    match *g {
        RhoGenerator::Mu { a, b, c } => {
            let (t1, p1) = (ch.tw1.theta(), ch.tw1.phi());
            let (t2, p2) = (ch.handle.theta(), ch.handle.phi());
            let sign = |n: i64| if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let theta1 = t1 * (-p2).powi(b as i32);
            let theta2 = t2
                * (-t1).powi(a as i32)
                * (-p1).powi(b as i32)
                * (-p2).powi(c as i32)
                * sign(a * b + c);
            let phi1 = p1 * (-p2).powi(-a as i32);
            Ok(RhoCharacteristics {
                tw1: TwistPair::new(theta1, phi1)?,
                handle: HandleTwist::from_kappa(theta2, ch.handle.kappa())?,
            })
        }
        RhoGenerator::Gamma1(s) => Ok(RhoCharacteristics { tw1: s.apply_twist(&ch.tw1), handle: ch.handle }),
    }
}

/// Moduli and multipliers under `g`. Branch data is transported exactly: `mu(a, b, c)` adds
/// `2 pi i (a^2 tau + ab + c) + 2 a w` to `handle_log` and `2 pi i c` to `log rho`; `SL(2, Z)`
/// subtracts `c w^2 / (2 pi i (c tau + d))` from `handle_log` and `2 Log(c tau + d)` from `log rho`.
pub fn act_rho(
    g: &RhoGroupElement,
    m: &RhoModuliTorus,
    ch: &RhoCharacteristics,
) -> Result<(RhoModuliTorus, RhoCharacteristics)> {
    let (mut m, mut ch) = (*m, *ch);
    for gen in g.word.iter().rev() {
        ch = generator_on_chars(gen, &ch)?;
        m = generator_on_moduli(gen, &m)?;
    }
    Ok((m, ch))
}

/// Multipliers transported through the `Sp(4, Z)` image acting on characteristic vectors.
pub fn act_rho_chars_sp4(g: &RhoGroupElement, ch: &RhoCharacteristics) -> Result<RhoCharacteristics> {
    let handle = ch.handle.as_twist();
    let alpha = [ch.tw1.alpha(), handle.alpha()];
    let beta = [ch.tw1.beta(), handle.beta()];
    let (al, be) = transform_characteristics(&g.sp4(), alpha, beta);
    let (th1, ph1) = multipliers(al[0], be[0]);
    let (th2, ph2) = multipliers(al[1], be[1]);
    Ok(RhoCharacteristics { tw1: TwistPair::new(th1, ph1)?, handle: HandleTwist::new(th2, ph2)? })
}

/// Image of a torus point under the group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoPointImage {
    pub z: Complex64,
    /// `(d gz / dz)^{1/2}`.
    pub half_form: Complex64,
    /// Multiple of `2 pi i` by which `Log` of the image misses `Log z - Log(c tau + d)`. The
    /// kernel uses principal `Log z` in its `kappa` power, so an image across the cut sits on a
    /// sheet differing by `e^{kappa sheet}`.
    pub sheet: Complex64,
}

/// Only `SL(2, Z)` moves points: `z -> z / (c tau + d)`.
pub fn act_rho_point(g: &RhoGroupElement, x: Complex64, m: &RhoModuliTorus) -> Result<RhoPointImage> {
    let mut moduli = *m;
    let mut out = RhoPointImage { z: x, half_form: Complex64::new(1.0, 0.0), sheet: Complex64::new(0.0, 0.0) };
    for gen in g.word.iter().rev() {
        if let RhoGenerator::Gamma1(s) = gen {
            let f = s.factor(&moduli.tau);
            let z = out.z / f;
            out.sheet += out.z.ln() - f.ln() - z.ln();
            out.z = z;
            out.half_form /= f.sqrt();
        }
        moduli = generator_on_moduli(gen, &moduli)?;
    }
    Ok(out)
}

/// Kernel and `det(I - T)` deviations under `g`, with the same options on both sides.
pub fn rho_invariance_residual(
    g: &RhoGroupElement,
    ch: &RhoCharacteristics,
    moduli: &RhoModuliTorus,
    pairs: &[(Complex64, Complex64)],
    opts: &RhoOptions,
    cfg: &NumericConfig,
) -> Result<InvarianceReport> {
    let before = RhoTorusSewing::new(&ch.tw1, &ch.handle, moduli, opts, cfg)?;
    let (moduli2, ch2) = act_rho(g, moduli, ch)?;
    let after = RhoTorusSewing::new(&ch2.tw1, &ch2.handle, &moduli2, opts, cfg)?;
    let mut kernel = 0.0f64;
    for &(x, y) in pairs {
        let gx = act_rho_point(g, x, moduli)?;
        let gy = act_rho_point(g, y, moduli)?;
        let s = before.kernel(x, y)?;
        let sheet = ((gy.sheet - gx.sheet) * ch.handle.kappa()).exp();
        let s2 = after.kernel(gx.z, gy.z)? * gx.half_form * gy.half_form * sheet;
        kernel = kernel.max((s2 - s).norm());
    }
    Ok(InvarianceReport { kernel, det: (after.det() - before.det()).norm() })
}
