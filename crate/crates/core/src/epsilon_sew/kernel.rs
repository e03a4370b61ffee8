use num_complex::Complex64;

use super::moments::{build_q, f_matrix, h_vector, hbar_vector, solve_x, spectral_radius_estimate};
use super::{EpsilonModuli, GenusTwoCharacteristicsEps, SurfacePoint};
use crate::error::{Error, Result};
use crate::numerics::{circle_quadrature, lu_solve, ComplexMatrix, NumericConfig};
use crate::specialfn::p1_series;

/// Quadrature points for the integral-equation residual.
pub const INTEGRAL_EQUATION_QUAD_POINTS: usize = 128;

/// Precomputed sewing data for one configuration; evaluates the genus-two kernel at any pair of points.
#[derive(Debug, Clone)]
pub struct EpsilonSewing {
    chars: GenusTwoCharacteristicsEps,
    moduli: EpsilonModuli,
    order: usize,
    cfg: NumericConfig,
    f1: ComplexMatrix,
    f2: ComplexMatrix,
    // same_a = (I - F_abar F_a)^{-1} F_abar,  cross_a = (I - F_abar F_a)^{-1}
    same: [ComplexMatrix; 2],
    cross: [ComplexMatrix; 2],
}

impl EpsilonSewing {
    pub fn new(
        chars: GenusTwoCharacteristicsEps,
        moduli: EpsilonModuli,
        order: usize,
        cfg: &NumericConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if order == 0 {
            return Err(Error::input("truncation order must be at least 1"));
        }
        let f1 = f_matrix(&chars.tw1, order, 1, &moduli, cfg)?;
        let f2 = f_matrix(&chars.tw2, order, 2, &moduli, cfg)?;
        let q = build_q(&f1, &f2, moduli.xi)?;
        let rho = spectral_radius_estimate(&q)?;
        if !(rho < 1.0) {
            return Err(Error::domain(format!("Q has spectral radius estimate {rho:.4} >= 1")));
        }
        let id = ComplexMatrix::identity(order);
        let a1 = f2.matmul(&f1)?.identity_minus()?;
        let a2 = f1.matmul(&f2)?.identity_minus()?;
        let same = [lu_solve(&a1, &f2, cfg)?, lu_solve(&a2, &f1, cfg)?];
        let cross = [lu_solve(&a1, &id, cfg)?, lu_solve(&a2, &id, cfg)?];
        Ok(Self { chars, moduli, order, cfg: *cfg, f1, f2, same, cross })
    }

    pub fn moduli(&self) -> &EpsilonModuli {
        &self.moduli
    }

    pub fn chars(&self) -> &GenusTwoCharacteristicsEps {
        &self.chars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn f(&self, which: usize) -> &ComplexMatrix {
        if which == 1 {
            &self.f1
        } else {
            &self.f2
        }
    }

    pub fn q(&self) -> Result<ComplexMatrix> {
        build_q(&self.f1, &self.f2, self.moduli.xi)
    }

    /// `X = (I - Q)^{-1} F`.
    pub fn x_matrix(&self) -> Result<ComplexMatrix> {
        let z = ComplexMatrix::zeros(self.order, self.order);
        let f = ComplexMatrix::from_blocks(&self.f1, &z, &z, &self.f2)?;
        solve_x(&self.q()?, &f, &self.cfg)
    }

    /// Genus-one kernel `P_1(x - y)` of torus `which`.
    pub fn torus_kernel(&self, which: usize, x: Complex64, y: Complex64) -> Result<Complex64> {
        p1_series(self.chars.twist(which), x - y, self.moduli.tau(which), &self.cfg)
    }

    pub fn h(&self, p: &SurfacePoint) -> Result<Vec<Complex64>> {
        h_vector(self.chars.twist(p.which), self.order, p.which, p.z, &self.moduli, &self.cfg)
    }

    pub fn hbar(&self, p: &SurfacePoint) -> Result<Vec<Complex64>> {
        hbar_vector(self.chars.twist(p.which), self.order, p.which, p.z, &self.moduli, &self.cfg)
    }

    /// Coefficient of `dx^{1/2} dy^{1/2}` of the genus-two kernel.
    pub fn kernel(&self, x: &SurfacePoint, y: &SurfacePoint) -> Result<Complex64> {
        x.validate(&self.moduli)?;
        y.validate(&self.moduli)?;
        let hx = self.h(x)?;
        let hy = self.hbar(y)?;
        let a = x.which - 1;
        if x.which == y.which {
            let base = self.torus_kernel(x.which, x.z, y.z)?;
            Ok(base + bilinear(&hx, &self.same[a], &hy))
        } else {
            // xi (-1)^{abar}: +xi for x on torus 1, -xi for x on torus 2
            let sign = if x.which == 1 { 1.0 } else { -1.0 };
            Ok(self.moduli.xi.value() * sign * bilinear(&hx, &self.cross[a], &hy))
        }
    }

    /// Kernel via the `2N` block form `delta_ab S_a + h_a (Xi (I - Q)^{-1})_{ab} hbar_b`.
    pub fn kernel_block_form(&self, x: &SurfacePoint, y: &SurfacePoint) -> Result<Complex64> {
        let n = self.order;
        let q = self.q()?;
        let inv = lu_solve(&q.identity_minus()?, &ComplexMatrix::identity(2 * n), &self.cfg)?;
        let xi = self.moduli.xi.value();
        let z = ComplexMatrix::zeros(n, n);
        let id = ComplexMatrix::identity(n);
        let big_xi = ComplexMatrix::from_blocks(&z, &id.scale(xi), &id.scale(-xi), &z)?;
        let w = big_xi.matmul(&inv)?;
        let block = w.block(x.which - 1, y.which - 1, n);
        let mut v = bilinear(&self.h(x)?, &block, &self.hbar(y)?);
        if x.which == y.which {
            v += self.torus_kernel(x.which, x.z, y.z)?;
        }
        Ok(v)
    }
}

pub(crate) fn bilinear(u: &[Complex64], m: &ComplexMatrix, v: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, ui) in u.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (j, vj) in v.iter().enumerate() {
            row += m[(i, j)] * vj;
        }
        acc += ui * row;
    }
    acc
}

/// One-shot evaluation of the genus-two kernel.
pub fn szego_genus2_eps(
    chars: &GenusTwoCharacteristicsEps,
    x: &SurfacePoint,
    y: &SurfacePoint,
    moduli: &EpsilonModuli,
    order: usize,
    cfg: &NumericConfig,
) -> Result<Complex64> {
    EpsilonSewing::new(*chars, *moduli, order, cfg)?.kernel(x, y)
}

/// `S(x,y) - delta_ab S_a(x,y) + (1/2 pi i) \oint_{C_a} S_a(x,z) S(z,y) dz` with `C_a`
/// the circle of radius `moduli.contour_radius(a)` around the puncture on the torus of `x`,
/// oriented as the boundary of the punctured torus (clockwise around the puncture).
pub fn integral_equation_residual(
    sewing: &EpsilonSewing,
    x: &SurfacePoint,
    y: &SurfacePoint,
    m: usize,
) -> Result<Complex64> {
    let a = x.which;
    let r = sewing.moduli.contour_radius(a);
    let (xr, _, _) = sewing.moduli.tau(a).reduce(x.z);
    if xr.norm() <= r * 1.05 {
        return Err(Error::input("x must lie outside the integration contour"));
    }
    let direct = sewing.kernel(x, y)?;
    let base = if x.which == y.which { sewing.torus_kernel(a, x.z, y.z)? } else { Complex64::new(0.0, 0.0) };
    // S(z, y) on the contour is read off in the other torus' coordinate z' = epsilon / z,
    // so the check goes through the sewing relation rather than the on-torus expansion.
    let eps = sewing.moduli.epsilon();
    let sign = if a == 1 { -1.0 } else { 1.0 };
    let half = sewing.moduli.xi.value() * sign * sewing.moduli.sqrt_epsilon();
    let integral = circle_quadrature(Complex64::new(0.0, 0.0), r, m, |_, z| {
        let zp = SurfacePoint { which: 3 - a, z: eps / z };
        match (sewing.torus_kernel(a, x.z, z), sewing.kernel(&zp, y)) {
            (Ok(s1), Ok(s2)) => s1 * s2 * zp.z / half,
            _ => Complex64::new(f64::NAN, 0.0),
        }
    })?;
    Ok(direct - base - integral)
}
