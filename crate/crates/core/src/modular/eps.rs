//! Modular group of the two-torus sewing: `SL(2, Z)` on each torus and the torus swap.

use num_complex::Complex64;

use super::group::{multipliers, sp4_identity, sp4_mul, transform_characteristics, Sl2, Sp4};
use crate::epsilon_sew::{
    det_i_minus_q, EpsilonModuli, EpsilonSewing, GenusTwoCharacteristicsEps, SurfacePoint,
};
use crate::error::Result;
use crate::numerics::NumericConfig;
use crate::specialfn::TwistPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsGenerator {
    /// Acts on torus 1.
    Gamma1(Sl2),
    /// Acts on torus 2.
    Gamma2(Sl2),
    /// Exchanges the two tori.
    Swap,
}

impl EpsGenerator {
    pub fn inverse(&self) -> Self {
        match self {
            EpsGenerator::Gamma1(g) => EpsGenerator::Gamma1(g.inverse()),
            EpsGenerator::Gamma2(g) => EpsGenerator::Gamma2(g.inverse()),
            EpsGenerator::Swap => EpsGenerator::Swap,
        }
    }

    pub fn sp4(&self) -> Sp4 {
        match *self {
            EpsGenerator::Gamma1(Sl2 { a, b, c, d }) => {
                [[a, 0, b, 0], [0, 1, 0, 0], [c, 0, d, 0], [0, 0, 0, 1]]
            }
            EpsGenerator::Gamma2(Sl2 { a, b, c, d }) => {
                [[1, 0, 0, 0], [0, a, 0, b], [0, 0, 1, 0], [0, c, 0, d]]
            }
            EpsGenerator::Swap => [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        }
    }
}

/// A word `g_1 g_2 ... g_n`; the rightmost generator acts first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EpsGroupElement {
    pub word: Vec<EpsGenerator>,
}

impl EpsGroupElement {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(g: EpsGenerator) -> Self {
        Self { word: vec![g] }
    }

    pub fn gamma1(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Ok(Self::generator(EpsGenerator::Gamma1(Sl2::new(a, b, c, d)?)))
    }

    pub fn gamma2(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Ok(Self::generator(EpsGenerator::Gamma2(Sl2::new(a, b, c, d)?)))
    }

    pub fn swap() -> Self {
        Self::generator(EpsGenerator::Swap)
    }

    /// `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Self { word }
    }

    pub fn inverse(&self) -> Self {
        Self { word: self.word.iter().rev().map(EpsGenerator::inverse).collect() }
    }

    pub fn sp4(&self) -> Sp4 {
        self.word.iter().fold(sp4_identity(), |m, g| sp4_mul(&m, &g.sp4()))
    }

    fn acting_order(&self) -> impl Iterator<Item = &EpsGenerator> {
        self.word.iter().rev()
    }
}

fn generator_on_moduli(g: &EpsGenerator, m: &EpsilonModuli) -> Result<EpsilonModuli> {
    let (t1, t2) = (*m.tau(1), *m.tau(2));
    match g {
        EpsGenerator::Gamma1(s) => {
            let f = s.factor(&t1);
            EpsilonModuli::with_sqrt(s.apply(&t1)?, t2, m.sqrt_epsilon() / f.sqrt(), m.xi)
        }
        EpsGenerator::Gamma2(s) => {
            let f = s.factor(&t2);
            EpsilonModuli::with_sqrt(t1, s.apply(&t2)?, m.sqrt_epsilon() / f.sqrt(), m.xi)
        }
        EpsGenerator::Swap => EpsilonModuli::with_sqrt(t2, t1, m.sqrt_epsilon(), m.xi.flipped()),
    }
}

/// `(tau_1, tau_2, epsilon)` under `g`. The recorded `epsilon^{1/2}` is divided by the principal
/// square root of `c tau + d` at each step.
pub fn act_eps_moduli(g: &EpsGroupElement, m: &EpsilonModuli) -> Result<EpsilonModuli> {
    let mut out = *m;
    for gen in g.acting_order() {
        out = generator_on_moduli(gen, &out)?;
    }
    Ok(out)
}

/// Multiplier transport: `theta_a -> theta_a^a phi_a^b`, `phi_a -> theta_a^c phi_a^d` on the acted torus.
pub fn act_eps_chars(g: &EpsGroupElement, c: &GenusTwoCharacteristicsEps) -> GenusTwoCharacteristicsEps {
    let mut out = *c;
    for gen in g.acting_order() {
        out = match gen {
            EpsGenerator::Gamma1(s) => GenusTwoCharacteristicsEps { tw1: s.apply_twist(&out.tw1), tw2: out.tw2 },
            EpsGenerator::Gamma2(s) => GenusTwoCharacteristicsEps { tw1: out.tw1, tw2: s.apply_twist(&out.tw2) },
            EpsGenerator::Swap => GenusTwoCharacteristicsEps { tw1: out.tw2, tw2: out.tw1 },
        };
    }
    out
}

/// The same transport computed on characteristic vectors through the `Sp(4, Z)` image of `g`.
pub fn act_eps_chars_sp4(g: &EpsGroupElement, c: &GenusTwoCharacteristicsEps) -> Result<GenusTwoCharacteristicsEps> {
    let alpha = [c.tw1.alpha(), c.tw2.alpha()];
    let beta = [c.tw1.beta(), c.tw2.beta()];
    let (al, be) = transform_characteristics(&g.sp4(), alpha, beta);
    let (th1, ph1) = multipliers(al[0], be[0]);
    let (th2, ph2) = multipliers(al[1], be[1]);
    Ok(GenusTwoCharacteristicsEps { tw1: TwistPair::new(th1, ph1)?, tw2: TwistPair::new(th2, ph2)? })
}

/// Image of a point and the half-form factor `(d gx / dx)^{1/2}`, built from the same principal
/// roots as the `epsilon^{1/2}` transport.
pub fn act_eps_point(
    g: &EpsGroupElement,
    p: &SurfacePoint,
    m: &EpsilonModuli,
) -> Result<(SurfacePoint, Complex64)> {
    let mut moduli = *m;
    let mut point = *p;
    let mut half = Complex64::new(1.0, 0.0);
    for gen in g.acting_order() {
        match gen {
            EpsGenerator::Gamma1(s) | EpsGenerator::Gamma2(s) => {
                let which = if matches!(gen, EpsGenerator::Gamma1(_)) { 1 } else { 2 };
                if point.which == which {
                    let f = s.factor(moduli.tau(which));
                    point = SurfacePoint::new(which, point.z / f)?;
                    half /= f.sqrt();
                }
            }
            EpsGenerator::Swap => point = SurfacePoint::new(3 - point.which, point.z)?,
        }
        moduli = generator_on_moduli(gen, &moduli)?;
    }
    Ok((point, half))
}

/// Worst deviations of the kernel and of `det(I - F_1 F_2)` under `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport {
    /// `max |S'(gx, gy) (dgx/dx)^{1/2} (dgy/dy)^{1/2} - S(x, y)|` over the sample pairs.
    pub kernel: f64,
    /// `|det' - det|`.
    pub det: f64,
}

pub fn eps_invariance_residual(
    g: &EpsGroupElement,
    chars: &GenusTwoCharacteristicsEps,
    moduli: &EpsilonModuli,
    pairs: &[(SurfacePoint, SurfacePoint)],
    order: usize,
    cfg: &NumericConfig,
) -> Result<InvarianceReport> {
    let before = EpsilonSewing::new(*chars, *moduli, order, cfg)?;
    let moduli2 = act_eps_moduli(g, moduli)?;
    let chars2 = act_eps_chars(g, chars);
    let after = EpsilonSewing::new(chars2, moduli2, order, cfg)?;
    let mut kernel = 0.0f64;
    for (x, y) in pairs {
        let (gx, hx) = act_eps_point(g, x, moduli)?;
        let (gy, hy) = act_eps_point(g, y, moduli)?;
        let s = before.kernel(x, y)?;
        let s2 = after.kernel(&gx, &gy)? * hx * hy;
        kernel = kernel.max((s2 - s).norm());
    }
    let d1 = det_i_minus_q(before.f(1), before.f(2))?;
    let d2 = det_i_minus_q(after.f(1), after.f(2))?;
    Ok(InvarianceReport { kernel, det: (d2 - d1).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epsilon_sew::Xi;
    use crate::specialfn::TorusModulus;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn moduli() -> EpsilonModuli {
        let t1 = TorusModulus::new(c(0.1, 1.0)).unwrap();
        let t2 = TorusModulus::new(c(-0.2, 1.2)).unwrap();
        EpsilonModuli::new(t1, t2, c(0.02, 0.01), Xi::PlusI).unwrap()
    }

    fn chars() -> GenusTwoCharacteristicsEps {
        GenusTwoCharacteristicsEps::new(
            TwistPair::from_lambda(Complex64::from_polar(1.0, 0.4), 0.3).unwrap(),
            TwistPair::from_lambda(Complex64::from_polar(1.0, -0.9), 0.65).unwrap(),
        )
        .unwrap()
    }

    fn pairs(m: &EpsilonModuli) -> Vec<(SurfacePoint, SurfacePoint)> {
        let p = |w, u, v| SurfacePoint::from_lattice(w, u, v, m).unwrap();
        vec![
            (p(1, 0.3, 0.4), p(1, 0.7, 0.2)),
            (p(1, 0.35, 0.6), p(2, 0.5, 0.3)),
            (p(2, 0.2, 0.8), p(2, 0.6, 0.55)),
            (p(2, 0.4, 0.3), p(1, 0.8, 0.7)),
        ]
    }

    fn same_twist(a: &TwistPair, b: &TwistPair) -> f64 {
        (a.theta() - b.theta()).norm().max((a.phi() - b.phi()).norm())
    }

    #[test]
    fn identity_fixes_moduli() {
        let m = moduli();
        assert_eq!(act_eps_moduli(&EpsGroupElement::identity(), &m).unwrap(), m);
    }

    #[test]
    fn swap_exchanges_tori_and_is_an_involution() {
        let m = moduli();
        let s = act_eps_moduli(&EpsGroupElement::swap(), &m).unwrap();
        assert_eq!(s.tau(1), m.tau(2));
        assert_eq!(s.tau(2), m.tau(1));
        assert_eq!(s.epsilon(), m.epsilon());
        let ss = EpsGroupElement::swap().compose(&EpsGroupElement::swap());
        assert_eq!(act_eps_moduli(&ss, &m).unwrap(), m);
        let ch = chars();
        let sc = act_eps_chars(&EpsGroupElement::swap(), &ch);
        assert_eq!((sc.tw1, sc.tw2), (ch.tw2, ch.tw1));
        assert_eq!(act_eps_chars(&ss, &ch), ch);
    }

    #[test]
    fn t_shift_on_torus_one() {
        let m = moduli();
        let g = EpsGroupElement::gamma1(1, 1, 0, 1).unwrap();
        let t = act_eps_moduli(&g, &m).unwrap();
        assert!((t.tau(1).tau() - m.tau(1).tau() - 1.0).norm() < 1e-15);
        assert_eq!(t.tau(2), m.tau(2));
        assert!((t.epsilon() - m.epsilon()).norm() < 1e-17);
        let ch = chars();
        let tc = act_eps_chars(&g, &ch);
        assert!((tc.tw1.theta() - ch.tw1.theta() * ch.tw1.phi()).norm() < 1e-14);
        assert_eq!(tc.tw1.phi(), ch.tw1.phi());
    }

    #[test]
    fn s_transports_the_square_root_of_epsilon() {
        let m = moduli();
        let g = EpsGroupElement::gamma1(0, -1, 1, 0).unwrap();
        let t = act_eps_moduli(&g, &m).unwrap();
        let f = m.tau(1).tau();
        assert!((t.epsilon() - m.epsilon() / f).norm() < 1e-16);
        assert!((t.sqrt_epsilon() - m.sqrt_epsilon() / f.sqrt()).norm() < 1e-16);
    }

    #[test]
    fn domain_bound_scales_with_epsilon() {
        let m = moduli();
        let g = EpsGroupElement::gamma1(1, 0, 1, 1).unwrap();
        let t = act_eps_moduli(&g, &m).unwrap();
        let f = m.tau(1).tau() + 1.0;
        assert!((t.bound() * f.norm() - m.bound()).abs() < 1e-12);
        assert!((t.epsilon().norm() / t.bound() - m.epsilon().norm() / m.bound()).abs() < 1e-12);
    }

    #[test]
    fn both_character_routes_agree() {
        let ch = chars();
        let words = [
            EpsGroupElement::gamma1(1, 1, 0, 1).unwrap(),
            EpsGroupElement::gamma1(0, -1, 1, 0).unwrap(),
            EpsGroupElement::gamma2(2, 1, 1, 1).unwrap(),
            EpsGroupElement::swap(),
            EpsGroupElement::gamma1(0, -1, 1, 0)
                .unwrap()
                .compose(&EpsGroupElement::swap())
                .compose(&EpsGroupElement::gamma2(1, -3, 0, 1).unwrap()),
        ];
        for g in &words {
            let a = act_eps_chars(g, &ch);
            let b = act_eps_chars_sp4(g, &ch).unwrap();
            assert!(same_twist(&a.tw1, &b.tw1) < 1e-12, "{g:?}");
            assert!(same_twist(&a.tw2, &b.tw2) < 1e-12, "{g:?}");
            assert!(super::super::group::is_symplectic(&g.sp4()));
        }
    }

    #[test]
    fn inverse_word_undoes_the_action() {
        let m = moduli();
        let g = EpsGroupElement::gamma1(0, -1, 1, 0).unwrap().compose(&EpsGroupElement::gamma2(1, 1, 0, 1).unwrap());
        let back = act_eps_moduli(&g.inverse(), &act_eps_moduli(&g, &m).unwrap()).unwrap();
        assert!((back.tau(1).tau() - m.tau(1).tau()).norm() < 1e-14);
        assert!((back.sqrt_epsilon() - m.sqrt_epsilon()).norm() < 1e-15);
        assert_eq!(back.xi, m.xi);
    }

    #[test]
    fn identity_residual_vanishes() {
        let m = moduli();
        let cfg = NumericConfig::default();
        let r = eps_invariance_residual(&EpsGroupElement::identity(), &chars(), &m, &pairs(&m), 8, &cfg).unwrap();
        assert_eq!(r.kernel, 0.0);
        assert_eq!(r.det, 0.0);
    }

    #[test]
    fn generators_leave_the_kernel_invariant() {
        let m = moduli();
        let cfg = NumericConfig::default();
        let gens = [
            EpsGroupElement::gamma1(1, 1, 0, 1).unwrap(),
            EpsGroupElement::gamma1(0, -1, 1, 0).unwrap(),
            EpsGroupElement::gamma2(1, 1, 0, 1).unwrap(),
            EpsGroupElement::gamma2(0, -1, 1, 0).unwrap(),
            EpsGroupElement::swap(),
        ];
        for g in &gens {
            let r = eps_invariance_residual(g, &chars(), &m, &pairs(&m), 16, &cfg).unwrap();
            assert!(r.kernel < 1e-8, "{g:?}: {}", r.kernel);
            assert!(r.det < 1e-12, "{g:?}: {}", r.det);
        }
    }

    #[test]
    fn swap_point_map_changes_torus_only() {
        let m = moduli();
        let p = SurfacePoint::new(1, c(0.3, 0.2)).unwrap();
        let (q, h) = act_eps_point(&EpsGroupElement::swap(), &p, &m).unwrap();
        assert_eq!((q.which, q.z, h), (2, p.z, c(1.0, 0.0)));
    }
}
