use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use szego::epsilon_sew::{min_lattice_distance, EpsilonModuli, EpsilonSewing, GenusTwoCharacteristicsEps, SurfacePoint, Xi};
use szego::modular::{
    act_eps_chars, act_eps_chars_sp4, act_rho, act_rho_chars_sp4, is_symplectic, sp4_identity, EpsGroupElement,
    RhoCharacteristics, RhoGroupElement,
};
use szego::numerics::{circle_quadrature, NumericConfig};
use szego::rho_sew::{HandleTwist, RhoModuliTorus};
use szego::specialfn::{p1_theta, TorusModulus, TwistPair};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(1.0)
}

/// `S^s T^t` with `s` in `0..=3`: enough to reach a spread of `SL(2, Z)` elements.
fn sl2_word() -> impl Strategy<Value = [i64; 4]> {
    (0..4u8, -3i64..=3, 0..4u8).prop_map(|(s1, t, s2)| {
        let mul = |x: [i64; 4], y: [i64; 4]| {
            [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
        };
        let s = [0, -1, 1, 0];
        let mut m = [1, 0, 0, 1];
        for _ in 0..s1 {
            m = mul(m, s);
        }
        m = mul(m, [1, t, 0, 1]);
        for _ in 0..s2 {
            m = mul(m, s);
        }
        m
    })
}

fn eps_word() -> impl Strategy<Value = EpsGroupElement> {
    let gen = prop_oneof![
        sl2_word().prop_map(|m| EpsGroupElement::gamma1(m[0], m[1], m[2], m[3]).unwrap()),
        sl2_word().prop_map(|m| EpsGroupElement::gamma2(m[0], m[1], m[2], m[3]).unwrap()),
        Just(EpsGroupElement::swap()),
    ];
    prop::collection::vec(gen, 1..5)
        .prop_map(|gs| gs.iter().fold(EpsGroupElement::identity(), |acc, g| acc.compose(g)))
}

fn rho_word() -> impl Strategy<Value = RhoGroupElement> {
    let gen = prop_oneof![
        (-2i64..=2, -2i64..=2, -2i64..=2).prop_map(|(a, b, c)| RhoGroupElement::mu(a, b, c)),
        sl2_word().prop_map(|m| RhoGroupElement::gamma1(m[0], m[1], m[2], m[3]).unwrap()),
    ];
    prop::collection::vec(gen, 1..5)
        .prop_map(|gs| gs.iter().fold(RhoGroupElement::identity(), |acc, g| acc.compose(g)))
}

/// Characteristics away from the `phi = 1` resonance.
fn twist() -> impl Strategy<Value = TwistPair> {
    (0.05f64..0.95, 0.0f64..1.0).prop_map(|(alpha, beta)| TwistPair::from_characteristics(alpha, beta))
}

fn same_twist(a: &TwistPair, b: &TwistPair) -> bool {
    close(a.theta(), b.theta(), 1e-10) && close(a.phi(), b.phi(), 1e-10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eps_character_routes_agree(g in eps_word(), t1 in twist(), t2 in twist()) {
        let ch = GenusTwoCharacteristicsEps { tw1: t1, tw2: t2 };
        let a = act_eps_chars(&g, &ch);
        let b = act_eps_chars_sp4(&g, &ch).unwrap();
        prop_assert!(same_twist(&a.tw1, &b.tw1) && same_twist(&a.tw2, &b.tw2));
    }

    #[test]
    fn eps_words_are_symplectic_and_invertible(g in eps_word()) {
        prop_assert!(is_symplectic(&g.sp4()));
        prop_assert_eq!(g.compose(&g.inverse()).sp4(), sp4_identity());
    }

    #[test]
    fn rho_character_routes_agree(g in rho_word(), t1 in twist(), t2 in twist()) {
        let cfg = NumericConfig::default();
        let tau = TorusModulus::new(c(0.05, 1.1)).unwrap();
        let m = RhoModuliTorus::new(tau, c(1.6, 2.0), c(1e-3, 2e-4), Xi::PlusI, &cfg).unwrap();
        let ch = RhoCharacteristics { tw1: t1, handle: HandleTwist::new(t2.theta(), t2.phi()).unwrap() };
        let (_, a) = act_rho(&g, &m, &ch).unwrap();
        let b = act_rho_chars_sp4(&g, &ch).unwrap();
        prop_assert!(same_twist(&a.tw1, &b.tw1));
        prop_assert!(same_twist(&a.handle.as_twist(), &b.handle.as_twist()));
    }

    #[test]
    fn rho_words_are_symplectic_and_invertible(g in rho_word()) {
        prop_assert!(is_symplectic(&g.sp4()));
        prop_assert_eq!(g.compose(&g.inverse()).sp4(), sp4_identity());
    }

    #[test]
    fn heisenberg_commutators(a in -2i64..=2, b in -2i64..=2) {
        // [mu(a,0,0), mu(0,b,0)] is a power of the central element.
        let x = RhoGroupElement::mu(a, 0, 0);
        let y = RhoGroupElement::mu(0, b, 0);
        let comm = RhoGroupElement::commutator(&x, &y).sp4();
        let central = RhoGroupElement::c_power(2 * a * b).sp4();
        prop_assert_eq!(comm, central);
    }

    #[test]
    fn twist_transform_is_an_action(t in twist(), m1 in sl2_word(), m2 in sl2_word()) {
        let once = t.transform(m1[0], m1[1], m1[2], m1[3]).transform(m2[0], m2[1], m2[2], m2[3]);
        // (theta, phi) transforms as a row vector of exponents, so the product is m1 m2.
        let p = [
            m1[0] * m2[0] + m1[2] * m2[1],
            m1[1] * m2[0] + m1[3] * m2[1],
            m1[0] * m2[2] + m1[2] * m2[3],
            m1[1] * m2[2] + m1[3] * m2[3],
        ];
        let direct = t.transform(p[0], p[1], p[2], p[3]);
        prop_assert!(same_twist(&once, &direct));
    }

    #[test]
    fn p1_quasi_periodicity(t in twist(), re in -0.4f64..0.4, im in 0.3f64..5.9) {
        let cfg = NumericConfig::default();
        let tau = TorusModulus::new(c(0.2, 1.1)).unwrap();
        let z = c(re, im);
        let base = p1_theta(&t, z, &tau, &cfg).unwrap();
        let shifted = p1_theta(&t, z + c(0.0, 2.0 * PI), &tau, &cfg).unwrap();
        let across = p1_theta(&t, z + c(0.0, 2.0 * PI) * tau.tau(), &tau, &cfg).unwrap();
        prop_assert!(close(shifted, t.phi() * base, 1e-10));
        prop_assert!(close(across, t.theta() * base, 1e-10));
    }

    #[test]
    fn circle_quadrature_picks_the_residue(k in -6i32..=6, r in 0.1f64..2.0, cre in -1.0f64..1.0) {
        let center = c(cre, 0.3);
        let got = circle_quadrature(center, r, 32, |_, z| (z - center).powi(k)).unwrap();
        let want = if k == -1 { 1.0 } else { 0.0 };
        prop_assert!((got - want).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eps_kernel_is_skew(t1 in twist(), t2 in twist(), u in 0.1f64..0.9, v in 0.1f64..0.9, cross in any::<bool>()) {
        let cfg = NumericConfig::default();
        let a = TorusModulus::new(c(0.3, 1.0)).unwrap();
        let b = TorusModulus::new(c(0.1, 1.2)).unwrap();
        let bound = 0.25 * min_lattice_distance(&a) * min_lattice_distance(&b);
        let m = EpsilonModuli::new(a, b, Complex64::from_polar(0.05 * bound, 0.4), Xi::PlusI).unwrap();
        let ch = GenusTwoCharacteristicsEps::new(t1, t2).unwrap();
        let s = EpsilonSewing::new(ch, m, 8, &cfg).unwrap();
        let t = EpsilonSewing::new(ch.inverse(), m, 8, &cfg).unwrap();
        let x = SurfacePoint::from_lattice(1, u, v, &m).unwrap();
        let y = SurfacePoint::from_lattice(if cross { 2 } else { 1 }, 1.0 - v, u * 0.7 + 0.05, &m).unwrap();
        let k = s.kernel(&x, &y).unwrap();
        prop_assert!(close(k, -t.kernel(&y, &x).unwrap(), 1e-10));
    }
}
