//! Verification suites run by `verify`, each at a pinned configuration.

use num_complex::Complex64;
use serde::Serialize;

use crate::epsilon_sew::{
    integral_equation_residual, DetReport, EpsilonModuli, EpsilonSewing, GenusTwoCharacteristicsEps, SurfacePoint,
    Xi, INTEGRAL_EQUATION_QUAD_POINTS,
};
use crate::error::{Error, Result};
use crate::modular::{
    eps_invariance_residual, rho_invariance_residual, EpsGroupElement, RhoCharacteristics, RhoGroupElement,
};
use crate::numerics::{differences_estimate, loglog_slope, NumericConfig};
use crate::rho_sew::{
    det_i_minus_t_sphere, integral_equation_residual_rho, torus_from_sphere, HandleTwist, RhoModuliSphere,
    RhoModuliTorus, RhoOptions, RhoTorusSewing,
};
use crate::specialfn::{TorusModulus, TwistPair};

pub const SUITES: [&str; 8] =
    ["skew", "dehn", "modular-eps", "modular-rho", "det-identity", "integral-eq", "degeneration", "convergence"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Pass when `value < tolerance`.
    Below,
    /// Pass when `value >= tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, bound: Bound::Below, pass: value < tolerance }
    }

    fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, bound: Bound::AtLeast, pass: value >= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

/// Truncation overrides accepted by `verify`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOverrides {
    pub order: Option<usize>,
    pub quad: Option<usize>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Low-discrepancy lattice coordinates in `(0.1, 0.9)^2`.
pub fn sample_coords(n: usize) -> Vec<(f64, f64)> {
    // plastic-number sequence
    let (a1, a2) = (0.754_877_666_246_692_7, 0.569_840_290_998_053_3);
    (1..=n)
        .map(|j| {
            let u = (0.5 + a1 * j as f64).fract();
            let v = (0.5 + a2 * j as f64).fract();
            (0.1 + 0.8 * u, 0.1 + 0.8 * v)
        })
        .collect()
}

struct EpsSetup {
    chars: GenusTwoCharacteristicsEps,
    moduli: EpsilonModuli,
    order: usize,
}

fn eps_setup(frac: f64, ov: SuiteOverrides) -> Result<EpsSetup> {
    let t1 = TorusModulus::new(c(0.3, 1.0))?;
    let t2 = TorusModulus::new(c(0.1, 1.2))?;
    let bound = 0.25
        * crate::epsilon_sew::min_lattice_distance(&t1)
        * crate::epsilon_sew::min_lattice_distance(&t2);
    let moduli = EpsilonModuli::new(t1, t2, Complex64::from_polar(frac * bound, 0.4), Xi::PlusI)?;
    let chars = GenusTwoCharacteristicsEps::new(
        TwistPair::from_characteristics(0.2, 0.35),
        TwistPair::from_lambda(Complex64::from_polar(1.0, 0.7), 0.6)?,
    )?;
    Ok(EpsSetup { chars, moduli, order: ov.order.unwrap_or(16) })
}

/// `n` pairs cycling through the torus combinations (1,1), (1,2), (2,2), (2,1).
fn eps_pairs(m: &EpsilonModuli, n: usize) -> Result<Vec<(SurfacePoint, SurfacePoint)>> {
    let uv = sample_coords(2 * n);
    (0..n)
        .map(|i| {
            let (a, b) = [(1, 1), (1, 2), (2, 2), (2, 1)][i % 4];
            let x = SurfacePoint::from_lattice(a, uv[2 * i].0, uv[2 * i].1, m)?;
            let y = SurfacePoint::from_lattice(b, uv[2 * i + 1].0, uv[2 * i + 1].1, m)?;
            Ok((x, y))
        })
        .collect()
}

struct RhoSetup {
    chars: RhoCharacteristics,
    moduli: RhoModuliTorus,
    opts: RhoOptions,
}

/// `|rho| = 0.05 (d/2)^2` with `d` the distance between the punctures.
fn rho_setup(ov: SuiteOverrides, cfg: &NumericConfig) -> Result<RhoSetup> {
    let tau = TorusModulus::new(c(0.05, 1.1))?;
    let w = c(1.6, 2.0);
    let probe = RhoModuliTorus::new(tau, w, c(1e-6, 0.0), Xi::PlusI, cfg)?;
    let d = probe.puncture_distance();
    let moduli = RhoModuliTorus::new(tau, w, Complex64::from_polar(0.05 * (d / 2.0).powi(2), 0.6), Xi::PlusI, cfg)?;
    let chars = RhoCharacteristics {
        tw1: TwistPair::from_lambda(Complex64::from_polar(1.0, 0.4), 0.3)?,
        handle: HandleTwist::from_kappa(Complex64::from_polar(1.0, -1.1), 0.2)?,
    };
    let opts = RhoOptions { order: ov.order.unwrap_or(12), quad_points: ov.quad.unwrap_or(64), contour_scale: 1.0 };
    Ok(RhoSetup { chars, moduli, opts })
}

/// Points at lattice coordinates in `(0.1, 0.9)^2`, kept a fixed distance from both punctures.
fn rho_pairs(m: &RhoModuliTorus, n: usize) -> Vec<(Complex64, Complex64)> {
    let keep = 0.25 * m.puncture_distance();
    let clear = |z: Complex64| {
        let d0 = m.tau.reduce(z).0;
        let dw = m.tau.reduce(z - m.w()).0;
        (-1..=1).all(|i| {
            (-1..=1).all(|j| {
                let l = m.tau.lattice_point(i, j);
                (d0 - l).norm() > keep && (dw - l).norm() > keep
            })
        })
    };
    let pts: Vec<Complex64> = sample_coords(8 * n)
        .into_iter()
        .map(|(u, v)| m.tau.from_lattice_coords(u, v))
        .filter(|&z| clear(z))
        .take(2 * n)
        .collect();
    pts.chunks(2).map(|p| (p[0], p[1])).collect()
}

fn sphere_setup(ov: SuiteOverrides) -> Result<(HandleTwist, RhoModuliSphere, usize)> {
    let handle = HandleTwist::from_kappa(Complex64::from_polar(1.0, 0.3) * -1.0, -0.25)?;
    let moduli = RhoModuliSphere::new(Complex64::from_polar(0.05, 0.9), Xi::PlusI)?;
    Ok((handle, moduli, ov.order.unwrap_or(24)))
}

fn sphere_pairs(n: usize) -> Vec<(Complex64, Complex64)> {
    let uv = sample_coords(2 * n);
    let pt = |(u, v): (f64, f64)| c(1.2 * (u - 0.5), 2.0 * std::f64::consts::PI * v);
    (0..n).map(|i| (pt(uv[2 * i]), pt(uv[2 * i + 1]))).collect()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(1.0)
}

fn skew(ov: SuiteOverrides, cfg: &NumericConfig) -> Result<Vec<Check>> {
    let e = eps_setup(0.05, ov)?;
    let s = EpsilonSewing::new(e.chars, e.moduli, e.order, cfg)?;
    let t = EpsilonSewing::new(e.chars.inverse(), e.moduli, e.order, cfg)?;
    let mut eps_max = 0.0f64;
    for (x, y) in eps_pairs(&e.moduli, 16)? {
        eps_max = eps_max.max(rel(s.kernel(&x, &y)?, -t.kernel(&y, &x)?));
    }
    let (handle, sm, order) = sphere_setup(ov)?;
    let mut sphere_max = 0.0f64;
    for (x, y) in sphere_pairs(16) {
        let a = torus_from_sphere(&handle, x, y, &sm, order)?;
        let b = torus_from_sphere(&handle.inverse(), y, x, &sm, order)?;
        sphere_max = sphere_max.max(rel(a, -b));
    }
    let r = rho_setup(ov, cfg)?;
    let a = RhoTorusSewing::new(&r.chars.tw1, &r.chars.handle, &r.moduli, &r.opts, cfg)?;
    let b = RhoTorusSewing::new(&r.chars.tw1.inverse(), &r.chars.handle.inverse(), &r.moduli, &r.opts, cfg)?;
    let mut torus_max = 0.0f64;
    for (x, y) in rho_pairs(&r.moduli, 16) {
        torus_max = torus_max.max(rel(a.kernel(x, y)?, -b.kernel(y, x)?));
    }
    Ok(vec![
        Check::below("eps: S(x,y) + S'(y,x)", eps_max, 1e-10),
        Check::below("rho-sphere: S(x,y) + S'(y,x)", sphere_max, 1e-10),
        Check::below("rho-torus: S(x,y) + S'(y,x)", torus_max, 1e-10),
    ])
}

fn dehn(ov: SuiteOverrides, cfg: &NumericConfig) -> Result<Vec<Check>> {
    let e = eps_setup(0.05, ov)?;
    let s = EpsilonSewing::new(e.chars, e.moduli, e.order, cfg)?;
    let t = EpsilonSewing::new(e.chars, e.moduli.dehn_twisted(), e.order, cfg)?;
    let u = EpsilonSewing::new(e.chars, e.moduli.with_negated_sqrt(), e.order, cfg)?;
    let (mut joint, mut even, mut odd) = (0.0f64, 0.0f64, 0.0f64);
    for (x, y) in eps_pairs(&e.moduli, 16)? {
        let a = s.kernel(&x, &y)?;
        joint = joint.max(rel(a, t.kernel(&x, &y)?));
        let b = u.kernel(&x, &y)?;
        if x.which == y.which {
            even = even.max(rel(a, b));
        } else {
            odd = odd.max(rel(a, -b));
        }
    }
    Ok(vec![
        Check::below("joint flip (sqrt eps, xi) -> (-sqrt eps, -xi)", joint, 1e-13),
        Check::below("same torus even in sqrt eps", even, 1e-12),
        Check::below("cross tori odd in sqrt eps", odd, 1e-12),
    ])
}

fn modular_eps(ov: SuiteOverrides, cfg: &NumericConfig) -> Result<Vec<Check>> {
    let e = eps_setup(0.02, ov)?;
    let pairs = eps_pairs(&e.moduli, 4)?;
    let gens = [
        ("torus 1 T", EpsGroupElement::gamma1(1, 1, 0, 1)?),
        ("torus 1 S", EpsGroupElement::gamma1(0, -1, 1, 0)?),
        ("torus 2 T", EpsGroupElement::gamma2(1, 1, 0, 1)?),
        ("torus 2 S", EpsGroupElement::gamma2(0, -1, 1, 0)?),
        ("swap", EpsGroupElement::swap()),
    ];
    let mut out = Vec::new();
    for (name, g) in gens {
        let r = eps_invariance_residual(&g, &e.chars, &e.moduli, &pairs, e.order, cfg)?;
        out.push(Check::below(format!("{name}: kernel"), r.kernel, 1e-8));
        out.push(Check::below(format!("{name}: det(I - F1 F2)"), r.det, 1e-9));
    }
    Ok(out)
}

fn modular_rho(ov: SuiteOverrides, cfg: &NumericConfig) -> Result<Vec<Check>> {
    let r = rho_setup(ov, cfg)?;
    let pairs = rho_pairs(&r.moduli, 4);
    let gens = [
        ("A", RhoGroupElement::a()),
        ("B", RhoGroupElement::b()),
        ("C", RhoGroupElement::c_power(1)),
        ("T", RhoGroupElement::gamma1(1, 1, 0, 1)?),
        ("S", RhoGroupElement::gamma1(0, -1, 1, 0)?),
    ];
    let mut out = Vec::new();
    for (name, g) in gens {
        let res = rho_invariance_residual(&g, &r.chars, &r.moduli, &pairs, &r.opts, cfg)?;
        out.push(Check::below(format!("{name}: kernel"), res.kernel, 1e-7));
        out.push(Check::below(format!("{name}: det(I - T)"), res.det, 1e-9));
    }
    Ok(out)
}

fn det_identity(ov: SuiteOverrides, cfg: &NumericConfig) -> Result<Vec<Check>> {
    let e = eps_setup(0.05, ov)?;
    let s = EpsilonSewing::new(e.chars, e.moduli, e.order, cfg)?;
    let r = DetReport::compute(s.f(1), s.f(2), e.moduli.xi, 200)?;
    let (handle, sm, _) = sphere_setup(ov)?;
    let d = det_i_minus_t_sphere(&handle, &sm, ov.order.unwrap_or(32))?;
    Ok(vec![
        Check::below("eps: |det(I - Q) - det(I - F1 F2)|", (r.det_full - r.det_block).norm(), 1e-12),
        Check::below("eps: |exp(log det series) - det(I - F1 F2)|", (r.det_series - r.det_block).norm(), 1e-12),
        Check::below("rho-sphere: |det(I - T) - product|", (d.matrix - d.product).norm(), 1e-12),
    ])
}

fn integral_eq(ov: SuiteOverrides, cfg: &NumericConfig) -> Result<Vec<Check>> {
    let e = eps_setup(0.02, SuiteOverrides { order: Some(ov.order.unwrap_or(20)), ..ov })?;
    let s = EpsilonSewing::new(e.chars, e.moduli, e.order, cfg)?;
    let mut eps_max = 0.0f64;
    for (x, y) in eps_pairs(&e.moduli, 4)? {
        let r = integral_equation_residual(&s, &x, &y, INTEGRAL_EQUATION_QUAD_POINTS)?;
        eps_max = eps_max.max(r.norm() / s.kernel(&x, &y)?.norm().max(1.0));
    }
    let r = rho_setup(ov, cfg)?;
    let a = RhoTorusSewing::new(&r.chars.tw1, &r.chars.handle, &r.moduli, &r.opts, cfg)?;
    let mut rho_max = 0.0f64;
    for (x, y) in rho_pairs(&r.moduli, 4) {
        rho_max = rho_max.max(integral_equation_residual_rho(&a, x, y, 96)?.norm() / a.kernel(x, y)?.norm().max(1.0));
    }
    Ok(vec![Check::below("eps: residual", eps_max, 1e-7), Check::below("rho-torus: residual", rho_max, 1e-7)])
}

/// Slopes of `|S - P_1|` (same torus) and `|S|` (cross tori) against `epsilon` over two decades.
fn degeneration(ov: SuiteOverrides, cfg: &NumericConfig) -> Result<Vec<Check>> {
    let fracs = [1e-2, 1e-3, 1e-4];
    let mut same: Vec<Vec<f64>> = Vec::new();
    let mut cross: Vec<Vec<f64>> = Vec::new();
    let mut eps_abs = Vec::new();
    for &f in &fracs {
        let e = eps_setup(f, ov)?;
        eps_abs.push(e.moduli.epsilon().norm());
        let s = EpsilonSewing::new(e.chars, e.moduli, e.order, cfg)?;
        let (mut sv, mut cv) = (Vec::new(), Vec::new());
        for (x, y) in eps_pairs(&e.moduli, 8)? {
            let k = s.kernel(&x, &y)?;
            if x.which == y.which {
                sv.push((k - s.torus_kernel(x.which, x.z, y.z)?).norm());
            } else {
                cv.push(k.norm());
            }
        }
        same.push(sv);
        cross.push(cv);
    }
    let worst = |rows: &Vec<Vec<f64>>| -> Result<f64> {
        let mut m = f64::INFINITY;
        for p in 0..rows[0].len() {
            let ys: Vec<f64> = rows.iter().map(|r| r[p]).collect();
            m = m.min(loglog_slope(&eps_abs, &ys)?);
        }
        Ok(m)
    };
    Ok(vec![
        Check::at_least("same torus: slope of |S - S_torus|", worst(&same)?, 0.95),
        Check::at_least("cross tori: slope of |S|", worst(&cross)?, 0.45),
    ])
}

fn convergence(ov: SuiteOverrides, cfg: &NumericConfig) -> Result<Vec<Check>> {
    let r = rho_setup(ov, cfg)?;
    let pairs = rho_pairs(&r.moduli, 4);
    let build = |order: usize, quad: usize| {
        RhoTorusSewing::new(
            &r.chars.tw1,
            &r.chars.handle,
            &r.moduli,
            &RhoOptions { order, quad_points: quad, contour_scale: 1.0 },
            cfg,
        )
    };
    let (a, b) = (build(r.opts.order, r.opts.quad_points)?, build(r.opts.order, 2 * r.opts.quad_points)?);
    let mut quad_max = 0.0f64;
    for &(x, y) in &pairs {
        quad_max = quad_max.max((a.kernel(x, y)? - b.kernel(x, y)?).norm());
    }
    let orders = [2, 6, 10, 14, 18];
    let sewings: Vec<RhoTorusSewing> = orders.iter().map(|&n| build(n, 128)).collect::<Result<_>>()?;
    let mut worst_rate = 0.0f64;
    for &(x, y) in &pairs {
        let vals: Vec<Complex64> = sewings.iter().map(|s| s.kernel(x, y)).collect::<Result<_>>()?;
        let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        worst_rate = worst_rate.max(differences_estimate(&diffs)?.rate);
    }
    Ok(vec![
        Check::below("rho-torus: M -> 2M kernel change", quad_max, 1e-9),
        Check::below("rho-torus: N -> N+4 fitted rate", worst_rate, 0.7),
    ])
}

pub fn run_suite(name: &str, ov: SuiteOverrides) -> Result<Report> {
    let mut cfg = NumericConfig::default();
    if let Some(m) = ov.quad {
        cfg.quad_points = m;
    }
    cfg.validate()?;
    let checks = match name {
        "skew" => skew(ov, &cfg)?,
        "dehn" => dehn(ov, &cfg)?,
        "modular-eps" => modular_eps(ov, &cfg)?,
        "modular-rho" => modular_rho(ov, &cfg)?,
        "det-identity" => det_identity(ov, &cfg)?,
        "integral-eq" => integral_eq(ov, &cfg)?,
        "degeneration" => degeneration(ov, &cfg)?,
        "convergence" => convergence(ov, &cfg)?,
        other => {
            return Err(Error::input(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", "))))
        }
    };
    Ok(Report { suite: name.to_string(), pass: checks.iter().all(|c| c.pass), checks })
}
