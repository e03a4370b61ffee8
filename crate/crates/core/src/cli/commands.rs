//! `eval`, `det` and `scan`.

use clap::ValueEnum;
use num_complex::Complex64;

use super::output::{Cell, Table};
use super::spec::{PointPair, RunSpec, Scheme};
use crate::epsilon_sew::{DetReport, EpsilonSewing, SurfacePoint};
use crate::error::{Error, Result};
use crate::numerics::{differences_estimate, loglog_slope};
use crate::rho_sew::{det_i_minus_t_sphere, s_kappa_torus, torus_from_sphere, RhoTorusSewing};
use crate::specialfn::{p1_series, p1_theta};

pub const EVAL_SCHEMA: &str = "szego-eval/1";
pub const DET_SCHEMA: &str = "szego-det/1";
pub const SCAN_SCHEMA: &str = "szego-scan/1";

const EVAL_HEADER: [&str; 8] = ["x_which", "x_re", "x_im", "y_which", "y_re", "y_im", "s_re", "s_im"];
const ORACLE_HEADER: [&str; 3] = ["oracle_re", "oracle_im", "abs_diff"];
const DET_HEADER: [&str; 3] = ["quantity", "re", "im"];
const SCAN_HEADER: [&str; 7] = ["value", "pair", "s_re", "s_im", "delta", "rate", "slope"];

/// Terms of the `log det` power series reported by `det` in the two-torus scheme.
const DET_SERIES_TERMS: usize = 200;

/// Text printed by `--schema`.
pub fn schema_text() -> String {
    format!(
        "{EVAL_SCHEMA}: {}[,{}]\n{DET_SCHEMA}: {}\n{SCAN_SCHEMA}: {}\n\
         CSV reals carry 17 significant digits. JSON rows use the same names with *_re/*_im pairs merged into [re, im].\n",
        EVAL_HEADER.join(","),
        ORACLE_HEADER.join(","),
        DET_HEADER.join(","),
        SCAN_HEADER.join(","),
    )
}

/// Scan axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Epsilon,
    Rho,
    #[value(name = "N", alias = "n")]
    N,
    #[value(name = "M", alias = "m")]
    M,
}

/// Parameters varied by a scan; `None` keeps the value from the run spec.
#[derive(Debug, Clone, Copy, Default)]
struct Overrides {
    epsilon: Option<Complex64>,
    rho: Option<Complex64>,
}

/// Kernel values for every pair, and their genus-one limits where one exists.
fn kernels(spec: &RunSpec, pairs: &[PointPair], ov: Overrides) -> Result<(Vec<Complex64>, Option<Vec<Complex64>>)> {
    let cfg = &spec.cfg;
    match spec.scheme {
        Scheme::Eps => {
            let eps = match ov.epsilon {
                Some(e) => e,
                None => spec.epsilon()?,
            };
            let chars = spec.eps_chars()?;
            let moduli = spec.eps_moduli_at(eps)?;
            let pts = spec.eps_points(&moduli)?;
            let limit = |x: &SurfacePoint, y: &SurfacePoint| -> Result<Complex64> {
                if x.which != y.which {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                p1_theta(chars.twist(x.which), x.z - y.z, moduli.tau(x.which), cfg)
            };
            let limits: Result<Vec<Complex64>> = pts.iter().map(|(x, y)| limit(x, y)).collect();
            let limits = limits?;
            if eps.norm() == 0.0 {
                return Ok((limits.clone(), Some(limits)));
            }
            let sewing = EpsilonSewing::new(chars, moduli, spec.order(), cfg)?;
            let vals: Result<Vec<Complex64>> = pts.iter().map(|(x, y)| sewing.kernel(x, y)).collect();
            Ok((vals?, Some(limits)))
        }
        Scheme::RhoSphere => {
            let handle = spec.handle(1)?;
            let moduli = spec.sphere_moduli_at(ov.rho)?;
            let vals: Result<Vec<Complex64>> = pairs
                .iter()
                .map(|&((_, x), (_, y))| torus_from_sphere(&handle, x, y, &moduli, spec.order()))
                .collect();
            Ok((vals?, None))
        }
        Scheme::RhoTorus => {
            let tw1 = spec.twist(1)?;
            let handle = spec.handle(2)?;
            let rho = match ov.rho {
                Some(r) => r,
                None => spec.rho()?,
            };
            let moduli = spec.rho_moduli_at(rho)?;
            let sewing = RhoTorusSewing::new(&tw1, &handle, &moduli, &spec.rho_options(), cfg)?;
            let mut vals = Vec::with_capacity(pairs.len());
            let mut limits = Vec::with_capacity(pairs.len());
            for &((_, x), (_, y)) in pairs {
                vals.push(sewing.kernel(x, y)?);
                limits.push(s_kappa_torus(&tw1, &handle, x, y, &moduli, cfg)?);
            }
            Ok((vals, Some(limits)))
        }
    }
}

fn check_labels(spec: &RunSpec, pairs: &[PointPair]) -> Result<()> {
    if spec.scheme != Scheme::Eps && pairs.iter().any(|((a, _), (b, _))| *a != 1 || *b != 1) {
        return Err(Error::input(format!("--points: scheme {} has a single torus, labels must be 1", spec.scheme.name())));
    }
    Ok(())
}

pub fn cmd_eval(spec: &RunSpec) -> Result<Table> {
    if spec.flags.oracle && spec.scheme != Scheme::RhoSphere {
        return Err(Error::input("--oracle is only available for --scheme rho-sphere"));
    }
    let pairs = spec.points()?;
    check_labels(spec, &pairs)?;
    let (vals, _) = kernels(spec, &pairs, Overrides::default())?;
    let mut header = EVAL_HEADER.to_vec();
    let oracle = if spec.flags.oracle {
        header.extend(ORACLE_HEADER);
        let handle = spec.handle(1)?;
        let moduli = spec.sphere_moduli_at(None)?;
        let tau = spec.sphere_tau(&moduli)?;
        let o: Result<Vec<Complex64>> = pairs
            .iter()
            .map(|&((_, x), (_, y))| p1_series(&handle.as_twist(), x - y, &tau, &spec.cfg))
            .collect();
        Some(o?)
    } else {
        None
    };
    let mut t = Table::new(EVAL_SCHEMA, header);
    for (i, (((a, x), (b, y)), s)) in pairs.iter().zip(&vals).enumerate() {
        let mut row = vec![
            Cell::Int(*a as i64),
            Cell::Real(x.re),
            Cell::Real(x.im),
            Cell::Int(*b as i64),
            Cell::Real(y.re),
            Cell::Real(y.im),
            Cell::Real(s.re),
            Cell::Real(s.im),
        ];
        if let Some(o) = &oracle {
            row.extend([Cell::Real(o[i].re), Cell::Real(o[i].im), Cell::Real((s - o[i]).norm())]);
        }
        t.push(row);
    }
    Ok(t)
}

pub fn cmd_det(spec: &RunSpec) -> Result<Table> {
    let mut t = Table::new(DET_SCHEMA, DET_HEADER.to_vec());
    let mut push = |name: &str, v: Complex64| t.push(vec![Cell::Text(name.into()), Cell::Real(v.re), Cell::Real(v.im)]);
    match spec.scheme {
        Scheme::Eps => {
            let moduli = spec.eps_moduli_at(spec.epsilon()?)?;
            let sewing = EpsilonSewing::new(spec.eps_chars()?, moduli, spec.order(), &spec.cfg)?;
            let r = DetReport::compute(sewing.f(1), sewing.f(2), moduli.xi, DET_SERIES_TERMS)?;
            push("det_i_minus_q", r.det_full);
            push("det_i_minus_f1f2", r.det_block);
            push("det_log_series", r.det_series);
        }
        Scheme::RhoSphere => {
            let d = det_i_minus_t_sphere(&spec.handle(1)?, &spec.sphere_moduli_at(None)?, spec.order())?;
            push("det_i_minus_t", d.matrix);
            push("det_product", d.product);
        }
        Scheme::RhoTorus => {
            let moduli = spec.rho_moduli_at(spec.rho()?)?;
            let sewing = RhoTorusSewing::new(&spec.twist(1)?, &spec.handle(2)?, &moduli, &spec.rho_options(), &spec.cfg)?;
            push("det_i_minus_t", sewing.det());
        }
    }
    Ok(t)
}

pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::input(format!("--values: cannot parse {s:?}"))))
        .collect::<Result<_>>()?;
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::input("--values must be a non-empty list of finite reals"));
    }
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    Ok(v)
}

fn as_count(axis: &str, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e6 {
        Ok(v as usize)
    } else {
        Err(Error::input(format!("--values: {axis} values must be positive integers, got {v}")))
    }
}

/// Unit phase of an optional complex flag (1 when absent or zero).
fn phase(v: Result<Complex64>) -> Complex64 {
    match v {
        Ok(z) if z.norm() > 0.0 => z / z.norm(),
        _ => Complex64::new(1.0, 0.0),
    }
}

pub fn cmd_scan(spec: &RunSpec, axis: Axis, values: &[f64]) -> Result<Table> {
    let pairs = spec.points()?;
    check_labels(spec, &pairs)?;
    match (axis, spec.scheme) {
        (Axis::Epsilon, Scheme::Eps) | (Axis::Rho, Scheme::RhoSphere | Scheme::RhoTorus) | (Axis::N | Axis::M, _) => {}
        _ => return Err(Error::input(format!("axis {axis:?} does not apply to scheme {}", spec.scheme.name()))),
    }
    let mut series: Vec<(Vec<Complex64>, Option<Vec<Complex64>>)> = Vec::with_capacity(values.len());
    for &v in values {
        let mut s = spec.clone();
        let mut ov = Overrides::default();
        match axis {
            Axis::Epsilon => ov.epsilon = Some(phase(spec.epsilon()) * v),
            Axis::Rho => ov.rho = Some(phase(spec.rho()) * v),
            Axis::N => s.cfg.trunc_order = as_count("N", v)?,
            Axis::M => s.cfg.quad_points = as_count("M", v)?,
        }
        s.cfg.validate()?;
        series.push(kernels(&s, &pairs, ov)?);
    }
    let mut t = Table::new(SCAN_SCHEMA, SCAN_HEADER.to_vec());
    for p in 0..pairs.len() {
        let vals: Vec<Complex64> = series.iter().map(|(k, _)| k[p]).collect();
        let deltas: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let rate = differences_estimate(&deltas).ok().map(|e| e.rate);
        let slope = match axis {
            Axis::Epsilon | Axis::Rho => {
                let devs: Option<Vec<f64>> =
                    series.iter().map(|(k, l)| l.as_ref().map(|l| (k[p] - l[p]).norm())).collect();
                devs.and_then(|d| loglog_slope(values, &d).ok())
            }
            _ => None,
        };
        let opt = |v: Option<f64>| v.map(Cell::Real).unwrap_or(Cell::Empty);
        for (i, s) in vals.iter().enumerate() {
            t.push(vec![
                Cell::Real(values[i]),
                Cell::Int(p as i64),
                Cell::Real(s.re),
                Cell::Real(s.im),
                if i == 0 { Cell::Empty } else { Cell::Real(deltas[i - 1]) },
                opt(rate),
                opt(slope),
            ]);
        }
    }
    Ok(t)
}
