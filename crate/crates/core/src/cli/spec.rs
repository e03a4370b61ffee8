//! Command-line flags, the optional JSON config file, and their resolution into module inputs.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde_json::Value;

use crate::epsilon_sew::{EpsilonModuli, GenusTwoCharacteristicsEps, SurfacePoint, Xi};
use crate::error::{Error, Result};
use crate::numerics::NumericConfig;
use crate::rho_sew::{HandleTwist, RhoModuliSphere, RhoModuliTorus, RhoOptions};
use crate::specialfn::{TorusModulus, TwistPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Eps,
    RhoSphere,
    RhoTorus,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Eps => "eps",
            Scheme::RhoSphere => "rho-sphere",
            Scheme::RhoTorus => "rho-torus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand. Complex values are written `re,im`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// JSON object whose keys are flag names (without dashes); flags on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<String>,
    /// Sewing parameter; for `rho-sphere` this is `q` (ignored when `--tau` is given).
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<String>,
    /// Semicolon-separated pairs `which:re,im,which:re,im`; `which:` may be omitted (torus 1).
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub quad: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// rho-sphere only: also print the genus-one kernel of the sewn torus.
    #[arg(long)]
    pub oracle: bool,
}

fn value_text(key: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Array(items) if items.len() == 2 && items.iter().all(Value::is_number) => {
            Ok(format!("{},{}", items[0], items[1]))
        }
        _ => Err(Error::input(format!("config key {key:?} has an unsupported value {v}"))),
    }
}

fn parse_real(key: &str, text: &str) -> Result<f64> {
    text.trim().parse().map_err(|_| Error::input(format!("--{key}: cannot parse {text:?} as a real number")))
}

impl RunFlags {
    /// Fills every unset flag from the config file named by `--config`.
    pub fn with_config(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::input(format!("cannot read config {}: {e}", path.display())))?;
        let map: BTreeMap<String, Value> = serde_json::from_str(&text)
            .map_err(|e| Error::input(format!("config {} is not a JSON object: {e}", path.display())))?;
        for (key, v) in &map {
            let text = || value_text(key, v);
            macro_rules! fill {
                ($field:ident) => {
                    if self.$field.is_none() {
                        self.$field = Some(text()?);
                    }
                };
            }
            macro_rules! fill_real {
                ($field:ident) => {
                    if self.$field.is_none() {
                        self.$field = Some(parse_real(key, &text()?)?);
                    }
                };
            }
            match key.as_str() {
                "scheme" => {
                    if self.scheme.is_none() {
                        self.scheme = Some(
                            Scheme::from_str(&text()?, false).map_err(|e| Error::input(format!("scheme: {e}")))?,
                        );
                    }
                }
                "format" => {
                    if self.format.is_none() {
                        self.format = Some(
                            Format::from_str(&text()?, false).map_err(|e| Error::input(format!("format: {e}")))?,
                        );
                    }
                }
                "tau1" => fill!(tau1),
                "tau2" => fill!(tau2),
                "tau" => fill!(tau),
                "w" => fill!(w),
                "eps" => fill!(eps),
                "rho" => fill!(rho),
                "theta1" => fill!(theta1),
                "phi1" => fill!(phi1),
                "theta2" => fill!(theta2),
                "phi2" => fill!(phi2),
                "points" => fill!(points),
                "xi" => fill!(xi),
                "alpha1" => fill_real!(alpha1),
                "beta1" => fill_real!(beta1),
                "alpha2" => fill_real!(alpha2),
                "beta2" => fill_real!(beta2),
                "order" | "quad" => {
                    let n = v
                        .as_u64()
                        .ok_or_else(|| Error::input(format!("config key {key:?} must be a positive integer")))?
                        as usize;
                    let slot = if key == "order" { &mut self.order } else { &mut self.quad };
                    slot.get_or_insert(n);
                }
                "out" => {
                    if self.out.is_none() {
                        self.out = Some(PathBuf::from(text()?));
                    }
                }
                "oracle" => self.oracle |= v.as_bool().unwrap_or(false),
                other => return Err(Error::input(format!("unknown config key {other:?}"))),
            }
        }
        Ok(self)
    }
}

/// `re,im` or a bare real.
pub fn parse_complex(field: &str, text: &str) -> Result<Complex64> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::input(format!("--{field}: cannot parse {text:?} as re,im")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::input(format!("--{field}: expected re,im, got {text:?}"))),
    }
}

/// A pair of evaluation points with their torus labels.
pub type PointPair = ((usize, Complex64), (usize, Complex64));

fn parse_point(field: &str, re: &str, im: &str) -> Result<(usize, Complex64)> {
    let (which, re) = match re.split_once(':') {
        Some((w, r)) => {
            let w: usize =
                w.trim().parse().map_err(|_| Error::input(format!("--{field}: bad torus label {w:?}")))?;
            (w, r)
        }
        None => (1, re),
    };
    if which != 1 && which != 2 {
        return Err(Error::input(format!("--{field}: torus label must be 1 or 2, got {which}")));
    }
    Ok((which, parse_complex(field, &format!("{re},{im}"))?))
}

pub fn parse_points(text: &str) -> Result<Vec<PointPair>> {
    let mut out = Vec::new();
    for chunk in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
        let t: Vec<&str> = chunk.split(',').map(str::trim).collect();
        if t.len() != 4 {
            return Err(Error::input(format!("--points: expected which:re,im,which:re,im, got {chunk:?}")));
        }
        out.push((parse_point("points", t[0], t[1])?, parse_point("points", t[2], t[3])?));
    }
    if out.is_empty() {
        return Err(Error::input("--points: no point pairs given"));
    }
    Ok(out)
}

/// Flags resolved against the config file, with parse errors already reported.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub scheme: Scheme,
    pub flags: RunFlags,
    pub format: Format,
    pub cfg: NumericConfig,
}

impl RunSpec {
    pub fn resolve(flags: RunFlags) -> Result<Self> {
        let flags = flags.with_config()?;
        let scheme = flags.scheme.ok_or_else(|| Error::input("--scheme is required"))?;
        let mut cfg = NumericConfig::default();
        if let Some(n) = flags.order {
            cfg.trunc_order = n;
        }
        if let Some(m) = flags.quad {
            cfg.quad_points = m;
        }
        cfg.validate()?;
        Ok(Self { scheme, format: flags.format.unwrap_or_default(), flags, cfg })
    }

    fn complex(&self, field: &str, v: &Option<String>) -> Result<Complex64> {
        let text = v.as_ref().ok_or_else(|| Error::input(format!("--{field} is required for this scheme")))?;
        parse_complex(field, text)
    }

    fn optional_complex(&self, field: &str, v: &Option<String>) -> Result<Option<Complex64>> {
        v.as_ref().map(|t| parse_complex(field, t)).transpose()
    }

    pub fn order(&self) -> usize {
        self.cfg.trunc_order
    }

    pub fn xi(&self) -> Result<Xi> {
        self.flags.xi.as_deref().map(Xi::parse).unwrap_or(Ok(Xi::PlusI))
    }

    pub fn torus(&self, field: &str, v: &Option<String>) -> Result<TorusModulus> {
        TorusModulus::new(self.complex(field, v)?)
    }

    /// Multiplier pair `j` from `--theta{j} --phi{j}` or `--alpha{j} --beta{j}`.
    pub fn twist(&self, j: usize) -> Result<TwistPair> {
        let f = &self.flags;
        let (theta, phi, alpha, beta) = if j == 1 {
            (&f.theta1, &f.phi1, f.alpha1, f.beta1)
        } else {
            (&f.theta2, &f.phi2, f.alpha2, f.beta2)
        };
        match (theta, phi, alpha, beta) {
            (Some(t), Some(p), None, None) => {
                let t = parse_complex(&format!("theta{j}"), t)?;
                let p = parse_complex(&format!("phi{j}"), p)?;
                for (name, v) in [("theta", t), ("phi", p)] {
                    if (v.norm() - 1.0).abs() > 1e-12 {
                        return Err(Error::input(format!("--{name}{j} must have modulus 1, got |{v}| = {}", v.norm())));
                    }
                }
                TwistPair::new(t, p)
            }
            (None, None, Some(a), Some(b)) => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::input(format!("--alpha{j} and --beta{j} must be finite")));
                }
                Ok(TwistPair::from_characteristics(a, b))
            }
            _ => Err(Error::input(format!(
                "characteristics {j}: give exactly one of (--theta{j}, --phi{j}) or (--alpha{j}, --beta{j})"
            ))),
        }
    }

    pub fn handle(&self, j: usize) -> Result<HandleTwist> {
        let tw = self.twist(j)?;
        HandleTwist::new(tw.theta(), tw.phi())
    }

    pub fn points(&self) -> Result<Vec<PointPair>> {
        parse_points(self.flags.points.as_deref().ok_or_else(|| Error::input("--points is required"))?)
    }

    pub fn eps_chars(&self) -> Result<GenusTwoCharacteristicsEps> {
        GenusTwoCharacteristicsEps::new(self.twist(1)?, self.twist(2)?)
    }

    pub fn epsilon(&self) -> Result<Complex64> {
        self.complex("eps", &self.flags.eps)
    }

    pub fn eps_moduli_at(&self, eps: Complex64) -> Result<EpsilonModuli> {
        EpsilonModuli::new(self.torus("tau1", &self.flags.tau1)?, self.torus("tau2", &self.flags.tau2)?, eps, self.xi()?)
    }

    pub fn eps_points(&self, moduli: &EpsilonModuli) -> Result<Vec<(SurfacePoint, SurfacePoint)>> {
        self.points()?
            .into_iter()
            .map(|((a, x), (b, y))| {
                let (p, q) = (SurfacePoint::new(a, x)?, SurfacePoint::new(b, y)?);
                p.validate(moduli)?;
                q.validate(moduli)?;
                Ok((p, q))
            })
            .collect()
    }

    /// The sphere's `q`, from `--tau` (`q = e^{2 pi i tau}`) or else `--rho`.
    pub fn sphere_moduli_at(&self, q: Option<Complex64>) -> Result<RhoModuliSphere> {
        let xi = self.xi()?;
        if let Some(q) = q {
            return RhoModuliSphere::new(q, xi);
        }
        match self.optional_complex("tau", &self.flags.tau)? {
            Some(t) => RhoModuliSphere::from_tau(&TorusModulus::new(t)?, xi),
            None => RhoModuliSphere::new(self.complex("rho", &self.flags.rho)?, xi),
        }
    }

    /// The torus modulus of the sewn sphere, `log q / 2 pi i` on the recorded branch.
    pub fn sphere_tau(&self, m: &RhoModuliSphere) -> Result<TorusModulus> {
        TorusModulus::new(m.log_q() / Complex64::new(0.0, 2.0 * PI))
    }

    pub fn rho(&self) -> Result<Complex64> {
        self.complex("rho", &self.flags.rho)
    }

    pub fn rho_moduli_at(&self, rho: Complex64) -> Result<RhoModuliTorus> {
        RhoModuliTorus::new(
            self.torus("tau", &self.flags.tau)?,
            self.complex("w", &self.flags.w)?,
            rho,
            self.xi()?,
            &self.cfg,
        )
    }

    pub fn rho_options(&self) -> RhoOptions {
        RhoOptions { order: self.cfg.trunc_order, quad_points: self.cfg.quad_points, contour_scale: 1.0 }
    }
}
