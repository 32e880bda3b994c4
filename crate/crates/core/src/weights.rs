//! Boundary weights on the unit circle.
//!
//! A weight `β(θ)` is the boundary conformal factor `|φ'(e^{iθ})|` of a map
//! from the disk onto some (possibly rough) planar domain, or a model of one.
//! Each variant knows where it is singular and how it behaves there, so the
//! quadrature in [`crate::fourier`] can grade its mesh and integrate the last
//! sliver next to a singular angle in closed form.

use std::f64::consts::{E, PI, TAU};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mobius::DiskAutomorphism;
use crate::quadrature::{wrap_angle, GaussLegendre};

/// Local behaviour `β(θ₀ + δ) ~ c |δ|^power (log 1/|δ|)^log_power` at a
/// registered angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub angle: f64,
    pub power: f64,
    pub log_power: f64,
}

impl Singularity {
    pub fn is_unbounded(&self) -> bool {
        self.power < 0.0 || (self.power == 0.0 && self.log_power > 0.0)
    }

    /// Whether `|δ|^p (log 1/|δ|)^q` is integrable at `δ = 0`.
    pub fn is_integrable(&self) -> bool {
        self.power > -1.0 || (self.power == -1.0 && self.log_power < -1.0)
    }

    /// Whether the local model lies in `L (log L)^a`.
    pub fn in_llog(&self, a: f64) -> bool {
        if self.power >= 0.0 {
            return true;
        }
        // f log(f)^a ~ |δ|^p (log 1/|δ|)^(q + a) up to constants.
        self.power > -1.0 || (self.power == -1.0 && self.log_power + a < -1.0)
    }
}

/// Parameters of the cusp model `c |θ|^{-1} (log(e + 1/|θ|))^{-1-1/α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspShape {
    pub alpha: f64,
    pub scale: f64,
    pub half_width: f64,
}

impl CuspShape {
    pub const DEFAULT_SCALE: f64 = 1.0;
    pub const DEFAULT_HALF_WIDTH: f64 = 1.0;

    fn log_power(&self) -> f64 {
        -1.0 - 1.0 / self.alpha
    }

    /// The model formula at distance `d > 0` from the cusp preimage.
    fn profile(&self, d: f64) -> f64 {
        // log(e + 1/d) = log(1/d) + log(1 + e d), safe for tiny d.
        let log_term = -d.ln() + (E * d).ln_1p();
        self.scale / d * log_term.powf(self.log_power())
    }

    /// Cusp formula inside `half_width`, cosine blend to 1 over the next
    /// `half_width`, constant 1 beyond.
    fn eval(&self, d: f64) -> f64 {
        let w = self.half_width;
        if d == 0.0 {
            f64::INFINITY
        } else if d <= w {
            self.profile(d)
        } else if d < 2.0 * w {
            let s = 0.5 * (1.0 - (PI * (d - w) / w).cos());
            (1.0 - s) * self.profile(d) + s
        } else {
            1.0
        }
    }

    /// `∫_0^h` of the profile: with `y = log(e + 1/x)`, `dx/x = -(1 + e x) dy`,
    /// and `e x ≤ e h` is negligible for the slivers this is used on.
    fn tail(&self, h: f64) -> f64 {
        let y = -h.ln() + (E * h).ln_1p();
        self.scale * self.alpha * y.powf(-1.0 / self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedWeight {
    nodes: Vec<f64>,
    values: Vec<f64>,
    source: Option<String>,
}

impl TabulatedWeight {
    /// Piecewise-linear weight through `(nodes[i], values[i])`. Nodes must be
    /// nondecreasing; a repeated node encodes a jump (right-continuous).
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(Error::InvalidParameter(
                "tabulated weight needs at least two (angle, value) pairs of equal length".into(),
            ));
        }
        if nodes.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "tabulated weight contains non-finite entries".into(),
            ));
        }
        if nodes.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "tabulated nodes must be nondecreasing".into(),
            ));
        }
        if nodes[0] == *nodes.last().unwrap() {
            return Err(Error::InvalidParameter(
                "tabulated nodes span an empty range".into(),
            ));
        }
        Ok(Self {
            nodes,
            values,
            source: None,
        })
    }

    /// Equispaced periodic samples `values[j]` at `2πj/m`, closed at `2π`.
    pub fn periodic(values: &[f64]) -> Result<Self> {
        let m = values.len();
        if m == 0 {
            return Err(Error::InvalidParameter("no samples".into()));
        }
        let nodes = (0..=m).map(|j| TAU * j as f64 / m as f64).collect();
        let mut closed = values.to_vec();
        closed.push(values[0]);
        Self::new(nodes, closed)
    }

    /// Two-column CSV `θ,β`; a non-numeric first row is taken as a header.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| csv_error(path, e))?;
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| csv_error(path, e))?;
            let parse = |i: usize| record.get(i).and_then(|s| s.parse::<f64>().ok());
            match (parse(0), parse(1)) {
                (Some(t), Some(b)) => {
                    nodes.push(t);
                    values.push(b);
                }
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::Parse {
                        input: path.display().to_string(),
                        reason: format!("row {} is not a numeric pair", row + 1),
                    })
                }
            }
        }
        let mut tab = Self::new(nodes, values)?;
        tab.source = Some(path.display().to_string());
        Ok(tab)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn eval(&self, theta: f64) -> Result<f64> {
        let lo = self.nodes[0];
        let hi = *self.nodes.last().unwrap();
        if !(lo..=hi).contains(&theta) {
            return Err(Error::InterpolationRange { theta, lo, hi });
        }
        let i = self.nodes.partition_point(|&x| x <= theta);
        if i == self.nodes.len() {
            return Ok(*self.values.last().unwrap());
        }
        let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        let t = (theta - x0) / (x1 - x0);
        Ok(y0 + t * (y1 - y0))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Parse {
        input: path.display().to_string(),
        reason: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobiusWeight {
    inner: Box<WeightDescriptor>,
    map: DiskAutomorphism,
    /// `(outer angle, inner angle)` for every transported singularity and kink.
    anchors: Vec<(f64, f64)>,
}

impl MobiusWeight {
    pub fn inner(&self) -> &WeightDescriptor {
        &self.inner
    }

    pub fn parameter(&self) -> Complex64 {
        self.map.parameter()
    }

    /// Inner angle and inner offset corresponding to `center + delta`.
    fn pull(&self, center: f64, delta: f64) -> (f64, f64) {
        match self.anchors.iter().find(|(outer, _)| *outer == center) {
            Some(&(_, inner)) => (inner, self.map.angle_increment(center, delta)),
            None => (self.map.map_angle(center + delta), 0.0),
        }
    }
}

/// Symbolic description of a boundary weight `β` on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightDescriptor {
    Constant(f64),
    /// `φ(z) = (z + 1)²`, `β(θ) = 4 |cos(θ/2)|`.
    Cardioid,
    /// Schwarz–Christoffel factor `|1 − e^{inθ}|^{-2/n}` of the regular n-gon.
    RegularPolygon(u32),
    SlowCusp(CuspShape),
    FastCuspModel(CuspShape),
    Mobius(MobiusWeight),
    Tabulated(TabulatedWeight),
    /// `Σ_k c_k cos(kθ)`; may change sign.
    Cosine(Vec<f64>),
    /// `min(β, cap)`.
    Capped { inner: Box<WeightDescriptor>, cap: f64 },
}

impl WeightDescriptor {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "constant weight must be positive, got {c}"
            )));
        }
        Ok(Self::Constant(c))
    }

    pub fn regular_polygon(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "a polygon needs at least 3 sides, got {n}"
            )));
        }
        Ok(Self::RegularPolygon(n))
    }

    pub fn slow_cusp(alpha: f64, scale: f64, half_width: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "slow cusp speed must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(Self::SlowCusp(cusp_shape(alpha, scale, half_width)?))
    }

    pub fn fast_cusp(alpha: f64, scale: f64, half_width: f64) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "fast cusp model needs alpha >= 1, got {alpha}"
            )));
        }
        Ok(Self::FastCuspModel(cusp_shape(alpha, scale, half_width)?))
    }

    pub fn cosine(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "cosine weight needs finite coefficients".into(),
            ));
        }
        Ok(Self::Cosine(coeffs))
    }

    pub fn capped(inner: WeightDescriptor, cap: f64) -> Result<Self> {
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cap must be positive and finite, got {cap}"
            )));
        }
        Ok(Self::Capped {
            inner: Box::new(inner),
            cap,
        })
    }

    /// `β(θ)` for `θ ∈ [0, 2π)`; `+∞` at registered unbounded singularities.
    pub fn eval(&self, theta: f64) -> Result<f64> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("angle {theta} is not finite")));
        }
        if let Self::Tabulated(t) = self {
            return t.eval(theta);
        }
        let theta = wrap_angle(theta);
        if self
            .singularities()
            .iter()
            .any(|s| s.angle == theta && s.is_unbounded())
        {
            return Ok(f64::INFINITY);
        }
        self.eval_offset(theta, 0.0)
    }

    /// `β(center + delta)`, exploiting the variant's closed form so that tiny
    /// offsets from a registered angle keep full precision.
    pub fn eval_offset(&self, center: f64, delta: f64) -> Result<f64> {
        Ok(match self {
            Self::Constant(c) => *c,
            Self::Cardioid => {
                if center == PI {
                    4.0 * (0.5 * delta).sin().abs()
                } else {
                    4.0 * (0.5 * (center + delta)).cos().abs()
                }
            }
            Self::RegularPolygon(n) => {
                let n = *n as f64;
                let j = (center * n / TAU).round();
                let arg = if center == TAU * j / n {
                    0.5 * n * delta
                } else {
                    0.5 * n * (center + delta)
                };
                (2.0 * arg.sin()).abs().powf(-2.0 / n)
            }
            Self::SlowCusp(shape) | Self::FastCuspModel(shape) => {
                let d = if center == 0.0 {
                    delta.abs()
                } else {
                    let t = wrap_angle(center + delta);
                    t.min(TAU - t)
                };
                shape.eval(d)
            }
            Self::Mobius(m) => {
                let (phi, inc) = m.pull(center, delta);
                m.inner.eval_offset(phi, inc)? * m.map.boundary_derivative(center + delta)
            }
            Self::Tabulated(t) => {
                let theta = center + delta;
                // Offsets that step past the closing node wrap around.
                let lo = t.nodes[0];
                let hi = *t.nodes.last().unwrap();
                if theta > hi && hi - lo >= TAU - 1e-12 {
                    t.eval(theta - TAU)?
                } else if theta < lo && hi - lo >= TAU - 1e-12 {
                    t.eval(theta + TAU)?
                } else {
                    t.eval(theta)?
                }
            }
            Self::Cosine(c) => {
                let theta = center + delta;
                c.iter()
                    .enumerate()
                    .map(|(k, a)| a * (k as f64 * theta).cos())
                    .sum()
            }
            Self::Capped { inner, cap } => inner.eval_offset(center, delta)?.min(*cap),
        })
    }

    /// Angles where `β` is unbounded or vanishes, with local exponents.
    pub fn singularities(&self) -> Vec<Singularity> {
        match self {
            Self::Constant(_) | Self::Tabulated(_) | Self::Cosine(_) => Vec::new(),
            Self::Cardioid => vec![Singularity {
                angle: PI,
                power: 1.0,
                log_power: 0.0,
            }],
            Self::RegularPolygon(n) => (0..*n)
                .map(|j| Singularity {
                    angle: TAU * j as f64 / *n as f64,
                    power: -2.0 / *n as f64,
                    log_power: 0.0,
                })
                .collect(),
            Self::SlowCusp(s) | Self::FastCuspModel(s) => vec![Singularity {
                angle: 0.0,
                power: -1.0,
                log_power: s.log_power(),
            }],
            Self::Mobius(m) => m
                .inner
                .singularities()
                .into_iter()
                .map(|s| Singularity {
                    angle: m.outer_of(s.angle),
                    ..s
                })
                .collect(),
            Self::Capped { inner, .. } => inner
                .singularities()
                .into_iter()
                .map(|s| {
                    if s.is_unbounded() {
                        Singularity {
                            power: 0.0,
                            log_power: 0.0,
                            ..s
                        }
                    } else {
                        s
                    }
                })
                .collect(),
        }
    }

    /// Angles where `β` is continuous but not smooth (or jumps).
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Self::SlowCusp(s) | Self::FastCuspModel(s) => {
                let w = s.half_width;
                vec![w, 2.0 * w, TAU - 2.0 * w, TAU - w]
            }
            Self::Tabulated(t) => t.nodes.iter().map(|&x| wrap_angle(x)).collect(),
            Self::Mobius(m) => m.inner.kinks().into_iter().map(|k| m.outer_of(k)).collect(),
            Self::Capped { inner, .. } => inner.kinks(),
            _ => Vec::new(),
        }
    }

    /// `∫` of `β(center + δ)` over `δ` between 0 and `h` (unsigned measure),
    /// for a sliver next to a registered angle.
    pub fn tail_integral(&self, center: f64, h: f64) -> Result<f64> {
        let len = h.abs();
        Ok(match self {
            Self::SlowCusp(s) | Self::FastCuspModel(s) if center == 0.0 && len <= s.half_width => {
                s.tail(len)
            }
            Self::RegularPolygon(n) => {
                let nf = *n as f64;
                let j = (center * nf / TAU).round();
                if center == TAU * j / nf {
                    let p = 1.0 - 2.0 / nf;
                    nf.powf(-2.0 / nf) * len.powf(p) / p
                } else {
                    self.sliver_by_quadrature(center, h)?
                }
            }
            Self::Cardioid if center == PI => 16.0 * (0.25 * len).sin().powi(2),
            Self::Mobius(m) => {
                let (phi, inc) = m.pull(center, h);
                if m.anchors.iter().any(|(outer, _)| *outer == center) {
                    m.inner.tail_integral(phi, inc)?
                } else {
                    self.sliver_by_quadrature(center, h)?
                }
            }
            Self::Capped { inner, cap } => {
                let edge = inner.eval_offset(center, h)?;
                if edge >= *cap {
                    cap * len
                } else {
                    inner.tail_integral(center, h)?
                }
            }
            _ => self.sliver_by_quadrature(center, h)?,
        })
    }

    fn sliver_by_quadrature(&self, center: f64, h: f64) -> Result<f64> {
        let rule = GaussLegendre::new(20);
        let (lo, hi) = if h >= 0.0 { (0.0, h) } else { (h, 0.0) };
        let mut total = 0.0;
        for (x, w) in rule.mapped(lo, hi) {
            total += w * self.eval_offset(center, x)?;
        }
        Ok(total)
    }

    /// First singularity that makes `β` non-integrable, if any.
    pub fn integrability_obstruction(&self) -> Option<Singularity> {
        self.singularities().into_iter().find(|s| !s.is_integrable())
    }

    /// First singularity that keeps `β` out of `L log L`, if any.
    pub fn llogl_obstruction(&self) -> Option<Singularity> {
        self.singularities().into_iter().find(|s| !s.in_llog(1.0))
    }

    /// Whether `β ≥ 0` everywhere.
    pub fn is_nonnegative(&self) -> bool {
        match self {
            Self::Tabulated(t) => t.values.iter().all(|&v| v >= 0.0),
            Self::Cosine(c) => {
                let bound: f64 = c.iter().skip(1).map(|x| x.abs()).sum();
                if c[0] >= bound {
                    return true;
                }
                let samples = 64 * c.len().max(8);
                (0..samples).all(|j| {
                    let theta = TAU * j as f64 / samples as f64;
                    self.eval_offset(theta, 0.0).map(|v| v >= 0.0).unwrap_or(false)
                })
            }
            Self::Mobius(m) => m.inner.is_nonnegative(),
            Self::Capped { inner, .. } => inner.is_nonnegative(),
            _ => true,
        }
    }

    /// Canonical text form; doubles as the weight id in spectral results.
    pub fn id(&self) -> String {
        self.to_string()
    }

    /// Text grammar accepted by [`FromStr`].
    pub const GRAMMAR: &'static str = "\
weight descriptors:
  constant:<c>                      β ≡ c
  cardioid                          β(θ) = 4|cos(θ/2)|
  ngon:<n>                          β(θ) = |1 − e^{inθ}|^(−2/n), n ≥ 3
  cusp:<alpha>[:c=<c>][:w=<width>]  slow cusp model, 0 < alpha < 1
  fastcusp:<alpha>[:c=<c>][:w=<width>]  fast cusp model, alpha ≥ 1
  mobius:<re>,<im>:<inner>          pushforward of <inner> under m_a, |a| < 1
  file:<path>                       two-column CSV θ,β (piecewise linear)
  cos:<c0>,<c1>,...                 β(θ) = Σ c_k cos(kθ), may change sign
  cap:<M>:<inner>                   min(<inner>, M)";
}

fn cusp_shape(alpha: f64, scale: f64, half_width: f64) -> Result<CuspShape> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "cusp scale must be positive, got {scale}"
        )));
    }
    if !(half_width > 0.0 && half_width <= 0.5 * PI) {
        return Err(Error::InvalidParameter(format!(
            "cusp half-width must lie in (0, π/2], got {half_width}"
        )));
    }
    Ok(CuspShape {
        alpha,
        scale,
        half_width,
    })
}

impl MobiusWeight {
    fn outer_of(&self, inner_angle: f64) -> f64 {
        self.anchors
            .iter()
            .find(|(_, inner)| *inner == inner_angle)
            .map(|&(outer, _)| outer)
            .unwrap_or_else(|| self.map.inverse().map_angle(inner_angle))
    }
}

/// Pushforward of `w` under the disk automorphism `m_a`:
/// `β_a(θ) = β(arg m_a(e^{iθ})) · |m_a'(e^{iθ})|`.
pub fn mobius_pushforward(w: &WeightDescriptor, a: Complex64) -> Result<WeightDescriptor> {
    let map = DiskAutomorphism::new(a)?;
    if a == Complex64::new(0.0, 0.0) {
        return Ok(w.clone());
    }
    let inverse = map.inverse();
    let mut anchors: Vec<(f64, f64)> = w
        .singularities()
        .iter()
        .map(|s| s.angle)
        .chain(w.kinks())
        .map(|inner| (inverse.map_angle(inner), inner))
        .collect();
    anchors.sort_by(|x, y| x.0.total_cmp(&y.0));
    anchors.dedup_by(|x, y| x.0 == y.0);
    Ok(WeightDescriptor::Mobius(MobiusWeight {
        inner: Box::new(w.clone()),
        map,
        anchors,
    }))
}

impl fmt::Display for WeightDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "constant:{c}"),
            Self::Cardioid => write!(f, "cardioid"),
            Self::RegularPolygon(n) => write!(f, "ngon:{n}"),
            Self::SlowCusp(s) => write!(f, "cusp:{}:c={}:w={}", s.alpha, s.scale, s.half_width),
            Self::FastCuspModel(s) => {
                write!(f, "fastcusp:{}:c={}:w={}", s.alpha, s.scale, s.half_width)
            }
            Self::Mobius(m) => {
                let a = m.parameter();
                write!(f, "mobius:{},{}:{}", a.re, a.im, m.inner)
            }
            Self::Tabulated(t) => match &t.source {
                Some(path) => write!(f, "file:{path}"),
                None => write!(f, "tabulated:{}", t.nodes.len()),
            },
            Self::Cosine(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "cos:{}", parts.join(","))
            }
            Self::Capped { inner, cap } => write!(f, "cap:{cap}:{inner}"),
        }
    }
}

impl FromStr for WeightDescriptor {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| fail(&format!("{s:?} is not a number")))
        };
        let s = input.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match (head, rest) {
            ("cardioid", None) => Ok(Self::Cardioid),
            ("constant", Some(r)) => Self::constant(num(r)?),
            ("ngon", Some(r)) => {
                let n = r
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| fail("polygon side count must be an integer"))?;
                Self::regular_polygon(n)
            }
            ("cusp", Some(r)) | ("fastcusp", Some(r)) => {
                let mut parts = r.split(':');
                let alpha = num(parts.next().unwrap_or(""))?;
                let mut scale = CuspShape::DEFAULT_SCALE;
                let mut width = CuspShape::DEFAULT_HALF_WIDTH;
                for opt in parts {
                    match opt.split_once('=') {
                        Some(("c", v)) => scale = num(v)?,
                        Some(("w", v)) => width = num(v)?,
                        _ => return Err(fail(&format!("unknown cusp option {opt:?}"))),
                    }
                }
                if head == "cusp" {
                    Self::slow_cusp(alpha, scale, width)
                } else {
                    Self::fast_cusp(alpha, scale, width)
                }
            }
            ("mobius", Some(r)) => {
                let (a, inner) = r
                    .split_once(':')
                    .ok_or_else(|| fail("expected mobius:<re>,<im>:<inner>"))?;
                let (re, im) = a
                    .split_once(',')
                    .ok_or_else(|| fail("expected mobius:<re>,<im>:<inner>"))?;
                let inner: WeightDescriptor = inner.parse()?;
                mobius_pushforward(&inner, Complex64::new(num(re)?, num(im)?))
            }
            ("file", Some(path)) => Ok(Self::Tabulated(TabulatedWeight::from_csv(Path::new(path))?)),
            ("cos", Some(r)) => {
                let coeffs = r.split(',').map(num).collect::<Result<Vec<_>>>()?;
                Self::cosine(coeffs)
            }
            ("cap", Some(r)) => {
                let (m, inner) = r
                    .split_once(':')
                    .ok_or_else(|| fail("expected cap:<M>:<inner>"))?;
                Self::capped(inner.parse()?, num(m)?)
            }
            _ => Err(fail("unknown weight descriptor")),
        }
    }
}

/// Point evaluation with `θ` required to lie in `[0, 2π)`.
pub fn eval_weight(w: &WeightDescriptor, theta: f64) -> Result<f64> {
    if !(0.0..TAU).contains(&theta) {
        if let WeightDescriptor::Tabulated(_) = w {
            return w.eval(theta);
        }
        return Err(Error::InvalidParameter(format!(
            "angle {theta} outside [0, 2π)"
        )));
    }
    w.eval(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cardioid_at_zero_is_four() {
        assert_eq!(eval_weight(&WeightDescriptor::Cardioid, 0.0).unwrap(), 4.0);
        assert_eq!(eval_weight(&WeightDescriptor::Cardioid, PI).unwrap(), 0.0);
    }

    #[test]
    fn constant_weight_is_flat() {
        let w = WeightDescriptor::constant(2.5).unwrap();
        for theta in [0.0, 1.0, 6.0] {
            assert_eq!(eval_weight(&w, theta).unwrap(), 2.5);
        }
        assert!(WeightDescriptor::constant(0.0).is_err());
    }

    #[test]
    fn square_weight_at_quarter_pi() {
        let w = WeightDescriptor::regular_polygon(4).unwrap();
        let got = eval_weight(&w, PI / 4.0).unwrap();
        assert!((got - 2f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(eval_weight(&w, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(eval_weight(&w, PI / 2.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn cusp_is_infinite_at_its_tip_and_one_far_away() {
        let w = WeightDescriptor::slow_cusp(0.5, 1.0, 1.0).unwrap();
        assert_eq!(eval_weight(&w, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(eval_weight(&w, PI).unwrap(), 1.0);
        // symmetric in θ ↦ −θ
        let a = eval_weight(&w, 0.3).unwrap();
        let b = eval_weight(&w, TAU - 0.3).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn cusp_blend_is_continuous() {
        let shape = cusp_shape(0.5, 2.0, 0.8).unwrap();
        for edge in [0.8, 1.6] {
            let l = shape.eval(edge - 1e-9);
            let r = shape.eval(edge + 1e-9);
            assert!((l - r).abs() < 1e-7, "{l} vs {r}");
        }
    }

    #[test]
    fn tabulated_range_error() {
        let t = TabulatedWeight::new(vec![0.5, 1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        let w = WeightDescriptor::Tabulated(t);
        assert!((w.eval(1.5).unwrap() - 2.5).abs() < 1e-15);
        assert!(matches!(
            w.eval(0.25),
            Err(Error::InterpolationRange { .. })
        ));
    }

    #[test]
    fn tabulated_repeated_node_is_a_jump() {
        let t = TabulatedWeight::new(vec![0.0, PI, PI, TAU], vec![1.0, 1.0, -1.0, -1.0]).unwrap();
        let w = WeightDescriptor::Tabulated(t);
        assert_eq!(w.eval(1.0).unwrap(), 1.0);
        assert_eq!(w.eval(PI).unwrap(), -1.0);
        assert_eq!(w.eval(4.0).unwrap(), -1.0);
        assert!(!w.is_nonnegative());
    }

    #[test]
    fn mobius_identity_and_bad_parameter() {
        let w = WeightDescriptor::constant(1.0).unwrap();
        assert_eq!(mobius_pushforward(&w, Complex64::new(0.0, 0.0)).unwrap(), w);
        assert!(matches!(
            mobius_pushforward(&w, Complex64::new(1.0, 0.0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn mobius_transports_polygon_vertices() {
        let w = WeightDescriptor::regular_polygon(3).unwrap();
        let a = Complex64::new(0.4, 0.1);
        let pushed = mobius_pushforward(&w, a).unwrap();
        let m = DiskAutomorphism::new(a).unwrap();
        for s in pushed.singularities() {
            let inner = m.map_angle(s.angle);
            let k = inner * 3.0 / TAU;
            assert!((k - k.round()).abs() < 1e-12 || (k - 3.0).abs() < 1e-12);
            assert_eq!(pushed.eval(s.angle).unwrap(), f64::INFINITY);
            assert_eq!(s.power, -2.0 / 3.0);
        }
    }

    #[test]
    fn descriptor_text_roundtrip() {
        for text in [
            "constant:2",
            "cardioid",
            "ngon:5",
            "cusp:0.5:c=1:w=1",
            "fastcusp:2:c=1:w=0.5",
            "mobius:0.3,-0.2:cardioid",
            "cos:1,2",
            "cap:1000000:fastcusp:2:c=1:w=1",
        ] {
            let w: WeightDescriptor = text.parse().unwrap();
            assert_eq!(w.to_string(), text);
        }
        let short: WeightDescriptor = "cusp:0.5".parse().unwrap();
        assert_eq!(short.to_string(), "cusp:0.5:c=1:w=1");
    }

    #[test]
    fn descriptor_parse_errors() {
        for bad in ["circle", "ngon:2", "ngon:x", "cusp:1.5", "fastcusp:0.5", "mobius:1,0:cardioid", "constant:-1", "cusp:0.5:z=3"] {
            assert!(bad.parse::<WeightDescriptor>().is_err(), "{bad} should fail");
        }
    }

    #[test]
    fn csv_loader_skips_header() {
        let dir = std::env::temp_dir().join(format!("steklov-w-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.csv");
        std::fs::write(&path, "theta,beta\n0,1\n3.14,2\n6.3,1\n").unwrap();
        let w: WeightDescriptor = format!("file:{}", path.display()).parse().unwrap();
        assert!((w.eval(1.57).unwrap() - 1.5).abs() < 1e-12);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn registry_exponents() {
        let slow = WeightDescriptor::slow_cusp(0.5, 1.0, 1.0).unwrap();
        let s = slow.singularities()[0];
        assert_eq!((s.power, s.log_power), (-1.0, -3.0));
        assert!(s.is_integrable() && s.in_llog(1.0));
        let fast = WeightDescriptor::fast_cusp(2.0, 1.0, 1.0).unwrap();
        let s = fast.singularities()[0];
        assert!(s.is_integrable() && !s.in_llog(1.0));
        assert!(fast.llogl_obstruction().is_some());
        let capped = WeightDescriptor::capped(fast, 1e6).unwrap();
        assert!(capped.llogl_obstruction().is_none());
    }

    fn catalog() -> Vec<WeightDescriptor> {
        vec![
            WeightDescriptor::constant(1.3).unwrap(),
            WeightDescriptor::Cardioid,
            WeightDescriptor::regular_polygon(3).unwrap(),
            WeightDescriptor::regular_polygon(6).unwrap(),
            WeightDescriptor::slow_cusp(0.5, 1.0, 1.0).unwrap(),
            WeightDescriptor::fast_cusp(2.0, 1.0, 0.5).unwrap(),
            mobius_pushforward(&WeightDescriptor::Cardioid, Complex64::new(0.0, 0.3)).unwrap(),
            WeightDescriptor::capped(WeightDescriptor::regular_polygon(4).unwrap(), 3.0).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn catalog_weights_are_nonnegative(theta in 0.0..TAU) {
            for w in catalog() {
                let v = eval_weight(&w, theta).unwrap();
                prop_assert!(v >= 0.0, "{w} at {theta} gave {v}");
            }
        }

        #[test]
        fn eval_offset_agrees_with_eval(theta in 0.01..6.27f64, delta in -1e-3..1e-3f64) {
            for w in catalog() {
                let direct = w.eval(wrap_angle(theta + delta)).unwrap();
                let offset = w.eval_offset(theta, delta).unwrap();
                if direct.is_finite() {
                    prop_assert!((direct - offset).abs() <= 1e-9 * direct.abs().max(1.0));
                }
            }
        }
    }
}
