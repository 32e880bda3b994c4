//! Luxemburg norms on the Orlicz spaces `L (log L)^a` and `exp L^{1/a}`,
//! evaluated on sampled functions, and numerical `L (log L)^a` membership
//! scans for boundary weights.

use crate::error::{Error, Result};
use crate::fourier::weight_grid_with;
use crate::weights::WeightDescriptor;

/// Relative width of the final bisection bracket.
pub const BRACKET_RTOL: f64 = 1e-10;

/// A function sampled at quadrature nodes of a finite measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub measure_weights: Vec<f64>,
    pub total_measure: f64,
}

impl SampledFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, measure_weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() || nodes.len() != measure_weights.len() {
            return Err(Error::InvalidParameter(format!(
                "sample lists must share a nonzero length (nodes {}, values {}, weights {})",
                nodes.len(),
                values.len(),
                measure_weights.len()
            )));
        }
        if let Some(w) = measure_weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(format!("measure weight {w} is not positive")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample value {v} is not finite")));
        }
        let total_measure = measure_weights.iter().sum();
        Ok(Self {
            nodes,
            values,
            measure_weights,
            total_measure,
        })
    }

    /// Equal weights on `n = values.len()` nodes of `[0, total_measure)`.
    pub fn uniform(values: Vec<f64>, total_measure: f64) -> Result<Self> {
        let n = values.len();
        let h = total_measure / n as f64;
        let nodes = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        Self::new(nodes, values, vec![h; n])
    }

    /// Same nodes and measure, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::InvalidParameter("value list length does not match nodes".into()));
        }
        Self::new(self.nodes.clone(), values, self.measure_weights.clone())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `∫ |f| dμ`.
    pub fn l1_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.measure_weights)
            .map(|(v, w)| w * v.abs())
            .sum()
    }

    fn same_measure(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.measure_weights == other.measure_weights
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrliczNorm {
    pub value: f64,
    pub exponent: f64,
    pub modular_at_value: f64,
    pub bracket: (f64, f64),
}

/// `Σ w_i |f_i/t| (log(2 + |f_i/t|))^a`.
pub fn llog_modular(f: &SampledFunction, a: f64, t: f64) -> f64 {
    f.values
        .iter()
        .zip(&f.measure_weights)
        .map(|(v, w)| {
            let x = v.abs() / t;
            if x == 0.0 {
                0.0
            } else {
                w * x * (2.0 + x).ln().powf(a)
            }
        })
        .sum()
}

/// `Σ w_i (exp(|u_i/t|^{1/a}) − 1)`; `+∞` once a term would overflow.
pub fn expl_modular(u: &SampledFunction, a: f64, t: f64) -> f64 {
    let mut total = 0.0;
    for (v, w) in u.values.iter().zip(&u.measure_weights) {
        let x = v.abs() / t;
        if x == 0.0 {
            continue;
        }
        let e = (x.ln() / a).exp();
        if e > 700.0 {
            return f64::INFINITY;
        }
        total += w * e.exp_m1();
    }
    total
}

/// Smallest `t` with `modular(t) ≤ 1`, for a modular decreasing in `t`.
fn luxemburg(modular: impl Fn(f64) -> f64, exponent: f64, scale: f64) -> OrliczNorm {
    // Start from a bracket around the sample's own scale and widen it.
    let mut hi = scale.max(f64::MIN_POSITIVE);
    while modular(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while lo > f64::MIN_POSITIVE && modular(lo) <= 1.0 {
        lo *= 0.5;
    }
    if lo == hi {
        lo = f64::MIN_POSITIVE;
    }
    while hi - lo > BRACKET_RTOL * hi {
        let mid = (0.5 * (lo.ln() + hi.ln())).exp().clamp(lo, hi);
        let mid = if mid <= lo || mid >= hi { 0.5 * (lo + hi) } else { mid };
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    OrliczNorm {
        value: hi,
        exponent,
        modular_at_value: modular(hi),
        bracket: (lo, hi),
    }
}

fn zero_norm(exponent: f64) -> OrliczNorm {
    OrliczNorm {
        value: 0.0,
        exponent,
        modular_at_value: 0.0,
        bracket: (0.0, 0.0),
    }
}

fn check_exponent(a: f64, allow_zero: bool) -> Result<()> {
    let ok = a.is_finite() && (a > 0.0 || (allow_zero && a == 0.0));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("Orlicz exponent {a} out of range")))
    }
}

/// Luxemburg norm in `L (log L)^a`.
pub fn llog_norm(f: &SampledFunction, a: f64) -> Result<OrliczNorm> {
    check_exponent(a, true)?;
    if f.is_zero() {
        return Ok(zero_norm(a));
    }
    Ok(luxemburg(|t| llog_modular(f, a, t), a, f.l1_norm()))
}

/// Luxemburg norm in `exp L^{1/a}` with the modular `∫ (exp(|u/t|^{1/a}) − 1) dμ`.
pub fn expl_norm(u: &SampledFunction, a: f64) -> Result<OrliczNorm> {
    check_exponent(a, false)?;
    if u.is_zero() {
        return Ok(zero_norm(a));
    }
    let scale = u.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(luxemburg(|t| expl_modular(u, a, t), a, scale))
}

/// `(‖f u‖_{L¹}, ‖f‖_{L(log L)^a} · ‖u‖_{exp L^{1/a}})`.
pub fn holder_check(f: &SampledFunction, u: &SampledFunction, a: f64) -> Result<(f64, f64)> {
    if !f.same_measure(u) {
        return Err(Error::InvalidParameter("functions are sampled on different measures".into()));
    }
    let product = f.with_values(f.values.iter().zip(&u.values).map(|(x, y)| x * y).collect())?;
    let lhs = product.l1_norm();
    let rhs = llog_norm(f, a)?.value * expl_norm(u, a)?.value;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Convergent,
    Divergent,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Convergent => "CONVERGENT",
            Verdict::Divergent => "DIVERGENT",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Exponents `(p, q)` of `β(θ₀ + δ) ≈ c |δ|^p (log 1/|δ|)^q`, fitted from
/// samples at `|δ| = 10^{-30} … 10^{-300}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalExponent {
    pub angle: f64,
    pub power: f64,
    pub log_power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipScan {
    pub caps: Vec<f64>,
    pub norms: Vec<f64>,
    pub exponents: Vec<LocalExponent>,
    pub verdict: Verdict,
}

/// Width of the innermost graded panel in membership scans.
const SCAN_MIN_WIDTH: f64 = 1e-40;
/// Exponent slack when comparing fitted exponents with the critical line.
const EXPONENT_SLACK: f64 = 0.02;

/// `‖min(β, M)‖_{L(log L)^a}` for each cap `M`, with a boundedness verdict.
///
/// Capped norms grow only like a power of `log log M` at the borderline, so
/// the trend across caps is backed by the fitted local exponents at each
/// unbounded registered angle: `β ∈ L (log L)^a` there iff `p > −1`, or
/// `p = −1` and `q + a < −1`.
pub fn llog_membership_scan(w: &WeightDescriptor, a: f64, caps: &[f64]) -> Result<MembershipScan> {
    check_exponent(a, true)?;
    if caps.is_empty() {
        return Err(Error::InvalidParameter("need at least one cap".into()));
    }
    if caps.iter().any(|c| !(*c > 0.0 && c.is_finite())) || caps.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidParameter("caps must be positive and strictly increasing".into()));
    }

    let grid = weight_grid_with(w, 0, 2, &[], SCAN_MIN_WIDTH);
    let mut nodes = Vec::with_capacity(grid.points.len() + grid.tails.len());
    let mut raw = Vec::with_capacity(nodes.capacity());
    let mut measure = Vec::with_capacity(nodes.capacity());
    for p in &grid.points {
        nodes.push(p.angle());
        raw.push(w.eval_offset(p.center, p.offset)?);
        measure.push(p.weight);
    }
    for t in &grid.tails {
        // The sliver enters with its mean value.
        nodes.push(t.center + 0.5 * t.h);
        raw.push(w.tail_integral(t.center, t.h)? / t.h.abs());
        measure.push(t.h.abs());
    }

    let mut norms = Vec::with_capacity(caps.len());
    for &cap in caps {
        let f = SampledFunction::new(
            nodes.clone(),
            raw.iter().map(|v| v.abs().min(cap)).collect(),
            measure.clone(),
        )?;
        norms.push(llog_norm(&f, a)?.value);
    }

    let exponents = w
        .singularities()
        .iter()
        .filter(|s| s.is_unbounded())
        .map(|s| fit_local_exponent(w, s.angle))
        .collect::<Result<Vec<_>>>()?;

    let verdict = classify(a, caps, &norms, &exponents);
    Ok(MembershipScan {
        caps: caps.to_vec(),
        norms,
        exponents,
        verdict,
    })
}

fn classify(a: f64, caps: &[f64], norms: &[f64], exponents: &[LocalExponent]) -> Verdict {
    let n = norms.len();
    let growth_per_decade = if n >= 2 {
        let decades = (caps[n - 1] / caps[n - 2]).log10();
        (norms[n - 1] / norms[n - 2] - 1.0) / decades.max(f64::MIN_POSITIVE)
    } else {
        0.0
    };
    if growth_per_decade > 0.10 {
        return Verdict::Divergent;
    }
    if !exponents.is_empty() {
        let divergent = exponents.iter().any(|e| {
            e.power < -1.0 - EXPONENT_SLACK
                || (e.power <= -1.0 + EXPONENT_SLACK && e.log_power + a >= -1.0 - EXPONENT_SLACK)
        });
        return if divergent {
            Verdict::Divergent
        } else {
            Verdict::Convergent
        };
    }
    if n >= 2 && (norms[n - 1] - norms[n - 2]).abs() < 0.01 * norms[n - 1].abs() {
        Verdict::Convergent
    } else {
        Verdict::Inconclusive
    }
}

/// Least-squares fit of `ln β = ln c + p ln δ + q ln ln(1/δ)` on both sides
/// of `angle`.
fn fit_local_exponent(w: &WeightDescriptor, angle: f64) -> Result<LocalExponent> {
    let mut rows = Vec::new();
    for j in (30..=300).step_by(10) {
        let delta = 10f64.powi(-j);
        for side in [delta, -delta] {
            let v = w.eval_offset(angle, side)?.abs();
            if v > 0.0 && v.is_finite() {
                let l = delta.ln();
                rows.push([1.0, l, (-l).ln(), v.ln()]);
            }
        }
    }
    let (power, log_power) = if rows.len() < 3 {
        (0.0, 0.0)
    } else {
        let x = least_squares_3(&rows);
        (x[1], x[2])
    };
    Ok(LocalExponent {
        angle,
        power,
        log_power,
    })
}

/// Normal equations for three unknowns, solved by Gaussian elimination with
/// partial pivoting. Each row is `[x0, x1, x2, y]`.
fn least_squares_3(rows: &[[f64; 4]]) -> [f64; 3] {
    let mut m = [[0.0f64; 4]; 3];
    for r in rows {
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += r[i] * r[j];
            }
            m[i][3] += r[i] * r[3];
        }
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][3] - s) / m[i][i];
    }
    x
}
