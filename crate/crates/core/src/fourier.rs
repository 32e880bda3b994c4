//! Fourier coefficients and total mass of boundary weights.
//!
//! `b̂(k) = (1/2π) ∫₀^{2π} β(θ) e^{-ikθ} dθ`, computed on a composite
//! Gauss–Legendre grid that is split at every registered angle and graded
//! geometrically toward the singular ones. The grid is refined by panel
//! doubling until two successive levels agree to the requested tolerance.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{BoundaryGrid, Break, GridSpec};
use crate::weights::WeightDescriptor;

const RULE_ORDER: usize = 20;
/// Geometric grading stops at this panel width; the rest is a closed-form tail.
pub const MIN_PANEL_WIDTH: f64 = 1e-12;
/// Phase advance `k · width` allowed per panel at the highest order.
const PHASE_PER_PANEL: f64 = 6.0;
const MAX_REFINEMENT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    order: usize,
    coeffs: Vec<Complex64>,
    quad_error: Vec<f64>,
}

impl FourierCoefficients {
    /// Truncation order `K`; coefficients run over `−K..=K`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let idx = (k + self.order as i64) as usize;
        self.coeffs[idx]
    }

    /// Error estimate for `b̂(k)` (panel-doubling difference plus a roundoff floor).
    pub fn error(&self, k: i64) -> f64 {
        self.quad_error[k.unsigned_abs() as usize]
    }

    pub fn max_error(&self) -> f64 {
        self.quad_error.iter().copied().fold(0.0, f64::max)
    }

    /// `∫ β cos(kθ) dθ = 2π Re b̂(k)`.
    pub fn cosine_moment(&self, k: i64) -> f64 {
        TAU * self.get(k).re
    }

    /// `∫ β sin(kθ) dθ = −2π Im b̂(k)`.
    pub fn sine_moment(&self, k: i64) -> f64 {
        -TAU * self.get(k).im
    }

    fn from_nonnegative(order: usize, half: Vec<Complex64>, err: Vec<f64>) -> Self {
        let mut coeffs = Vec::with_capacity(2 * order + 1);
        coeffs.extend(half[1..].iter().rev().map(|c| c.conj()));
        coeffs.extend(half.iter().copied());
        Self {
            order,
            coeffs,
            quad_error: err,
        }
    }
}

/// Fourier coefficients `b̂(−K..=K)` of `w`, each accurate to about `tol`.
pub fn fourier_coeffs(w: &WeightDescriptor, order: usize, tol: f64) -> Result<FourierCoefficients> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    if let Some(s) = w.integrability_obstruction() {
        return Err(Error::DivergentWeight {
            angle: s.angle,
            power: s.power,
            log_power: s.log_power,
        });
    }
    if let WeightDescriptor::Constant(c) = w {
        let mut half = vec![Complex64::new(0.0, 0.0); order + 1];
        half[0] = Complex64::new(*c, 0.0);
        return Ok(FourierCoefficients::from_nonnegative(
            order,
            half,
            vec![0.0; order + 1],
        ));
    }

    let mut refine = 1;
    let mut coarse = coefficients_at(w, order, refine)?;
    loop {
        let fine = coefficients_at(w, order, 2 * refine)?;
        let floor = roundoff_floor(&fine);
        let err: Vec<f64> = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).norm() + floor)
            .collect();
        let worst = err.iter().copied().fold(0.0, f64::max);
        refine *= 2;
        if worst <= tol || refine >= MAX_REFINEMENT {
            return Ok(FourierCoefficients::from_nonnegative(order, fine, err));
        }
        coarse = fine;
    }
}

/// `∫₀^{2π} β dθ`.
pub fn perimeter(w: &WeightDescriptor, tol: f64) -> Result<f64> {
    Ok(TAU * fourier_coeffs(w, 0, tol)?.get(0).re)
}

/// `(∫ β₊ dθ, ∫ β₋ dθ)` for a possibly sign-changing weight, with the grid
/// additionally split at every sign change.
pub fn signed_masses(w: &WeightDescriptor, tol: f64) -> Result<(f64, f64)> {
    if let Some(s) = w.integrability_obstruction() {
        return Err(Error::DivergentWeight {
            angle: s.angle,
            power: s.power,
            log_power: s.log_power,
        });
    }
    let roots = sign_changes(w)?;
    let mut previous: Option<(f64, f64)> = None;
    let mut refine = 1;
    loop {
        let grid = weight_grid(w, 0, refine, &roots);
        let mut pos = 0.0;
        let mut neg = 0.0;
        for p in &grid.points {
            let v = w.eval_offset(p.center, p.offset)?;
            if v > 0.0 {
                pos += p.weight * v;
            } else {
                neg -= p.weight * v;
            }
        }
        for t in &grid.tails {
            let v = w.tail_integral(t.center, t.h)?;
            if v >= 0.0 {
                pos += v;
            } else {
                neg -= v;
            }
        }
        if let Some((p0, n0)) = previous {
            if ((pos - p0).abs() + (neg - n0).abs() <= tol) || refine >= MAX_REFINEMENT {
                return Ok((pos, neg));
            }
        }
        previous = Some((pos, neg));
        refine *= 2;
    }
}

/// Sign changes of `β`, located by bisection on a fine sample.
fn sign_changes(w: &WeightDescriptor) -> Result<Vec<f64>> {
    if w.is_nonnegative() {
        return Ok(Vec::new());
    }
    let samples = 4096;
    let mut roots = Vec::new();
    let at = |t: f64| w.eval_offset(t, 0.0);
    let mut prev_t = 0.0;
    let mut prev_v = at(0.0)?;
    for j in 1..=samples {
        let t = TAU * j as f64 / samples as f64;
        let v = if j == samples { at(0.0)? } else { at(t)? };
        if (prev_v > 0.0) != (v > 0.0) {
            let (mut lo, mut hi) = (prev_t, t);
            let lo_pos = prev_v > 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (at(mid)? > 0.0) == lo_pos {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 {
                    break;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_v = v;
    }
    Ok(roots)
}

pub(crate) fn weight_grid(
    w: &WeightDescriptor,
    order: usize,
    refine: usize,
    extra_breaks: &[f64],
) -> BoundaryGrid {
    weight_grid_with(w, order, refine, extra_breaks, MIN_PANEL_WIDTH)
}

pub(crate) fn weight_grid_with(
    w: &WeightDescriptor,
    order: usize,
    refine: usize,
    extra_breaks: &[f64],
    min_width: f64,
) -> BoundaryGrid {
    let breaks: Vec<Break> = w
        .singularities()
        .iter()
        .map(|s| Break {
            angle: s.angle,
            graded: true,
        })
        .chain(w.kinks().into_iter().chain(extra_breaks.iter().copied()).map(|angle| Break {
            angle,
            graded: false,
        }))
        .collect();
    let base = (TAU / 16.0).min(PHASE_PER_PANEL / (order as f64 + 1.0));
    let spec = GridSpec {
        max_width: base / refine as f64,
        min_width,
        order: RULE_ORDER,
    };
    BoundaryGrid::build(&breaks, &spec)
}

fn coefficients_at(w: &WeightDescriptor, order: usize, refine: usize) -> Result<Vec<Complex64>> {
    let grid = weight_grid(w, order, refine, &[]);
    let mut samples = Vec::with_capacity(grid.points.len());
    for p in &grid.points {
        let v = w.eval_offset(p.center, p.offset)?;
        samples.push((p.center + p.offset, p.weight * v));
    }
    let mut tails = Vec::with_capacity(grid.tails.len());
    for t in &grid.tails {
        tails.push((t.center, w.tail_integral(t.center, t.h)?));
    }

    // Blocks of k are independent; each block sums its points in a fixed order.
    const BLOCK: usize = 64;
    let blocks: Vec<Vec<Complex64>> = (0..=order)
        .step_by(BLOCK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k0| {
            let k1 = (k0 + BLOCK).min(order + 1);
            let mut acc = vec![Complex64::new(0.0, 0.0); k1 - k0];
            for &(theta, wv) in samples.iter().chain(&tails) {
                let step = Complex64::cis(-theta);
                let mut phase = Complex64::cis(-(k0 as f64) * theta) * wv;
                for slot in acc.iter_mut() {
                    *slot += phase;
                    phase *= step;
                }
            }
            acc
        })
        .collect();
    Ok(blocks
        .into_iter()
        .flatten()
        .map(|c| c / TAU)
        .collect())
}

fn roundoff_floor(coeffs: &[Complex64]) -> f64 {
    let scale = coeffs.first().map(|c| c.norm()).unwrap_or(0.0).max(1e-300);
    64.0 * f64::EPSILON * scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::mobius_pushforward;
    use std::f64::consts::PI;

    #[test]
    fn constant_coefficients_are_orthogonality() {
        let w = WeightDescriptor::constant(1.0).unwrap();
        let b = fourier_coeffs(&w, 2, 1e-12).unwrap();
        let got: Vec<f64> = (-2..=2).map(|k| b.get(k).re).collect();
        assert_eq!(got, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn cardioid_mean_is_eight_over_pi() {
        let b = fourier_coeffs(&WeightDescriptor::Cardioid, 4, 1e-12).unwrap();
        assert!((b.get(0).re - 8.0 / PI).abs() < 1e-12);
        // 4|cos(θ/2)| is even: b̂(1) = (1/2π)∫4|cos(θ/2)|cos θ = 8/(3π)
        assert!((b.get(1).re - 8.0 / (3.0 * PI)).abs() < 1e-12);
        assert!(b.get(1).im.abs() < 1e-13);
    }

    #[test]
    fn hermitian_symmetry_is_exact() {
        let w = mobius_pushforward(&WeightDescriptor::regular_polygon(3).unwrap(), Complex64::new(0.2, 0.3)).unwrap();
        let b = fourier_coeffs(&w, 16, 1e-10).unwrap();
        for k in 0..=16 {
            assert_eq!(b.get(-k), b.get(k).conj());
        }
    }

    #[test]
    fn fast_cusp_is_integrable() {
        // Only its L log L membership fails.
        let fast = WeightDescriptor::fast_cusp(2.0, 1.0, 1.0).unwrap();
        assert!(perimeter(&fast, 1e-10).is_ok());
    }

    #[test]
    fn signed_masses_of_shifted_cosine() {
        let w = WeightDescriptor::cosine(vec![1.0, 2.0]).unwrap();
        let (pos, neg) = signed_masses(&w, 1e-12).unwrap();
        let s3 = 3f64.sqrt();
        assert!((pos - (4.0 * PI / 3.0 + 2.0 * s3)).abs() < 1e-10);
        assert!((neg - (2.0 * s3 - 2.0 * PI / 3.0)).abs() < 1e-10);
    }
}
