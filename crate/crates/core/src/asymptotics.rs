//! Counting functions, Weyl-slope fits and truncation stability.
//!
//! For the weighted problem the counting function should grow like
//! `N(σ) ≈ σ ∫β / π`. Fits are ordinary least squares of `N` against `σ` on an
//! evenly spaced grid, restricted to the leading eigenvalues that agree between
//! truncations `N` and `2N`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::{fourier_coeffs, signed_masses};
use crate::solver::{
    solve_indefinite, solve_with, GalerkinSystem, SignedSpectralResult, SolveOptions,
    SpectralResult,
};
use crate::weights::WeightDescriptor;

/// Eigenvalues whose truncation drift exceeds this fraction of `max(1, σ)`
/// are not trusted.
pub const STABILITY_RTOL: f64 = 1e-2;
pub const MIN_WINDOW_EIGENVALUES: usize = 30;
pub const FIT_GRID_POINTS: usize = 200;

/// `N(σ) = #{ j : σ_j < σ }` over a certified list of jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingFunction {
    jumps: Vec<f64>,
    includes_zero_mode: bool,
}

impl CountingFunction {
    /// `jumps` are magnitudes in ascending order.
    pub fn new(jumps: Vec<f64>, includes_zero_mode: bool) -> Self {
        Self {
            jumps,
            includes_zero_mode,
        }
    }

    /// Trusted eigenvalues of `sr`, zero mode included.
    pub fn from_spectrum(sr: &SpectralResult) -> Self {
        Self::new(sr.trusted().to_vec(), true)
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn includes_zero_mode(&self) -> bool {
        self.includes_zero_mode
    }

    /// Largest `σ` at which the count is certified.
    pub fn limit(&self) -> f64 {
        self.jumps.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, sigma: f64) -> Result<usize> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("counting needs σ > 0, got {sigma}")));
        }
        if sigma > self.limit() {
            return Err(Error::UntrustedRange {
                sigma,
                limit: self.limit(),
            });
        }
        Ok(self.jumps.partition_point(|&s| s < sigma))
    }
}

/// Strict count of eigenvalues below `sigma`, including `σ₀ = 0`.
pub fn counting(sr: &SpectralResult, sigma: f64) -> Result<usize> {
    CountingFunction::from_spectrum(sr).eval(sigma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub target: f64,
    pub rel_error: f64,
    pub r2: f64,
}

/// Least-squares line through `N(σ)` on an even grid over `window`.
pub fn fit_counting(n: &CountingFunction, window: (f64, f64), target: f64) -> Result<WeylFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("invalid window [{lo}, {hi}]")));
    }
    if hi > n.limit() {
        return Err(Error::UntrustedRange {
            sigma: hi,
            limit: n.limit(),
        });
    }
    let found = n.jumps().iter().filter(|&&s| s >= lo && s <= hi).count();
    if found < MIN_WINDOW_EIGENVALUES {
        return Err(Error::TooFewEigenvalues {
            lo,
            hi,
            found,
            needed: MIN_WINDOW_EIGENVALUES,
        });
    }

    let m = FIT_GRID_POINTS;
    let xs: Vec<f64> = (0..m)
        .map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64)
        .collect();
    let ys = xs
        .iter()
        .map(|&x| n.eval(x).map(|c| c as f64))
        .collect::<Result<Vec<_>>>()?;
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(WeylFit {
        slope,
        intercept,
        window,
        target,
        rel_error: (slope - target).abs() / target.abs(),
        r2,
    })
}

/// `[5 σ₁, σ_K]` with `K = ⌊0.9 · trusted⌋`.
pub fn default_window(sr: &SpectralResult) -> Result<(f64, f64)> {
    window_for(sr.trusted(), 1)
}

fn window_for(jumps: &[f64], first: usize) -> Result<(f64, f64)> {
    let trusted = jumps.len();
    let top = ((0.9 * trusted as f64).floor() as usize).min(trusted.saturating_sub(1));
    let hi = jumps.last().copied().unwrap_or(0.0);
    if trusted <= first || top <= first || 5.0 * jumps[first] >= jumps[top] {
        return Err(Error::TooFewEigenvalues {
            lo: jumps.get(first).map(|s| 5.0 * s).unwrap_or(0.0),
            hi,
            found: trusted,
            needed: MIN_WINDOW_EIGENVALUES,
        });
    }
    Ok((5.0 * jumps[first], jumps[top]))
}

/// Weyl fit of a nonnegative-weight spectrum; `target = ∫β / π`.
pub fn weyl_slope(sr: &SpectralResult, window: Option<(f64, f64)>) -> Result<WeylFit> {
    let window = match window {
        Some(w) => w,
        None => default_window(sr)?,
    };
    fit_counting(&CountingFunction::from_spectrum(sr), window, sr.total_mass / PI)
}

/// `(λ, λ^α n(λ))` with `λ_k = 1/σ_k` and `n(λ) = #{ k ≥ 1 : λ_k > λ }`.
pub fn n_alpha_estimate(sr: &SpectralResult, alpha: f64, lambdas: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = CountingFunction::from_spectrum(sr);
    lambdas
        .iter()
        .map(|&lambda| {
            if !(lambda > 0.0) {
                return Err(Error::InvalidParameter(format!("λ must be positive, got {lambda}")));
            }
            // λ_k > λ ⟺ σ_k < 1/λ; drop the zero mode.
            let count = n.eval(1.0 / lambda)?.saturating_sub(1);
            Ok((lambda, lambda.powf(alpha) * count as f64))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub trusted_count: usize,
    /// `|σ_k^{(N)} − σ_k^{(2N)}| / max(1, σ_k^{(N)})`.
    pub rel_diffs: Vec<f64>,
}

pub fn stability_report(sr_n: &SpectralResult, sr_2n: &SpectralResult) -> Result<StabilityReport> {
    if sr_n.weight_id != sr_2n.weight_id {
        return Err(Error::MismatchedWeight(sr_n.weight_id.clone(), sr_2n.weight_id.clone()));
    }
    Ok(compare_sequences(&sr_n.sigmas, &sr_2n.sigmas))
}

fn compare_sequences(coarse: &[f64], fine: &[f64]) -> StabilityReport {
    let rel_diffs: Vec<f64> = coarse
        .iter()
        .zip(fine)
        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
        .collect();
    let trusted_count = rel_diffs
        .iter()
        .position(|&d| !(d <= STABILITY_RTOL))
        .unwrap_or(rel_diffs.len());
    StabilityReport {
        trusted_count,
        rel_diffs,
    }
}

fn paired_systems(
    w: &WeightDescriptor,
    modes: usize,
    quad_tol: f64,
) -> Result<(GalerkinSystem, GalerkinSystem)> {
    if modes < 1 {
        return Err(Error::InvalidParameter("need at least one Fourier mode".into()));
    }
    let coeffs = fourier_coeffs(w, 4 * modes, quad_tol)?;
    Ok((
        GalerkinSystem::from_coefficients(w, &coeffs, modes, quad_tol)?,
        GalerkinSystem::from_coefficients(w, &coeffs, 2 * modes, quad_tol)?,
    ))
}

/// Solve at `N` with residuals and certify against eigenvalues at `2N`.
pub fn trusted_spectrum(w: &WeightDescriptor, modes: usize, quad_tol: f64) -> Result<SpectralResult> {
    let (sys, fine) = paired_systems(w, modes, quad_tol)?;
    let mut sr = solve_with(&sys, SolveOptions { residuals: true })?;
    let check = solve_with(&fine, SolveOptions { residuals: false })?;
    sr.trusted_count = stability_report(&sr, &check)?.trusted_count;
    Ok(sr)
}

/// Signed spectrum at `N`, each sequence certified against `2N`.
pub fn trusted_signed_spectrum(
    w: &WeightDescriptor,
    modes: usize,
    quad_tol: f64,
) -> Result<SignedSpectralResult> {
    let (sys, fine) = paired_systems(w, modes, quad_tol)?;
    let mut coarse = solve_indefinite(&sys)?;
    let check = solve_indefinite(&fine)?;
    coarse.trusted_pos = compare_sequences(&coarse.sigmas_pos, &check.sigmas_pos).trusted_count;
    let neg: Vec<f64> = coarse.sigmas_neg.iter().map(|s| s.abs()).collect();
    let neg_check: Vec<f64> = check.sigmas_neg.iter().map(|s| s.abs()).collect();
    coarse.trusted_neg = compare_sequences(&neg, &neg_check).trusted_count;
    Ok(coarse)
}

/// Fits of `N^±(σ) = #{ k : |σ_k^±| < σ }` against `∫β_± / π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedWeylFits {
    pub positive: WeylFit,
    pub negative: WeylFit,
    pub mass_pos: f64,
    pub mass_neg: f64,
}

pub fn signed_weyl_fits(
    w: &WeightDescriptor,
    ssr: &SignedSpectralResult,
    quad_tol: f64,
    window: Option<(f64, f64)>,
) -> Result<SignedWeylFits> {
    let (mass_pos, mass_neg) = signed_masses(w, quad_tol)?;
    let pos = CountingFunction::new(ssr.sigmas_pos[..ssr.trusted_pos].to_vec(), false);
    let neg = CountingFunction::new(
        ssr.sigmas_neg[..ssr.trusted_neg].iter().map(|s| s.abs()).collect(),
        false,
    );
    let fit = |n: &CountingFunction, mass: f64| -> Result<WeylFit> {
        let win = match window {
            Some(w) => w,
            None => window_for(n.jumps(), 0)?,
        };
        fit_counting(n, win, mass / PI)
    };
    Ok(SignedWeylFits {
        positive: fit(&pos, mass_pos)?,
        negative: fit(&neg, mass_neg)?,
        mass_pos,
        mass_neg,
    })
}
