//! Fourier–Galerkin discretization of the weighted Steklov problem on the
//! unit disk.
//!
//! Trial functions are harmonic extensions of `1, cos kθ, sin kθ` for
//! `1 ≤ k ≤ N`, ordered `[1, cos 1θ, sin 1θ, cos 2θ, sin 2θ, …]`. Their
//! Dirichlet energies are `π k`, so the stiffness matrix is diagonal. The mass
//! matrix is the `β`-weighted Gram matrix of the boundary traces; by the
//! product-to-sum identities it only involves `b̂(0..=2N)`.
//!
//! Two solution routes are provided. [`solve`] factors the mass matrix and
//! diagonalizes `L⁻¹ A L⁻ᵀ`. [`solve_reduced`] first restricts to the
//! `B`-orthogonal complement of the constants ([`deflate_constants`]) and then
//! diagonalizes the reversed pencil `B' c = μ A' c`, whose eigenvalues are
//! `μ = 1/σ`. The two routes share no factorization and are cross-checked in
//! the test suites.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{fourier_coeffs, FourierCoefficients};
use crate::linalg::{dot, symmetric_eigen, Cholesky, Matrix};
use crate::weights::WeightDescriptor;

/// Below this fraction of `trace(B)/dim` the mass matrix counts as singular.
pub const DEGENERACY_RATIO: f64 = 1e-12;
/// Reversed-pencil eigenvalues below this fraction of the largest magnitude
/// are reported as kernel modes.
pub const KERNEL_RATIO: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub modes: usize,
    /// Diagonal of `A`: `[0, π, π, 2π, 2π, …, Nπ, Nπ]`.
    pub stiffness: Vec<f64>,
    pub mass: Matrix,
    pub weight_id: String,
    pub quad_tol: f64,
    pub nonnegative: bool,
}

impl GalerkinSystem {
    pub fn dim(&self) -> usize {
        2 * self.modes + 1
    }

    /// `B₀₀ = ∫ β dθ`.
    pub fn total_mass(&self) -> f64 {
        self.mass[(0, 0)]
    }

    /// Build the system from precomputed coefficients of order at least `2N`.
    pub fn from_coefficients(
        weight: &WeightDescriptor,
        coeffs: &FourierCoefficients,
        modes: usize,
        quad_tol: f64,
    ) -> Result<Self> {
        if modes < 1 {
            return Err(Error::InvalidParameter("need at least one Fourier mode".into()));
        }
        if coeffs.order() < 2 * modes {
            return Err(Error::InvalidParameter(format!(
                "coefficients of order {} cannot assemble {} modes",
                coeffs.order(),
                modes
            )));
        }
        let system = Self {
            modes,
            stiffness: stiffness_diagonal(modes),
            mass: mass_matrix(coeffs, modes),
            weight_id: weight.id(),
            quad_tol,
            nonnegative: weight.is_nonnegative(),
        };
        if system.nonnegative {
            system.check_definite()?;
        }
        Ok(system)
    }

    fn check_definite(&self) -> Result<()> {
        let threshold = DEGENERACY_RATIO * self.mass.trace() / self.dim() as f64;
        match Cholesky::factor(&self.mass.shifted(threshold)) {
            Ok(_) => Ok(()),
            Err(_) => Err(Error::DegenerateWeight { threshold }),
        }
    }
}

pub fn stiffness_diagonal(modes: usize) -> Vec<f64> {
    mode_numbers(modes).into_iter().map(|k| PI * k).collect()
}

/// `[0, 1, 1, 2, 2, …, N, N]`, the stiffness diagonal in units of `π`.
pub fn mode_numbers(modes: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(2 * modes + 1);
    a.push(0.0);
    for k in 1..=modes {
        a.push(k as f64);
        a.push(k as f64);
    }
    a
}

/// Index of `cos kθ` / `sin kθ` in the basis.
fn cos_index(k: usize) -> usize {
    2 * k - 1
}

fn sin_index(k: usize) -> usize {
    2 * k
}

fn mass_matrix(b: &FourierCoefficients, modes: usize) -> Matrix {
    let c = |m: i64| b.cosine_moment(m);
    let s = |m: i64| b.sine_moment(m);
    let n = 2 * modes + 1;
    let mut mass = Matrix::zeros(n);
    mass[(0, 0)] = c(0);
    for j in 1..=modes {
        let jj = j as i64;
        mass[(0, cos_index(j))] = c(jj);
        mass[(cos_index(j), 0)] = c(jj);
        mass[(0, sin_index(j))] = s(jj);
        mass[(sin_index(j), 0)] = s(jj);
        for l in 1..=modes {
            let ll = l as i64;
            // cos j cos l = [cos(j−l) + cos(j+l)]/2, sin j sin l = [cos(j−l) − cos(j+l)]/2,
            // cos j sin l = [sin(l+j) + sin(l−j)]/2.
            mass[(cos_index(j), cos_index(l))] = 0.5 * (c(jj - ll) + c(jj + ll));
            mass[(sin_index(j), sin_index(l))] = 0.5 * (c(jj - ll) - c(jj + ll));
            let cs = 0.5 * (s(ll + jj) + s(ll - jj));
            mass[(cos_index(j), sin_index(l))] = cs;
            mass[(sin_index(l), cos_index(j))] = cs;
        }
    }
    mass
}

/// Assemble the Galerkin pair `(A, B)` for `N` modes.
pub fn assemble(w: &WeightDescriptor, modes: usize, quad_tol: f64) -> Result<GalerkinSystem> {
    if modes < 1 {
        return Err(Error::InvalidParameter("need at least one Fourier mode".into()));
    }
    let coeffs = fourier_coeffs(w, 2 * modes, quad_tol)?;
    GalerkinSystem::from_coefficients(w, &coeffs, modes, quad_tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Ascending; `sigmas[0] = 0` is the constant mode.
    pub sigmas: Vec<f64>,
    pub modes: usize,
    pub weight_id: String,
    /// Relative backward errors `‖Ac − σBc‖ / ((‖A‖ + σ‖B‖)‖c‖)`; empty when
    /// the solve skipped eigenvectors.
    pub residuals: Vec<f64>,
    /// Leading eigenvalues certified by [`crate::asymptotics::stability_report`];
    /// equals `sigmas.len()` until a certification has been run.
    pub trusted_count: usize,
    /// `∫ β dθ` as seen by the discretization (`B₀₀`).
    pub total_mass: f64,
}

impl SpectralResult {
    pub fn trusted(&self) -> &[f64] {
        &self.sigmas[..self.trusted_count]
    }

    /// Largest certified eigenvalue.
    pub fn trusted_max(&self) -> f64 {
        self.trusted_count
            .checked_sub(1)
            .map(|i| self.sigmas[i])
            .unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub residuals: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { residuals: true }
    }
}

/// Eigenvalues of `A c = σ B c` through the Cholesky reduction of `B`.
pub fn solve(sys: &GalerkinSystem) -> Result<SpectralResult> {
    solve_with(sys, SolveOptions::default())
}

pub fn solve_with(sys: &GalerkinSystem, options: SolveOptions) -> Result<SpectralResult> {
    // The pencil is solved in units of π: (A/π) c = σ (B/π) c. For the disk
    // B/π is the identity and the integer mode numbers come out exactly.
    let scaled = Matrix::from_fn(sys.dim(), |i, j| sys.mass[(i, j)] / PI);
    let chol = Cholesky::factor(&scaled).map_err(|_| conditioning_error(&sys.mass))?;
    // Row and column 0 of C vanish exactly because A₀₀ = 0, so the constant
    // mode is split off without rounding.
    let c = chol.congruence_of_diagonal(&mode_numbers(sys.modes));
    let eig = symmetric_eigen(&c.trailing(1), options.residuals);

    let mut sigmas = Vec::with_capacity(sys.dim());
    sigmas.push(0.0);
    sigmas.extend(&eig.values);

    let residuals = match eig.vectors {
        Some(vectors) => {
            let a_norm = sys.stiffness.iter().copied().fold(0.0, f64::max);
            let b_norm = sys.mass.norm_inf();
            let n = sys.dim();
            let mut out = vec![0.0];
            out.par_extend((0..vectors.dim()).into_par_iter().map(|k| {
                let sigma = eig.values[k];
                let mut x = Vec::with_capacity(n);
                x.push(0.0);
                x.extend_from_slice(vectors.row(k));
                chol.solve_transpose_in_place(&mut x);
                let bx = sys.mass.mul_vec(&x);
                let r: f64 = x
                    .iter()
                    .zip(&bx)
                    .zip(&sys.stiffness)
                    .map(|((xi, bxi), ai)| (ai * xi - sigma * bxi).powi(2))
                    .sum::<f64>()
                    .sqrt();
                r / ((a_norm + sigma.abs() * b_norm) * dot(&x, &x).sqrt())
            }));
            out
        }
        None => Vec::new(),
    };

    Ok(SpectralResult {
        trusted_count: sigmas.len(),
        sigmas,
        modes: sys.modes,
        weight_id: sys.weight_id.clone(),
        residuals,
        total_mass: sys.total_mass(),
    })
}

fn conditioning_error(mass: &Matrix) -> Error {
    Error::Conditioning {
        min_eigenvalue: symmetric_eigen(mass, false).values[0],
    }
}

/// Restriction to the `B`-orthogonal complement of the constants.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    /// Diagonal of `A` without the constant mode; strictly positive.
    pub stiffness: Vec<f64>,
    /// Schur complement `B_vv − B_v0 B_0v / B_00`.
    pub mass: Matrix,
}

/// Project out the constant mode: `u = v − (⟨v, 1⟩_β / ⟨1, 1⟩_β)`.
pub fn deflate_constants(sys: &GalerkinSystem) -> Result<ReducedSystem> {
    let b00 = sys.mass[(0, 0)];
    if !(b00.abs() > 0.0) {
        return Err(Error::InvalidParameter(
            "constant mode has zero weighted mass; use solve_indefinite".into(),
        ));
    }
    let n = sys.dim() - 1;
    let coupling: Vec<f64> = (1..=n).map(|i| sys.mass[(0, i)]).collect();
    let mut mass = sys.mass.trailing(1);
    for i in 0..n {
        let ci = coupling[i] / b00;
        for (x, cj) in mass.row_mut(i).iter_mut().zip(&coupling) {
            *x -= ci * cj;
        }
    }
    // Symmetrize the rounding of the rank-one update.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (mass[(i, j)] + mass[(j, i)]);
            mass[(i, j)] = v;
            mass[(j, i)] = v;
        }
    }
    Ok(ReducedSystem {
        stiffness: sys.stiffness[1..].to_vec(),
        mass,
    })
}

/// `A^{-1/2} M A^{-1/2}` for a positive diagonal `A`.
fn symmetric_scaling(mass: &Matrix, stiffness: &[f64]) -> Matrix {
    let inv: Vec<f64> = stiffness.iter().map(|a| 1.0 / a.sqrt()).collect();
    Matrix::from_fn(mass.dim(), |i, j| mass[(i, j)] * inv[i] * inv[j])
}

/// The constant-deflated route: eigenvalues `μ` of `B' c = μ A' c`, `σ = 1/μ`.
pub fn solve_reduced(sys: &GalerkinSystem) -> Result<SpectralResult> {
    let reduced = deflate_constants(sys)?;
    let m = symmetric_scaling(&reduced.mass, &reduced.stiffness);
    let mus = symmetric_eigen(&m, false).values;
    let mut sigmas = Vec::with_capacity(sys.dim());
    sigmas.push(0.0);
    // Largest μ first gives ascending σ.
    sigmas.extend(mus.iter().rev().map(|&mu| if mu > 0.0 { 1.0 / mu } else { f64::INFINITY }));
    Ok(SpectralResult {
        trusted_count: sigmas.len(),
        sigmas,
        modes: sys.modes,
        weight_id: sys.weight_id.clone(),
        residuals: Vec::new(),
        total_mass: sys.total_mass(),
    })
}

/// Spectrum of a sign-changing weight: `σ⁺` ascending, `σ⁻` descending
/// (both ordered by magnitude).
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSpectralResult {
    pub sigmas_pos: Vec<f64>,
    pub sigmas_neg: Vec<f64>,
    /// Reversed-pencil eigenvalues indistinguishable from zero.
    pub kernel_modes: usize,
    pub modes: usize,
    pub weight_id: String,
    pub trusted_pos: usize,
    pub trusted_neg: usize,
}

pub fn solve_indefinite(sys: &GalerkinSystem) -> Result<SignedSpectralResult> {
    let n = sys.dim() - 1;
    let stiffness = &sys.stiffness[1..];
    let b00 = sys.mass[(0, 0)];
    let scale = sys.mass.norm_inf();

    let m = if b00.abs() > DEGENERACY_RATIO * scale {
        let reduced = deflate_constants(sys)?;
        symmetric_scaling(&reduced.mass, stiffness)
    } else {
        // ∫β = 0: the constraint ⟨u, β⟩ = 0 acts on the non-constant part
        // alone. Restrict the scaled pencil to the complement of g.
        let full = symmetric_scaling(&sys.mass.trailing(1), stiffness);
        let g: Vec<f64> = (0..n)
            .map(|i| sys.mass[(0, i + 1)] / stiffness[i].sqrt())
            .collect();
        let g_norm = dot(&g, &g).sqrt();
        if g_norm <= DEGENERACY_RATIO * scale {
            full
        } else {
            restrict_to_complement(&full, &g)
        }
    };

    let mus = symmetric_eigen(&m, false).values;
    let mu_max = mus.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let cutoff = KERNEL_RATIO * mu_max;
    let mut sigmas_pos: Vec<f64> = mus.iter().filter(|&&mu| mu > cutoff).map(|mu| 1.0 / mu).collect();
    let mut sigmas_neg: Vec<f64> = mus.iter().filter(|&&mu| mu < -cutoff).map(|mu| 1.0 / mu).collect();
    sigmas_pos.sort_by(|a, b| a.total_cmp(b));
    sigmas_neg.sort_by(|a, b| b.total_cmp(a));
    let kernel_modes = mus.len() - sigmas_pos.len() - sigmas_neg.len();
    Ok(SignedSpectralResult {
        trusted_pos: sigmas_pos.len(),
        trusted_neg: sigmas_neg.len(),
        sigmas_pos,
        sigmas_neg,
        kernel_modes,
        modes: sys.modes,
        weight_id: sys.weight_id.clone(),
    })
}

/// `(H M H)` with the row and column of `g` removed, where `H` is the
/// Householder reflection sending `g` to a multiple of `e₀`.
fn restrict_to_complement(m: &Matrix, g: &[f64]) -> Matrix {
    let n = m.dim();
    let norm = dot(g, g).sqrt();
    let mut v = g.to_vec();
    v[0] += if g[0] >= 0.0 { norm } else { -norm };
    let vv = dot(&v, &v);
    // H M H = M − v pᵀ − p vᵀ + (vᵀ M v)(2/vv)² v vᵀ … expanded via w = M v.
    let w = m.mul_vec(&v);
    let beta = 2.0 / vv;
    let vw = dot(&v, &w);
    let out = Matrix::from_fn(n, |i, j| {
        m[(i, j)] - beta * (v[i] * w[j] + w[i] * v[j]) + beta * beta * vw * v[i] * v[j]
    });
    out.trailing(1)
}
