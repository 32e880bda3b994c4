//! Independent reference computations for the integration tests. Nothing here
//! calls into the library's quadrature, Fourier or linear algebra code.

#![allow(dead_code)]

use std::f64::consts::{E, PI, TAU};

/// Dense symmetric matrix as rows.
pub type Dense = Vec<Vec<f64>>;

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
/// Returns ascending eigenvalues and the eigenvectors as columns of `V`.
pub fn jacobi_eigen(mut a: Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut v: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n)
        .map(|r| order.iter().map(|&c| v[r][c]).collect())
        .collect();
    (values, vectors)
}

/// Basis function `e_i(θ)` in the order `1, cos θ, sin θ, cos 2θ, …`.
pub fn basis(i: usize, theta: f64) -> f64 {
    if i == 0 {
        1.0
    } else {
        let k = ((i + 1) / 2) as f64;
        if i % 2 == 1 {
            (k * theta).cos()
        } else {
            (k * theta).sin()
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Golub–Welsch (Jacobi
/// rotations on the tridiagonal Jacobi matrix).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut j = vec![vec![0.0; n]; n];
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[k][k - 1] = b;
        j[k - 1][k] = b;
    }
    let (x, v) = jacobi_eigen(j);
    (0..n).map(|i| (x[i], 2.0 * v[0][i] * v[0][i])).collect()
}

/// Composite rule: `panels` equal panels on `[lo, hi]`.
pub fn composite(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        for &(x, w) in rule {
            total += 0.5 * h * w * f(a + 0.5 * h * (x + 1.0));
        }
    }
    total
}

/// Piecewise-linear weight through `(nodes, values)` on `[0, 2π]`.
pub fn linear_interp(nodes: &[f64], values: &[f64], theta: f64) -> f64 {
    let i = nodes.partition_point(|&x| x <= theta).clamp(1, nodes.len() - 1);
    let (x0, x1) = (nodes[i - 1], nodes[i]);
    let t = (theta - x0) / (x1 - x0);
    values[i - 1] + t * (values[i] - values[i - 1])
}

/// `B_ij = ∫ e_i e_j β` entry by entry, integrating each linear piece with a
/// fine composite rule.
pub fn brute_mass(nodes: &[f64], values: &[f64], modes: usize) -> Dense {
    let n = 2 * modes + 1;
    let rule = gauss_legendre(12);
    let mut b = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut total = 0.0;
            for s in 1..nodes.len() {
                let (lo, hi) = (nodes[s - 1], nodes[s]);
                if hi <= lo {
                    continue;
                }
                total += composite(
                    |t| basis(i, t) * basis(j, t) * linear_interp(nodes, values, t.clamp(lo, hi)),
                    lo,
                    hi,
                    4,
                    &rule,
                );
            }
            b[i][j] = total;
            b[j][i] = total;
        }
    }
    b
}

/// Eigenvalues of `A c = σ B c` with `A = diag(0, π, π, 2π, 2π, …)`, via
/// `B^{-1/2} A B^{-1/2}` from a Jacobi eigendecomposition of `B`.
pub fn brute_pencil(b: &Dense) -> Vec<f64> {
    let n = b.len();
    let a: Vec<f64> = (0..n).map(|i| PI * ((i + 1) / 2) as f64).collect();
    let (lam, v) = jacobi_eigen(b.clone());
    assert!(lam[0] > 0.0, "mass matrix not positive definite");
    // B^{-1/2} = V Λ^{-1/2} Vᵀ
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            s[i][j] = (0..n).map(|k| v[i][k] * v[j][k] / lam[k].sqrt()).sum();
        }
    }
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            c[i][j] = (0..n).map(|k| s[i][k] * a[k] * s[k][j]).sum();
        }
    }
    jacobi_eigen(c).0
}

/// Tanh–sinh quadrature on `[lo, hi]`; tolerates integrable endpoint
/// singularities. `f` receives the distances to both endpoints as well, so
/// the integrand can be evaluated without cancellation near them.
pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, lo: f64, hi: f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let h = 1.0 / 64.0;
    let mut total = 0.0;
    for k in -(7 * 64)..=(7 * 64) {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
        // Distance from the nearer endpoint, computed without cancellation.
        let d = half / (u.abs().exp() * u.abs().cosh());
        if d == 0.0 || w == 0.0 {
            continue;
        }
        let (x, to_lo, to_hi) = if u < 0.0 {
            (lo + d, d, 2.0 * half - d)
        } else {
            (hi - d, 2.0 * half - d, d)
        };
        total += half * w * f(x, to_lo, to_hi);
    }
    total * h
}

/// `∫ |1 − e^{inθ}|^{−2/n} dθ` by tanh–sinh between consecutive vertices.
pub fn polygon_perimeter(n: u32) -> f64 {
    let nf = n as f64;
    let width = TAU / nf;
    let piece = tanh_sinh(
        |_, to_lo, to_hi| {
            let d = to_lo.min(to_hi);
            (2.0 * (0.5 * nf * d).sin()).powf(-2.0 / nf)
        },
        0.0,
        width,
    );
    nf * piece
}

/// `∫ 4|cos(θ/2)| dθ` by composite Gauss–Legendre split at the zero.
pub fn cardioid_perimeter() -> f64 {
    let rule = gauss_legendre(16);
    composite(|t| 4.0 * (0.5 * t).cos().abs(), 0.0, PI, 64, &rule)
        + composite(|t| 4.0 * (0.5 * t).cos().abs(), PI, TAU, 64, &rule)
}

/// Mass of the cusp model `c|θ|^{-1}(log(e + 1/|θ|))^{-1-1/α}` with the
/// cosine blend to 1 over `[w, 2w]` and 1 beyond.
///
/// The inner part uses `θ = e^{-y}` and an analytic tail for large `y`.
pub fn cusp_perimeter(alpha: f64, c: f64, w: f64) -> f64 {
    let q = -1.0 - 1.0 / alpha;
    let profile = |d: f64| c / d * (-d.ln() + (E * d).ln_1p()).powf(q);
    let rule = gauss_legendre(16);
    // ∫_0^w profile = ∫_{−ln w}^∞ c (log(e + e^y))^q dy
    let g = |y: f64| c * (y + (1.0 + E * (-y).exp()).ln()).powf(q);
    let y0 = -w.ln();
    let mut inner = 0.0;
    let mut a = y0;
    let mut b = y0 + 1.0;
    let y_max = 1e7;
    while a < y_max {
        inner += composite(&g, a, b, 4, &rule);
        a = b;
        b *= 1.5;
    }
    // ∫_{y_max}^∞ c y^q dy, with log(e + e^y) = y to double precision there.
    inner += c * a.powf(q + 1.0) / -(q + 1.0);
    let blend = composite(
        |d| {
            let s = 0.5 * (1.0 - (PI * (d - w) / w).cos());
            (1.0 - s) * profile(d) + s
        },
        w,
        2.0 * w,
        64,
        &rule,
    );
    let flat = TAU - 4.0 * w;
    2.0 * (inner + blend) + flat
}

/// `(∫ β₊, ∫ β₋)` for `β = 1 + 2 cos θ`, splitting at the roots `2π/3`, `4π/3`.
pub fn shifted_cosine_masses() -> (f64, f64) {
    let rule = gauss_legendre(20);
    let f = |t: f64| 1.0 + 2.0 * t.cos();
    let pos = composite(f, 0.0, 2.0 * PI / 3.0, 32, &rule) + composite(f, 4.0 * PI / 3.0, TAU, 32, &rule);
    let neg = -composite(f, 2.0 * PI / 3.0, 4.0 * PI / 3.0, 32, &rule);
    (pos, neg)
}
