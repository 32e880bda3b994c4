//! Dense symmetric linear algebra: Cholesky, Householder tridiagonalization
//! and the implicit QL iteration.
//!
//! Matrices are square, row-major and stored in full. Row loops that run in
//! parallel write disjoint rows and sum in a fixed order, so results do not
//! depend on the thread count.

use std::ops::{Index, IndexMut};

use rayon::prelude::*;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let n = self.n;
        &mut self.data[i * n..(i + 1) * n]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// Trailing principal block starting at `offset`.
    pub fn trailing(&self, offset: usize) -> Matrix {
        let m = self.n - offset;
        let mut out = Matrix::zeros(m);
        for i in 0..m {
            out.row_mut(i)
                .copy_from_slice(&self.row(i + offset)[offset..]);
        }
        out
    }

    /// `self − shift · I`.
    pub fn shifted(&self, shift: f64) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out[(i, i)] -= shift;
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower Cholesky factor `L` with `B = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    /// Fails (returning the offending pivot index) unless every pivot is
    /// strictly positive.
    pub fn factor(b: &Matrix) -> Result<Self, usize> {
        let n = b.dim();
        let mut l = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let s = b[(i, j)] - dot(&l.row(i)[..j], &l.row(j)[..j]);
                if i == j {
                    if !(s > 0.0) {
                        return Err(i);
                    }
                    l[(i, i)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        Ok(Self { l })
    }

    pub fn lower(&self) -> &Matrix {
        &self.l
    }

    /// `C = L⁻¹ diag(a) L⁻ᵀ` for a diagonal `a`.
    ///
    /// Entries of `C` in rows or columns where `a` vanishes are exactly zero,
    /// and `C = diag(a)` exactly when `L` is the identity.
    pub fn congruence_of_diagonal(&self, a: &[f64]) -> Matrix {
        let n = self.l.dim();
        // Y = L⁻¹ is lower triangular; forward substitution by rows.
        let mut y = Matrix::zeros(n);
        for i in 0..n {
            let mut row = vec![0.0; i + 1];
            row[i] = 1.0;
            for k in 0..i {
                let lik = self.l[(i, k)];
                if lik != 0.0 {
                    let yk = &y.row(k)[..=k];
                    for (r, v) in row[..=k].iter_mut().zip(yk) {
                        *r -= lik * v;
                    }
                }
            }
            let inv = 1.0 / self.l[(i, i)];
            for r in row.iter_mut() {
                *r *= inv;
            }
            y.row_mut(i)[..=i].copy_from_slice(&row);
        }
        let mut c = Matrix::zeros(n);
        c.data
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, out)| {
                let yi: Vec<f64> = y.row(i)[..=i].iter().zip(a).map(|(v, ak)| v * ak).collect();
                for (j, slot) in out.iter_mut().enumerate() {
                    let m = i.min(j) + 1;
                    *slot = dot(&yi[..m], &y.row(j)[..m]);
                }
            });
        // Products are formed in a fixed order per entry; mirror to make the
        // result exactly symmetric.
        for i in 0..n {
            for j in 0..i {
                c[(j, i)] = c[(i, j)];
            }
        }
        c
    }

    /// Solve `Lᵀ x = z` in place.
    pub fn solve_transpose_in_place(&self, z: &mut [f64]) {
        let n = self.l.dim();
        for i in (0..n).rev() {
            let xi = z[i] / self.l[(i, i)];
            z[i] = xi;
            if xi != 0.0 {
                for (zk, lik) in z[..i].iter_mut().zip(&self.l.row(i)[..i]) {
                    *zk -= xi * lik;
                }
            }
        }
    }
}

/// Eigenvalues in ascending order, with eigenvectors stored as rows when
/// requested.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Matrix>,
}

/// Householder reduction to tridiagonal form followed by implicit QL.
pub fn symmetric_eigen(a: &Matrix, want_vectors: bool) -> SymmetricEigen {
    let n = a.dim();
    if n == 0 {
        return SymmetricEigen {
            values: Vec::new(),
            vectors: want_vectors.then(|| Matrix::zeros(0)),
        };
    }
    let mut work = a.clone();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut hs = vec![0.0; n];
    tridiagonalize(&mut work, &mut diag, &mut off, &mut hs);

    let mut vt = want_vectors.then(|| Matrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 }));
    implicit_ql(&mut diag, &mut off, vt.as_mut());

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = vt.map(|vt| {
        let mut out = Matrix::zeros(n);
        out.data
            .par_chunks_mut(n)
            .zip(order.par_iter())
            .for_each(|(dst, &src)| {
                dst.copy_from_slice(vt.row(src));
                back_transform(&work, &hs, dst);
            });
        out
    });
    SymmetricEigen { values, vectors }
}

/// On return `diag` holds the diagonal and `off[i]` couples `i − 1` and `i`.
/// Row `i` of `a` keeps the Householder vector of step `i` in its first `i`
/// entries, with normalizer `hs[i]` (zero when the step was skipped).
fn tridiagonalize(a: &mut Matrix, diag: &mut [f64], off: &mut [f64], hs: &mut [f64]) {
    let n = a.dim();
    for i in (1..n).rev() {
        let scale: f64 = a.row(i)[..i].iter().map(|x| x.abs()).sum();
        if i == 1 || scale == 0.0 {
            off[i] = a[(i, i - 1)];
            hs[i] = 0.0;
            continue;
        }
        let mut u: Vec<f64> = a.row(i)[..i].iter().map(|x| x / scale).collect();
        let sigma = dot(&u, &u);
        let f = u[i - 1];
        let g = if f > 0.0 { -sigma.sqrt() } else { sigma.sqrt() };
        off[i] = scale * g;
        let h = sigma - f * g;
        u[i - 1] = f - g;

        // p = A u / h over the leading i×i block.
        let p: Vec<f64> = (0..i)
            .into_par_iter()
            .map(|j| dot(&a.row(j)[..i], &u) / h)
            .collect();
        let kk = dot(&u, &p) / (2.0 * h);
        let q: Vec<f64> = p.iter().zip(&u).map(|(p, u)| p - kk * u).collect();

        let n_cols = a.n;
        a.data[..i * n_cols]
            .par_chunks_mut(n_cols)
            .enumerate()
            .for_each(|(j, row)| {
                let (uj, qj) = (u[j], q[j]);
                for ((x, uk), qk) in row[..i].iter_mut().zip(&u).zip(&q) {
                    *x -= uj * qk + qj * uk;
                }
            });
        a.row_mut(i)[..i].copy_from_slice(&u);
        hs[i] = h;
    }
    for i in 0..n {
        diag[i] = a[(i, i)];
    }
    off[0] = 0.0;
}

/// Apply `P_1, P_2, …, P_{n−1}` (in that order) to a tridiagonal eigenvector.
fn back_transform(work: &Matrix, hs: &[f64], v: &mut [f64]) {
    for i in 1..work.dim() {
        let h = hs[i];
        if h == 0.0 {
            continue;
        }
        let u = &work.row(i)[..i];
        let s = dot(u, &v[..i]) / h;
        if s != 0.0 {
            for (vk, uk) in v[..i].iter_mut().zip(u) {
                *vk -= s * uk;
            }
        }
    }
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
/// Rotations are accumulated into the rows of `vt` when given.
fn implicit_ql(d: &mut [f64], e_in: &mut [f64], mut vt: Option<&mut Matrix>) {
    let n = d.len();
    // Shift so that e[i] couples i and i + 1.
    let mut e = vec![0.0; n];
    e[..(n - 1)].copy_from_slice(&e_in[1..n]);

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                assert!(iterations < 200, "implicit QL failed to converge");
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(vt) = vt.as_deref_mut() {
                        rotate_rows(vt, i, c, s);
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

fn rotate_rows(vt: &mut Matrix, i: usize, c: f64, s: f64) {
    let n = vt.n;
    let (head, tail) = vt.data.split_at_mut((i + 1) * n);
    let ri = &mut head[i * n..];
    let rj = &mut tail[..n];
    for (a, b) in ri.iter_mut().zip(rj.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}
