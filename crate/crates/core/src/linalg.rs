//! Dense symmetric matrices, the cyclic Jacobi eigensolver, and the projection
//! onto the PSD cone.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{check_dim, Error, Result};

/// Off-diagonal Frobenius mass, relative to `‖m‖_F`, at which Jacobi stops.
const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;
const QL_MAX_ITERATIONS: usize = 60;

/// A dense `d × d` real symmetric matrix.
///
/// Only the upper triangle is stored (row-major, packed), so `get(i, j)` and
/// `get(j, i)` read the same slot and the matrix is symmetric by construction.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    upper: Vec<f64>,
}

#[inline]
fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            upper: vec![0.0; packed_len(dim)],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle (`i <= j`).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        let mut upper = Vec::with_capacity(packed_len(dim));
        for i in 0..dim {
            for j in i..dim {
                upper.push(f(i, j));
            }
        }
        Self { dim, upper }
    }

    /// Builds a matrix from row-major dense rows. Only the upper triangle is
    /// read; entries below the diagonal are ignored.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("matrix must have at least one row"));
        }
        for row in rows {
            check_dim(dim, row.as_ref().len())?;
        }
        Ok(Self::from_fn(dim, |i, j| rows[i].as_ref()[j]))
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        r * (2 * self.dim - r + 1) / 2 + (c - r)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.index(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.index(i, j);
        self.upper[k] = value;
    }

    /// Packed upper triangle, row-major.
    pub fn packed(&self) -> &[f64] {
        &self.upper
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &SymmetricMatrix) -> Result<()> {
        check_dim(self.dim, other.dim)?;
        for (a, b) in self.upper.iter_mut().zip(&other.upper) {
            *a += alpha * b;
        }
        Ok(())
    }

    /// `self += alpha * v vᵀ`.
    pub fn add_outer(&mut self, alpha: f64, v: &[f64]) -> Result<()> {
        check_dim(self.dim, v.len())?;
        let mut k = 0;
        for i in 0..self.dim {
            let vi = alpha * v[i];
            for vj in &v[i..] {
                self.upper[k] += vi * vj;
                k += 1;
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.upper {
            *a *= alpha;
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut m = self.clone();
        m.scale(alpha);
        m
    }

    pub fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            upper: self.upper.iter().map(|v| -v).collect(),
        }
    }

    pub fn frobenius_norm_squared(&self) -> f64 {
        // Packed rows start with their diagonal entry.
        let mut acc = 0.0;
        let mut k = 0;
        for i in 0..self.dim {
            let row = &self.upper[k..k + self.dim - i];
            acc += row[0] * row[0] + 2.0 * row[1..].iter().map(|v| v * v).sum::<f64>();
            k += self.dim - i;
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.frobenius_norm_squared())
    }

    pub fn max_abs_diff(&self, other: &SymmetricMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        check_dim(self.dim, v.len())?;
        let mut acc = 0.0;
        let mut k = 0;
        for i in 0..self.dim {
            let row = &self.upper[k..k + self.dim - i];
            let off: f64 = row[1..].iter().zip(&v[i + 1..]).map(|(m, x)| m * x).sum();
            acc += v[i] * (row[0] * v[i] + 2.0 * off);
            k += self.dim - i;
        }
        Ok(acc)
    }

    fn dense(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let v = self.get(i, j);
                out[i * d + j] = v;
                out[j * d + i] = v;
            }
        }
        out
    }
}

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricMatrix")
            .field("dim", &self.dim)
            .field("rows", &self.to_rows())
            .finish()
    }
}

/// `⟨m, others[i]⟩` for every `i`.
pub fn frobenius_inner_many(m: &SymmetricMatrix, others: &[SymmetricMatrix]) -> Result<Vec<f64>> {
    // Doubling the off-diagonal entries of `m` once turns every inner product
    // into a flat dot product over packed storage.
    let d = m.dim;
    let mut weighted = m.upper.clone();
    let mut k = 0;
    for i in 0..d {
        for w in &mut weighted[k + 1..k + d - i] {
            *w *= 2.0;
        }
        k += d - i;
    }
    others
        .iter()
        .map(|o| {
            check_dim(d, o.dim)?;
            Ok(packed_dot(&weighted, &o.upper))
        })
        .collect()
}

fn packed_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut lanes = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            lanes[l] += x[l] * y[l];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]) + tail
}

/// `sqrt(a² + b²)`, rescaling only when squaring could overflow.
fn hypot(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m > 1e150 {
        libm::hypot(a, b)
    } else {
        libm::sqrt(a * a + b * b)
    }
}

/// `Σ_ij a(i,j)·b(i,j)`, which is `tr(a·b)` for symmetric operands.
pub fn frobenius_inner(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<f64> {
    check_dim(a.dim, b.dim)?;
    let d = a.dim;
    let mut acc = 0.0;
    let mut k = 0;
    for i in 0..d {
        let len = d - i;
        let ra = &a.upper[k..k + len];
        let rb = &b.upper[k..k + len];
        let off: f64 = ra[1..].iter().zip(&rb[1..]).map(|(x, y)| x * y).sum();
        acc += ra[0] * rb[0] + 2.0 * off;
        k += len;
    }
    Ok(acc)
}

/// Eigenvalues in nondecreasing order, eigenvectors stored as the columns of a
/// row-major `d × d` orthogonal matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    vectors: Vec<f64>,
    dim: usize,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(row, k)` of the eigenvector matrix, i.e. component `row` of
    /// the `k`-th eigenvector.
    pub fn vector_entry(&self, row: usize, k: usize) -> f64 {
        self.vectors[row * self.dim + k]
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        (0..self.dim).map(|r| self.vector_entry(r, k)).collect()
    }

    /// `U · diag(f(λ)) · Uᵀ`.
    pub fn reconstruct_with(&self, mut f: impl FnMut(f64) -> f64) -> SymmetricMatrix {
        let d = self.dim;
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let active: Vec<usize> = (0..d).filter(|&k| mapped[k] != 0.0).collect();
        SymmetricMatrix::from_fn(d, |i, j| {
            let ui = &self.vectors[i * d..(i + 1) * d];
            let uj = &self.vectors[j * d..(j + 1) * d];
            active.iter().map(|&k| mapped[k] * ui[k] * uj[k]).sum()
        })
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Eigendecomposition by Householder reduction to tridiagonal form followed by
/// implicit QL. Falls back to Jacobi if QL fails to converge.
pub fn eigendecompose(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries"));
    }
    let n = m.dim;
    let mut v = m.dense();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut d, &mut e, true);
    if !tridiagonal_ql(n, &mut v, &mut d, &mut e, true) {
        return eigendecompose_jacobi(m);
    }
    Ok(sorted_decomposition(n, &d, &v))
}

/// Eigenvalues only, ascending. Cheaper than a full decomposition.
pub fn eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries"));
    }
    let n = m.dim;
    let mut v = m.dense();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut d, &mut e, false);
    if !tridiagonal_ql(n, &mut v, &mut d, &mut e, false) {
        return Ok(eigendecompose_jacobi(m)?.eigenvalues);
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// `‖π_{S+}(m)‖²_F`, the squared norm of the positive eigenvalues.
pub fn psd_norm_squared(m: &SymmetricMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?
        .iter()
        .filter(|l| **l > 0.0)
        .map(|l| l * l)
        .sum())
}

fn sorted_decomposition(d: usize, values: &[f64], v: &[f64]) -> EigenDecomposition {
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let mut vectors = vec![0.0; d * d];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..d {
            vectors[r * d + new] = v[r * d + old];
        }
    }
    EigenDecomposition {
        eigenvalues,
        vectors,
        dim: d,
    }
}

// Householder reduction of the row-major matrix in `v`. On return `v` holds
// the accumulated orthogonal transform, `d` the diagonal and `e[1..]` the
// subdiagonal. Without `vectors` the transform is not accumulated.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], vectors: bool) {
    if n == 0 {
        return;
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = 0.0;
            }
            for j in 0..i {
                let f = d[j];
                v[j * n + i] = f;
                let mut g = e[j] + v[j * n + j] * f;
                for k in j + 1..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }

    if !vectors {
        for j in 0..n {
            d[j] = v[j * n + j];
        }
        e[0] = 0.0;
        return;
    }
    for i in 0..n - 1 {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

// Implicit QL with Wilkinson-style shifts on the tridiagonal from
// `tridiagonalize`, rotating `v` only when `vectors` is set. Returns false if some eigenvalue fails to converge.
fn tridiagonal_ql(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], vectors: bool) -> bool {
    if n == 0 {
        return true;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > f64::EPSILON * tst1 {
            m += 1;
        }
        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                if iterations > QL_MAX_ITERATIONS {
                    return false;
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in &mut d[l + 2..n] {
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
                    let h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if !vectors {
                        continue;
                    }
                    for k in 0..n {
                        let h = v[k * n + i + 1];
                        v[k * n + i + 1] = s * v[k * n + i] + c * h;
                        v[k * n + i] = c * v[k * n + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= f64::EPSILON * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    true
}

/// Cyclic Jacobi eigendecomposition. Slower than [`eigendecompose`] but
/// simple enough to serve as an independent reference.
pub fn eigendecompose_jacobi(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries"));
    }
    let d = m.dim;
    let mut a = m.dense();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }

    let threshold = JACOBI_TOLERANCE * m.frobenius_norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..d {
            for q in p + 1..d {
                off += 2.0 * a[p * d + q] * a[p * d + q];
            }
        }
        if libm::sqrt(off) <= threshold {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p * d + p] -= t * apq;
                a[q * d + q] += t * apq;
                a[p * d + q] = 0.0;
                a[q * d + p] = 0.0;
                for r in 0..d {
                    if r == p || r == q {
                        continue;
                    }
                    let g = a[r * d + p];
                    let h = a[r * d + q];
                    let rp = g - s * (h + g * tau);
                    let rq = h + s * (g - h * tau);
                    a[r * d + p] = rp;
                    a[p * d + r] = rp;
                    a[r * d + q] = rq;
                    a[q * d + r] = rq;
                }
                for r in 0..d {
                    let g = v[r * d + p];
                    let h = v[r * d + q];
                    v[r * d + p] = g - s * (h + g * tau);
                    v[r * d + q] = h + s * (g - h * tau);
                }
            }
        }
    }

    let diag: Vec<f64> = (0..d).map(|k| a[k * d + k]).collect();
    Ok(sorted_decomposition(d, &diag, &v))
}

/// Frobenius-nearest PSD matrix: negative eigenvalues clipped to zero.
pub fn psd_project(m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    Ok(eigendecompose(m)?.reconstruct_with(|l| if l < 0.0 { 0.0 } else { l }))
}
