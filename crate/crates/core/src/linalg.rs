//! Small dense and banded linear algebra, generic over [`Real`].
//!
//! The systems in this crate are either tiny (a few hundred unknowns, dense)
//! or banded finite-difference operators; neither warrants an external
//! solver backend.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch { expected: cols, found: bad.len() });
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, found: x.len() });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `selfᵀ · x`.
    pub fn tr_mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.rows {
            return Err(Error::LengthMismatch { expected: self.rows, found: x.len() });
        }
        let mut out = vec![T::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * xi;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch { expected: self.cols, found: other.rows });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        }))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Appends a row at the bottom.
    pub fn push_row(&mut self, row: &[T]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, found: row.len() });
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn norm_inf<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::InvalidArgument(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        let tiny = scale * T::epsilon() * T::from_usize_lossy(n.max(1));
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= tiny || pmax == T::zero() {
                return Err(Error::Singular { column: k, pivot: pmax.to_f64_lossy() });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] / pivot;
                lu[(i, k)] = m;
                if m != T::zero() {
                    for j in k + 1..n {
                        let v = lu[(k, j)];
                        lu[(i, j)] = lu[(i, j)] - m * v;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.lu.rows;
        if b.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: b.len() });
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: T = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let s: T = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }

    /// Smallest and largest pivot magnitudes; their ratio is a cheap proxy
    /// for how far the matrix is from singular.
    pub fn pivot_range(&self) -> (T, T) {
        let n = self.lu.rows;
        (0..n).map(|i| self.lu[(i, i)].abs()).fold((T::infinity(), T::zero()), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
    }
}

/// Solves a square dense system by partial-pivoting LU.
pub fn solve_dense<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    Lu::factor(a)?.solve(b)
}

/// Thin singular value decomposition `A = U Σ Vᵀ` by one-sided Jacobi
/// rotations. Accurate for the small, badly scaled matrices met here.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// `m × k` with orthonormal columns, `k = min(m, n)`.
    pub u: Matrix<T>,
    /// Singular values, descending.
    pub sigma: Vec<T>,
    /// `n × k` with orthonormal columns.
    pub v: Matrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        if a.rows >= a.cols {
            Self::tall(a)
        } else {
            let t = Self::tall(&a.transpose());
            Svd { u: t.v, sigma: t.sigma, v: t.u }
        }
    }

    fn tall(a: &Matrix<T>) -> Self {
        let (m, n) = (a.rows, a.cols);
        // column-major working copies
        let mut w: Vec<Vec<T>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
        let mut v: Vec<Vec<T>> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        let eps = T::epsilon();
        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha = dot(&w[p], &w[p]);
                    let beta = dot(&w[q], &w[q]);
                    let gamma = dot(&w[p], &w[q]);
                    if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (T::two() * gamma);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    rotate(&mut w, p, q, c, s);
                    rotate(&mut v, p, q, c, s);
                }
            }
            if !rotated {
                break;
            }
        }
        let mut order: Vec<(T, usize)> = w.iter().enumerate().map(|(j, c)| (norm2(c), j)).collect();
        order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
        let sigma: Vec<T> = order.iter().map(|&(s, _)| s).collect();
        let u = Matrix::from_fn(m, n, |i, k| {
            let (s, j) = order[k];
            if s > T::zero() {
                w[j][i] / s
            } else {
                T::zero()
            }
        });
        let vm = Matrix::from_fn(n, n, |i, k| v[order[k].1][i]);
        Svd { u, sigma, v: vm }
    }

    /// Default rank cutoff `max(m, n) · ε · σ_max`.
    pub fn default_tolerance(&self) -> T {
        let dim = self.u.rows.max(self.v.rows);
        T::from_usize_lossy(dim) * T::epsilon() * self.sigma.first().copied().unwrap_or(T::zero())
    }

    pub fn rank(&self, tol: T) -> usize {
        self.sigma.iter().filter(|&&s| s > tol).count()
    }

    /// `σ_max / σ_min`; infinite when the matrix is rank deficient.
    pub fn condition(&self) -> T {
        match (self.sigma.first(), self.sigma.last()) {
            (Some(&hi), Some(&lo)) if lo > T::zero() => hi / lo,
            _ => T::infinity(),
        }
    }

    /// Minimum-norm least-squares solution, discarding singular values `≤ tol`.
    pub fn solve(&self, b: &[T], tol: T) -> Result<Vec<T>> {
        if b.len() != self.u.rows {
            return Err(Error::LengthMismatch { expected: self.u.rows, found: b.len() });
        }
        let coeffs = self.u.tr_mul_vec(b)?;
        let mut x = vec![T::zero(); self.v.rows];
        for (k, (&s, &c)) in self.sigma.iter().zip(&coeffs).enumerate() {
            if s > tol {
                let f = c / s;
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi = *xi + self.v[(i, k)] * f;
                }
            }
        }
        Ok(x)
    }
}

fn rotate<T: Real>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the matrix whose columns are eigenvectors.
pub fn symmetric_eigen<T: Real>(a: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>)> {
    if a.rows != a.cols {
        return Err(Error::InvalidArgument("eigen-decomposition needs a square matrix".into()));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off <= T::epsilon() * T::epsilon() * m.max_abs().powi(2) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::two() * apq);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Ok(((0..n).map(|i| m[(i, i)]).collect(), v))
}

/// Square band matrix with `kl` sub- and `ku` super-diagonals, stored by
/// rows with room for the fill-in produced by partial pivoting.
#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![T::zero(); n * width] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn in_storage(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.kl + self.ku
    }

    /// Adds `v` to entry `(i, j)`.
    pub fn add(&mut self, i: usize, j: usize, v: T) -> Result<()> {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.ku {
            return Err(Error::InvalidArgument(format!(
                "entry ({i}, {j}) outside band (kl = {}, ku = {})",
                self.kl, self.ku
            )));
        }
        let s = self.slot(i, j);
        self.data[s] = self.data[s] + v;
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i < self.n && j < self.n && self.in_storage(i, j) {
            self.data[self.slot(i, j)]
        } else {
            T::zero()
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }
}

/// Banded LU with partial pivoting.
#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    factors: BandMatrix<T>,
    lower: Vec<T>,
    piv: Vec<usize>,
    original: BandMatrix<T>,
}

impl<T: Real> BandedLu<T> {
    pub fn factor(a: BandMatrix<T>) -> Result<Self> {
        let original = a.clone();
        let mut f = a;
        let (n, kl, ku) = (f.n, f.kl, f.ku);
        let mut lower = vec![T::zero(); n * kl.max(1)];
        let mut piv = vec![0; n];
        let tiny = T::min_positive_value();
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut pmax = f.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = f.get(i, k).abs();
                if v > pmax {
                    p = i;
                    pmax = v;
                }
            }
            if pmax <= tiny {
                return Err(Error::Singular { column: k, pivot: pmax.to_f64_lossy() });
            }
            piv[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (sk, sp) = (f.slot(k, j), f.slot(p, j));
                    f.data.swap(sk, sp);
                }
            }
            let pivot = f.get(k, k);
            for i in k + 1..=last_row {
                let si = f.slot(i, k);
                let m = f.data[si] / pivot;
                f.data[si] = T::zero();
                lower[k * kl + (i - k - 1)] = m;
                if m != T::zero() {
                    for j in k + 1..=last_col {
                        let a_kj = f.data[f.slot(k, j)];
                        let s = f.slot(i, j);
                        f.data[s] = f.data[s] - m * a_kj;
                    }
                }
            }
        }
        Ok(Self { factors: f, lower, piv, original })
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let f = &self.factors;
        let (n, kl, ku) = (f.n, f.kl, f.ku);
        if b.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: b.len() });
        }
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] = x[i] - self.lower[k * kl + (i - k - 1)] * xk;
            }
        }
        for k in (0..n).rev() {
            let last = (k + kl + ku).min(n - 1);
            let s: T = (k + 1..=last).map(|j| f.data[f.slot(k, j)] * x[j]).sum();
            x[k] = (x[k] - s) / f.data[f.slot(k, k)];
        }
        Ok(x)
    }

    /// Max-norm of `A x − b` against the unfactored matrix.
    pub fn residual(&self, x: &[T], b: &[T]) -> T {
        let ax = self.original.mul_vec(x);
        ax.iter().zip(b).fold(T::zero(), |m, (&p, &q)| m.max((p - q).abs()))
    }
}
