//! Cubic B-spline basis on a uniform grid.
//!
//! `S_j`, `j = 0..N-1`, is centred at `t_j`, supported on `[t_{j-2}, t_{j+2}]`
//! and scaled so that `S_j(t_j) = 1` and `S_j(t_{j±1}) = 1/4`. Members near
//! the ends overhang `[0, 1]` and are simply truncated there.

use crate::error::{Error, Result};
use crate::grid::{gauss_legendre, Function, SampledFunction, UniformGrid};
use crate::linalg::{BandMatrix, BandedLu, Matrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubicBSplineBasis {
    grid: UniformGrid,
}

impl CubicBSplineBasis {
    pub fn new(grid: UniformGrid) -> Self {
        Self { grid }
    }

    #[inline]
    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    /// Number of members, equal to the number of grid subintervals.
    #[inline]
    pub fn len(&self) -> usize {
        self.grid.intervals()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid cells `[t_c, t_{c+1}]` meeting the support of `S_j`.
    pub fn support_cells(&self, j: usize) -> std::ops::Range<usize> {
        j.saturating_sub(2)..(j + 2).min(self.grid.intervals())
    }

    /// `S_j(t)`.
    pub fn eval<T: Real>(&self, j: usize, t: T) -> Result<T> {
        if j >= self.len() {
            return Err(Error::IndexOutOfRange { index: j, len: self.len() });
        }
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::OutOfDomain(t.to_f64_lossy()));
        }
        Ok(self.eval_raw(j, t))
    }

    /// The printed four-piece formula without argument checks; zero outside
    /// `[t_{j-2}, t_{j+2}]`.
    pub fn eval_raw<T: Real>(&self, j: usize, t: T) -> T {
        let n = T::from_usize_lossy(self.grid.intervals());
        let h = T::one() / n;
        let knot = |offset: isize| (T::from_usize_lossy(j) + T::lit(offset as f64)) / n;
        let (k_m2, k_m1, k_0, k_p1, k_p2) = (knot(-2), knot(-1), knot(0), knot(1), knot(2));
        let three = T::lit(3.0);
        let h2 = h * h;
        let h3 = h2 * h;
        let inner = |d: T| h3 + three * h2 * d + three * h * d * d - three * d * d * d;
        let value = if t < k_m2 || t > k_p2 {
            return T::zero();
        } else if t <= k_m1 {
            (t - k_m2).powi(3)
        } else if t <= k_0 {
            inner(t - k_m1)
        } else if t <= k_p1 {
            inner(k_p1 - t)
        } else {
            (k_p2 - t).powi(3)
        };
        value / (T::lit(4.0) * h3)
    }

    /// Moments of `δ(t0 − ·)`: the vector `[S_j(t0)]`.
    pub fn delta_moments<T: Real>(&self, t0: T) -> Result<Vec<T>> {
        if !(t0 >= T::zero() && t0 <= T::one()) {
            return Err(Error::OutOfDomain(t0.to_f64_lossy()));
        }
        Ok((0..self.len()).map(|j| self.eval_raw(j, t0)).collect())
    }

    /// Coefficients `c` with `Σ_j c_j S_j(t_i) = samples_i` at the nodes
    /// `t_0..t_{N-1}`. The collocation matrix is tridiagonal `(1/4, 1, 1/4)`.
    pub fn interpolate<T: Real>(&self, samples: &SampledFunction<T>) -> Result<Vec<T>> {
        if samples.grid() != self.grid {
            return Err(Error::GridMismatch {
                expected: self.grid.intervals(),
                found: samples.grid().intervals(),
            });
        }
        let n = self.len();
        let mut band = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            let t = self.grid.node::<T>(i);
            for j in i.saturating_sub(1)..=(i + 1).min(n - 1) {
                band.add(i, j, self.eval_raw(j, t))?;
            }
        }
        let rhs = &samples.values()[..n];
        let lu = BandedLu::factor(band)?;
        let c = lu.solve(rhs)?;
        let res = lu.residual(&c, rhs);
        let scale = rhs.iter().fold(T::one(), |m, v| m.max(v.abs()));
        if res > T::lit(1e-10) * scale {
            return Err(Error::NotConverged { residual: res.to_f64_lossy() });
        }
        Ok(c)
    }

    /// `∫₀¹ f(s) S_j(s) ds` by Gauss–Legendre on each support cell. Exact
    /// when `f` is a polynomial of degree ≤ 6 on every grid cell.
    pub fn moment<T: Real>(&self, j: usize, f: &(impl Function<T> + ?Sized)) -> T {
        self.support_cells(j)
            .map(|c| {
                let (a, b) = (self.grid.node::<T>(c), self.grid.node::<T>(c + 1));
                gauss_legendre(a, b, |s| f.eval(s) * self.eval_raw(j, s))
            })
            .sum()
    }

    /// L² Gram matrix `∫ S_i S_j`.
    pub fn gram<T: Real>(&self) -> Matrix<T> {
        let n = self.len();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..(i + 4).min(n) {
                let v = self.moment(i, &|s: T| self.eval_raw(j, s));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    pub fn combination<T: Real>(&self, coeffs: Vec<T>) -> Result<SplineFunction<T>> {
        SplineFunction::new(*self, coeffs)
    }
}

/// `Σ_j c_j S_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineFunction<T> {
    basis: CubicBSplineBasis,
    coeffs: Vec<T>,
}

impl<T: Real> SplineFunction<T> {
    pub fn new(basis: CubicBSplineBasis, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::LengthMismatch { expected: basis.len(), found: coeffs.len() });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn basis(&self) -> CubicBSplineBasis {
        self.basis
    }

    pub fn sample(&self, grid: UniformGrid) -> SampledFunction<T> {
        SampledFunction::from_fn(grid, |t: T| self.eval(t))
    }
}

impl<T: Real> Function<T> for SplineFunction<T> {
    fn eval(&self, t: T) -> T {
        let n = self.basis.len();
        let c = self.basis.grid().cell(t.max(T::zero()).min(T::one()));
        let lo = c.saturating_sub(2);
        let hi = (c + 3).min(n);
        (lo..hi).map(|j| self.coeffs[j] * self.basis.eval_raw(j, t)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn basis(n: usize) -> CubicBSplineBasis {
        CubicBSplineBasis::new(UniformGrid::new(n).unwrap())
    }

    #[test]
    fn node_values() {
        let b = basis(25);
        let g = b.grid();
        for j in 2..22 {
            assert!((b.eval(j, g.node::<f64>(j)).unwrap() - 1.0).abs() < 1e-12);
            assert!((b.eval(j, g.node::<f64>(j + 1)).unwrap() - 0.25).abs() < 1e-12);
            assert!((b.eval(j, g.node::<f64>(j - 1)).unwrap() - 0.25).abs() < 1e-12);
            assert!(b.eval(j, g.node::<f64>(j + 2)).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_index_and_argument() {
        let b = basis(10);
        assert!(matches!(b.eval(10, 0.5), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(b.eval(3, 1.5), Err(Error::OutOfDomain(_))));
        assert!(b.delta_moments(-0.1).is_err());
    }

    #[test]
    fn delta_moments_at_node() {
        let b = basis(25);
        let m = b.delta_moments(b.grid().node::<f64>(5)).unwrap();
        assert!((m[5] - 1.0).abs() < 1e-12);
        assert!((m[4] - 0.25).abs() < 1e-12 && (m[6] - 0.25).abs() < 1e-12);
        for (k, v) in m.iter().enumerate() {
            if k.abs_diff(5) >= 2 {
                assert!(v.abs() < 1e-12, "entry {k} = {v}");
            }
        }
    }

    #[test]
    fn delta_moments_at_zero() {
        let m = basis(25).delta_moments(0.0_f64).unwrap();
        assert!(m[0] > 0.0 && m[1] > 0.0);
        assert!(m[2..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn delta_moments_at_midpoint_are_symmetric() {
        let b = basis(25);
        let t0 = (b.grid().node::<f64>(5) + b.grid().node::<f64>(6)) / 2.0;
        let m = b.delta_moments(t0).unwrap();
        assert!((m[5] - m[6]).abs() < 1e-12);
        assert!((m[4] - m[7]).abs() < 1e-12);
        assert!(m[4] > 0.0);
    }

    #[test]
    fn interior_sum_is_constant() {
        let b = basis(20);
        // pinned: 1/4 + 1 + 1/4
        // the basis stops at S_{N-1}, so the sum is only complete up to t_{N-2}
        for k in 2..=17 {
            let t = b.grid().node::<f64>(k);
            let s: f64 = (0..b.len()).map(|j| b.eval_raw(j, t)).sum();
            assert!((s - 1.5).abs() < 1e-12);
            let tm = t + 0.37 / 20.0;
            let s: f64 = (0..b.len()).map(|j| b.eval_raw(j, tm)).sum();
            assert!((s - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn second_derivative_is_continuous_at_knots() {
        let b = basis(10);
        let j = 5;
        let h = 0.1;
        for k in 3..=7 {
            let t = k as f64 * h;
            let d = 1e-4;
            let s = |x: f64| b.eval_raw(j, x);
            let left = (s(t) - 2.0 * s(t - d) + s(t - 2.0 * d)) / (d * d);
            let right = (s(t + 2.0 * d) - 2.0 * s(t + d) + s(t)) / (d * d);
            // values of S'' are O(1/h²) = 100; jumps would be of that order
            assert!((left - right).abs() < 1.0, "knot {k}: {left} vs {right}");
        }
    }

    #[test]
    fn interpolation_recovers_spline_coefficients() {
        let b = basis(25);
        let coeffs: Vec<f64> = (0..25).map(|j| ((j * 7) % 5) as f64 - 2.0).collect();
        let s = b.combination(coeffs.clone()).unwrap();
        let c = b.interpolate(&s.sample(b.grid())).unwrap();
        for (p, q) in c.iter().zip(&coeffs) {
            assert!((p - q).abs() < 1e-8);
        }
    }

    #[test]
    fn interpolation_of_zero_is_zero() {
        let b = basis(12);
        let c = b.interpolate(&SampledFunction::<f64>::zeros(b.grid())).unwrap();
        assert!(c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn interpolation_of_identity_is_accurate_at_midpoints() {
        let b = basis(25);
        let g = b.grid();
        let samples = SampledFunction::from_fn(g, |t: f64| t);
        let s = b.combination(b.interpolate(&samples).unwrap()).unwrap();
        // The basis has no member centred at t_N, so collocation at t_{N-1}
        // misses a term and the error there decays only like 0.27^k into the
        // interior. Compare on midpoints in [0.1, 0.8].
        let worst = (2..20)
            .map(|j| {
                let t = (g.node::<f64>(j) + g.node::<f64>(j + 1)) / 2.0;
                (s.eval(t) - t).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3, "midpoint error {worst}");
    }

    #[test]
    fn gram_matches_fine_quadrature() {
        let b = basis(8);
        let g: Matrix<f64> = b.gram();
        let m = 4000;
        let fine = |i: usize, j: usize| {
            (0..m)
                .map(|k| {
                    let t = (k as f64 + 0.5) / m as f64;
                    b.eval_raw(i, t) * b.eval_raw(j, t)
                })
                .sum::<f64>()
                / m as f64
        };
        for (i, j) in [(0, 0), (3, 4), (2, 5), (7, 7), (1, 6)] {
            assert!((g[(i, j)] - fine(i, j)).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn splines_are_nonnegative(j in 0usize..20, t in 0.0f64..=1.0) {
            prop_assert!(basis(20).eval(j, t).unwrap() >= 0.0);
        }
    }
}
