//! Uniform grids on `[0, 1]`, sampled functions, quadrature and noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A real function of one variable that can be evaluated pointwise.
pub trait Function<T: Real> {
    fn eval(&self, t: T) -> T;
}

impl<T: Real, F: Fn(T) -> T> Function<T> for F {
    #[inline]
    fn eval(&self, t: T) -> T {
        self(t)
    }
}

/// Nodes `t_j = j / N`, `j = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UniformGrid {
    n: usize,
}

impl UniformGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("grid needs at least one subinterval".into()));
        }
        Ok(Self { n })
    }

    /// Number of subintervals.
    #[inline]
    pub fn intervals(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n + 1
    }

    #[inline]
    pub fn spacing<T: Real>(&self) -> T {
        T::one() / T::from_usize_lossy(self.n)
    }

    #[inline]
    pub fn node<T: Real>(&self, j: usize) -> T {
        T::from_usize_lossy(j) / T::from_usize_lossy(self.n)
    }

    pub fn nodes<T: Real>(&self) -> Vec<T> {
        (0..=self.n).map(|j| self.node(j)).collect()
    }

    /// Index of the cell `[t_j, t_{j+1}]` containing `t`, clamped to the grid.
    pub fn cell<T: Real>(&self, t: T) -> usize {
        let s = (t * T::from_usize_lossy(self.n)).floor();
        if s <= T::zero() {
            0
        } else {
            s.to_usize().unwrap_or(usize::MAX).min(self.n - 1)
        }
    }
}

/// Values of a real function at the nodes of a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    grid: UniformGrid,
    values: Vec<T>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: UniformGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::LengthMismatch { expected: grid.node_count(), found: values.len() });
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample {j}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Function<T>) -> Self {
        let values = (0..=grid.intervals()).map(|j| f.eval(grid.node(j))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: UniformGrid, c: T) -> Self {
        Self { grid, values: vec![c; grid.node_count()] }
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self::constant(grid, T::zero())
    }

    #[inline]
    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Piecewise-linear interpolation; arguments outside `[0, 1]` are clamped.
    pub fn interpolate(&self, t: T) -> T {
        let n = self.grid.intervals();
        let t = t.max(T::zero()).min(T::one());
        let j = self.grid.cell(t);
        let w = t * T::from_usize_lossy(n) - T::from_usize_lossy(j);
        self.values[j] * (T::one() - w) + self.values[j + 1] * w
    }

    fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                expected: self.grid.intervals(),
                found: other.grid.intervals(),
            });
        }
        Ok(())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Composite trapezoid rule for `∫_a^b f(s) ds`, with the integrand
    /// linearly interpolated at endpoints that are not nodes. Exact for
    /// the piecewise-linear interpolant of the samples.
    pub fn integrate(&self, a: T, b: T) -> Result<T> {
        if !(a >= T::zero() && b <= T::one() && a <= b) {
            return Err(Error::InvalidBounds { a: a.to_f64_lossy(), b: b.to_f64_lossy() });
        }
        if a == b {
            return Ok(T::zero());
        }
        let h = self.grid.spacing::<T>();
        let first = self.grid.cell(a);
        let last = self.grid.cell(b);
        let mut acc = T::zero();
        let mut full_cells = T::zero();
        for j in first..=last {
            let lo = a.max(self.grid.node(j));
            let hi = b.min(self.grid.node(j + 1));
            if hi <= lo {
                continue;
            }
            if lo == self.grid.node(j) && hi == self.grid.node(j + 1) {
                full_cells = full_cells + (self.values[j] + self.values[j + 1]) * T::half();
            } else {
                acc = acc + (hi - lo) * (self.interpolate(lo) + self.interpolate(hi)) * T::half();
            }
        }
        Ok(acc + full_cells * h)
    }

    /// `max_j |f_j − g_j|`.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        self.ensure_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }

    /// Two-column CSV with header `t,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (j, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.grid.node::<T>(j), v));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("t,value") => {}
            other => {
                return Err(Error::InvalidArgument(format!("expected header t,value, found {other:?}")))
            }
        }
        let mut values = Vec::new();
        for (row, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let value = line
                .split(',')
                .nth(1)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("malformed CSV row {row}: {line}")))?;
            values.push(T::lit(value));
        }
        let grid = UniformGrid::new(values.len().saturating_sub(1))?;
        Self::new(grid, values)
    }
}

impl<T: Real> Function<T> for SampledFunction<T> {
    #[inline]
    fn eval(&self, t: T) -> T {
        self.interpolate(t)
    }
}

/// Free-function form of [`SampledFunction::integrate`].
pub fn quad_weighted_integral<T: Real>(f: &SampledFunction<T>, a: T, b: T) -> Result<T> {
    f.integrate(a, b)
}

/// Free-function form of [`SampledFunction::sup_distance`].
pub fn sup_error<T: Real>(f: &SampledFunction<T>, g: &SampledFunction<T>) -> Result<T> {
    f.sup_distance(g)
}

/// Bounded relative noise: each datum is scaled by `1 + level · u` with `u`
/// uniform on `[−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec<T> {
    pub level: T,
    pub seed: u64,
}

impl<T: Real> NoiseSpec<T> {
    pub fn new(level: T, seed: u64) -> Result<Self> {
        if !(level >= T::zero()) || !level.is_finite() {
            return Err(Error::InvalidArgument(format!("noise level must be >= 0, got {level}")));
        }
        Ok(Self { level, seed })
    }

    /// The unscaled direction `u ∈ [−1, 1]^len` drawn from the seeded stream.
    pub fn direction(&self, len: usize) -> Vec<T> {
        noise_direction(len, self.seed)
    }

    /// `y_j (1 + ε u_j)`, so `|y_j − y_{ε,j}| ≤ ε |y_j|`.
    pub fn apply(&self, y: &[T]) -> Vec<T> {
        let u = self.direction(y.len());
        y.iter().zip(u).map(|(&v, u)| v + v * self.level * u).collect()
    }
}

/// Deterministic uniform samples on `[−1, 1]`.
pub fn noise_direction<T: Real>(len: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| T::lit(rng.gen_range(-1.0..=1.0))).collect()
}

pub fn add_relative_noise<T: Real>(y: &SampledFunction<T>, spec: NoiseSpec<T>) -> SampledFunction<T> {
    SampledFunction { grid: y.grid, values: spec.apply(&y.values) }
}

/// Five-point Gauss–Legendre rule on `[a, b]`; exact for degree ≤ 9.
pub fn gauss_legendre<T: Real>(a: T, b: T, f: impl Fn(T) -> T) -> T {
    const X: [f64; 5] = [
        0.0,
        0.538_469_310_105_683_1,
        -0.538_469_310_105_683_1,
        0.906_179_845_938_664,
        -0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let mid = (a + b) * T::half();
    let half = (b - a) * T::half();
    X.iter().zip(W.iter()).map(|(&x, &w)| T::lit(w) * f(mid + half * T::lit(x))).sum::<T>() * half
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> UniformGrid {
        UniformGrid::new(n).unwrap()
    }

    #[test]
    fn nodes_are_exact_at_ends() {
        let g = grid(7);
        let t = g.nodes::<f64>();
        assert_eq!(t[0], 0.0);
        assert_eq!(t[7], 1.0);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!((g.spacing::<f64>() * 7.0 - 1.0).abs() < 1e-15);
        assert!(UniformGrid::new(0).is_err());
    }

    #[test]
    fn integrate_constant_is_exact() {
        let f = SampledFunction::constant(grid(10), 1.0_f64);
        assert_eq!(f.integrate(0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn integrate_linear_is_exact() {
        let f = SampledFunction::from_fn(grid(50), |t: f64| t);
        assert!((f.integrate(0.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
        // non-node endpoints are handled by interpolation, still exact
        let v = f.integrate(0.013, 0.731).unwrap();
        assert!((v - (0.731f64.powi(2) - 0.013f64.powi(2)) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_square_against_antiderivative() {
        let f = SampledFunction::from_fn(grid(50), |t: f64| t * t);
        assert!((f.integrate(0.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn integrate_rejects_bad_bounds() {
        let f = SampledFunction::constant(grid(4), 1.0_f64);
        assert!(matches!(f.integrate(0.6, 0.2), Err(Error::InvalidBounds { .. })));
        assert!(f.integrate(-0.1, 0.2).is_err());
        assert!(f.integrate(0.1, 1.2).is_err());
    }

    #[test]
    fn trapezoid_converges_at_second_order() {
        let exact = 1.0 - 1.0f64.cos();
        let errs: Vec<f64> = [10, 20, 40, 80]
            .iter()
            .map(|&n| {
                let f = SampledFunction::from_fn(grid(n), |t: f64| t.sin());
                (f.integrate(0.0, 1.0).unwrap() - exact).abs()
            })
            .collect();
        let slope = (errs[3] / errs[0]).ln() / (80.0f64 / 10.0).ln();
        assert!((-2.3..=-1.7).contains(&slope), "slope {slope}");
    }

    #[test]
    fn sup_error_examples() {
        let g = grid(10);
        let one = SampledFunction::constant(g, 1.0_f64);
        let zero = SampledFunction::zeros(g);
        assert_eq!(sup_error(&one, &one).unwrap(), 0.0);
        assert_eq!(sup_error(&one, &zero).unwrap(), 1.0);
        let f = SampledFunction::from_fn(g, |t: f64| t);
        let q = SampledFunction::from_fn(g, |t: f64| t * t);
        assert!((sup_error(&f, &q).unwrap() - 0.25).abs() < 1e-15);
        let other = SampledFunction::zeros(grid(11));
        assert!(matches!(sup_error(&f, &other), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn zero_noise_is_identity() {
        let y = SampledFunction::from_fn(grid(20), |t: f64| t.exp());
        let spec = NoiseSpec::new(0.0, 4).unwrap();
        assert_eq!(add_relative_noise(&y, spec), y);
    }

    #[test]
    fn one_percent_noise_stays_in_band() {
        let y = SampledFunction::constant(grid(200), 1.0_f64);
        let out = add_relative_noise(&y, NoiseSpec::new(0.01, 17).unwrap());
        assert!(out.values().iter().all(|v| (0.99..=1.01).contains(v)));
        assert!(out.values().iter().any(|&v| v != 1.0));
    }

    #[test]
    fn noise_is_deterministic() {
        let y = SampledFunction::from_fn(grid(30), |t: f64| 1.0 + t);
        let spec = NoiseSpec::new(0.05, 123).unwrap();
        let a = add_relative_noise(&y, spec);
        let b = add_relative_noise(&y, spec);
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert!(NoiseSpec::new(-0.1_f64, 1).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = SampledFunction::from_fn(grid(8), |t: f64| (3.0 * t).sin());
        let text = f.to_csv();
        assert!(text.starts_with("t,value\n"));
        assert_eq!(SampledFunction::<f64>::from_csv(&text).unwrap(), f);
    }

    #[test]
    fn gauss_legendre_is_exact_for_degree_nine() {
        let v = gauss_legendre(0.2_f64, 0.9, |t| t.powi(9));
        assert!((v - (0.9f64.powi(10) - 0.2f64.powi(10)) / 10.0).abs() < 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        let f = SampledFunction::from_fn(grid(16), |t: f32| t);
        assert!((f.integrate(0.0, 1.0).unwrap() - 0.5).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn noise_bound_holds(seed in any::<u64>(), level in 0.0f64..0.5) {
            let y = SampledFunction::from_fn(grid(40), |t: f64| (5.0 * t).sin() - 0.3);
            let out = add_relative_noise(&y, NoiseSpec::new(level, seed).unwrap());
            for (a, b) in y.values().iter().zip(out.values()) {
                prop_assert!((a - b).abs() <= level * a.abs() * (1.0 + 1e-12));
            }
        }

        #[test]
        fn piecewise_linear_integrals_are_exact(
            vals in proptest::collection::vec(-10.0f64..10.0, 13),
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
        ) {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let f = SampledFunction::new(grid(12), vals).unwrap();
            // oracle: fine Gauss-Legendre on each cell of the interpolant
            let mut oracle = 0.0;
            for j in 0..12 {
                let lo = a.max(j as f64 / 12.0);
                let hi = b.min((j + 1) as f64 / 12.0);
                if hi > lo {
                    oracle += gauss_legendre(lo, hi, |t| f.interpolate(t));
                }
            }
            prop_assert!((f.integrate(a, b).unwrap() - oracle).abs() < 1e-11);
        }
    }
}
