//! Quadratic Volterra operator
//!
//! ```text
//! (Ax)(t) = ∫₀ᵗ x⁰(t−s) x(s) ds + ν ∫₀ᵗ x(t−s) x(s) ds
//! ```
//!
//! sampled at measurement nodes, with its Fréchet derivative and the
//! adjoint of the sampled derivative.

use crate::error::{Error, Result};
use crate::grid::{gauss_legendre, Function, SampledFunction, UniformGrid};
use crate::linalg::dot;
use crate::scalar::Real;

/// `A = A₀ + ν A₁` with convolution kernel `x⁰` and quadratic self-convolution `A₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticVolterraOperator<T> {
    kernel: SampledFunction<T>,
    nu: T,
}

impl<T: Real> QuadraticVolterraOperator<T> {
    pub fn new(kernel: SampledFunction<T>, nu: T) -> Result<Self> {
        if !(nu >= T::zero()) || !nu.is_finite() {
            return Err(Error::InvalidArgument(format!("nonlinearity weight must be >= 0, got {nu}")));
        }
        Ok(Self { kernel, nu })
    }

    /// The operator used throughout the moment experiments: `x⁰(t) = t`.
    pub fn identity_kernel(grid: UniformGrid, nu: T) -> Result<Self> {
        Self::new(SampledFunction::from_fn(grid, |t: T| t), nu)
    }

    #[inline]
    pub fn kernel(&self) -> &SampledFunction<T> {
        &self.kernel
    }

    #[inline]
    pub fn nu(&self) -> T {
        self.nu
    }

    #[inline]
    pub fn grid(&self) -> UniformGrid {
        self.kernel.grid()
    }

    fn check_grid(&self, x: &SampledFunction<T>) -> Result<()> {
        if x.grid() != self.grid() {
            return Err(Error::GridMismatch { expected: self.grid().intervals(), found: x.grid().intervals() });
        }
        Ok(())
    }

    fn check_t(t: T) -> Result<()> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::OutOfDomain(t.to_f64_lossy()));
        }
        Ok(())
    }

    /// `∫₀ᵗ a(t−s) b(s) ds` by the trapezoid rule on the shared grid.
    fn convolve(a: &SampledFunction<T>, b: &SampledFunction<T>, t: T) -> Result<T> {
        let integrand = SampledFunction::from_fn(b.grid(), |s: T| a.interpolate(t - s) * b.interpolate(s));
        integrand.integrate(T::zero(), t)
    }

    /// `(Ax)(t)`.
    pub fn apply(&self, x: &SampledFunction<T>, t: T) -> Result<T> {
        self.check_grid(x)?;
        Self::check_t(t)?;
        let linear = Self::convolve(&self.kernel, x, t)?;
        if self.nu == T::zero() {
            return Ok(linear);
        }
        Ok(linear + self.nu * Self::convolve(x, x, t)?)
    }

    /// `(A₁x)(t) = ∫₀ᵗ x(t−s) x(s) ds`.
    pub fn apply_quadratic_part(&self, x: &SampledFunction<T>, t: T) -> Result<T> {
        self.check_grid(x)?;
        Self::check_t(t)?;
        Self::convolve(x, x, t)
    }

    /// `(dA(x) f)(t) = ∫₀ᵗ x⁰(t−s) f(s) ds + 2ν ∫₀ᵗ x(t−s) f(s) ds`.
    pub fn apply_derivative(&self, x: &SampledFunction<T>, f: &SampledFunction<T>, t: T) -> Result<T> {
        self.check_grid(x)?;
        self.check_grid(f)?;
        Self::check_t(t)?;
        let linear = Self::convolve(&self.kernel, f, t)?;
        if self.nu == T::zero() {
            return Ok(linear);
        }
        Ok(linear + T::two() * self.nu * Self::convolve(x, f, t)?)
    }

    /// Adjoint kernel `s ↦ x⁰(t_i − s) + 2ν x_lin(t_i − s)` on `[0, t_i]`.
    pub fn adjoint_kernel<'a>(&'a self, x_lin: &'a dyn Function<T>, t_i: T) -> impl Fn(T) -> T + 'a {
        move |s: T| {
            if s > t_i {
                T::zero()
            } else {
                let r = (t_i - s).max(T::zero());
                self.kernel.interpolate(r) + T::two() * self.nu * x_lin.eval(r)
            }
        }
    }
}

/// `P_h A`: the operator sampled at measurement nodes `t_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteForwardMap<T> {
    op: QuadraticVolterraOperator<T>,
    nodes: Vec<T>,
}

impl<T: Real> DiscreteForwardMap<T> {
    pub fn new(op: QuadraticVolterraOperator<T>, nodes: Vec<T>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("at least one measurement node is required".into()));
        }
        if nodes.iter().any(|&t| !(t > T::zero() && t <= T::one())) {
            return Err(Error::InvalidArgument("measurement nodes must lie in (0, 1]".into()));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("measurement nodes must be strictly increasing".into()));
        }
        Ok(Self { op, nodes })
    }

    /// Measurements at every grid node except `t_0`: `t_i = i/N`, `i = 1..=N`.
    pub fn at_grid_nodes(op: QuadraticVolterraOperator<T>) -> Self {
        let g = op.grid();
        let nodes = (1..=g.intervals()).map(|i| g.node(i)).collect();
        Self { op, nodes }
    }

    #[inline]
    pub fn operator(&self) -> &QuadraticVolterraOperator<T> {
        &self.op
    }

    #[inline]
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `[(Ax)(t_i)]`.
    pub fn forward_data(&self, x: &SampledFunction<T>) -> Result<Vec<T>> {
        self.nodes.iter().map(|&t| self.op.apply(x, t)).collect()
    }

    /// `[(A₁x)(t_i)]`.
    pub fn quadratic_data(&self, x: &SampledFunction<T>) -> Result<Vec<T>> {
        self.nodes.iter().map(|&t| self.op.apply_quadratic_part(x, t)).collect()
    }

    /// `[(dA(x) f)(t_i)]`.
    pub fn derivative_data(&self, x: &SampledFunction<T>, f: &SampledFunction<T>) -> Result<Vec<T>> {
        self.nodes.iter().map(|&t| self.op.apply_derivative(x, f, t)).collect()
    }

    /// `(P_h dA(x))* w = Σ_i w_i [x⁰(t_i−s) + 2ν x(t_i−s)] χ_[0,t_i](s)`,
    /// sampled on the operator grid.
    pub fn adjoint(&self, x: &SampledFunction<T>, w: &[T]) -> Result<SampledFunction<T>> {
        self.op.check_grid(x)?;
        if w.len() != self.nodes.len() {
            return Err(Error::LengthMismatch { expected: self.nodes.len(), found: w.len() });
        }
        let kernels: Vec<_> = self.nodes.iter().map(|&t| self.op.adjoint_kernel(x, t)).collect();
        Ok(SampledFunction::from_fn(self.op.grid(), |s: T| {
            kernels.iter().zip(w).map(|(k, &wi)| wi * k(s)).sum()
        }))
    }

    /// `⟨(P_h dA(x))* w, f⟩` evaluated through the forward derivative, i.e.
    /// `⟨w, P_h dA(x) f⟩`; exact duality for the discrete pair.
    pub fn adjoint_pairing(&self, x: &SampledFunction<T>, w: &[T], f: &SampledFunction<T>) -> Result<T> {
        let d = self.derivative_data(x, f)?;
        if w.len() != d.len() {
            return Err(Error::LengthMismatch { expected: d.len(), found: w.len() });
        }
        Ok(dot(w, &d))
    }

    /// High-accuracy data `[(Ax)(t_i)]` for a pointwise-defined `x`.
    ///
    /// Integrates by five-point Gauss–Legendre on panels split at the grid
    /// nodes and at `breakpoints` (and their reflections `t_i − b`), so data
    /// for piecewise polynomials of degree ≤ 4 between those points are
    /// exact up to rounding.
    pub fn forward_exact(&self, x: &(impl Function<T> + ?Sized), breakpoints: &[T]) -> Vec<T> {
        self.exact_map(breakpoints, |t, s| {
            let r = (t - s).max(T::zero());
            let xs = x.eval(s);
            self.op.kernel.interpolate(r) * xs + self.op.nu * x.eval(r) * xs
        })
    }

    /// `[(dA(x) f)(t_i)]` with the quadrature of [`Self::forward_exact`].
    pub fn derivative_exact(
        &self,
        x: &(impl Function<T> + ?Sized),
        f: &(impl Function<T> + ?Sized),
        breakpoints: &[T],
    ) -> Vec<T> {
        self.exact_map(breakpoints, |t, s| {
            let r = (t - s).max(T::zero());
            (self.op.kernel.interpolate(r) + T::two() * self.op.nu * x.eval(r)) * f.eval(s)
        })
    }

    /// `[(A₁x)(t_i)]` with the quadrature of [`Self::forward_exact`].
    pub fn quadratic_exact(&self, x: &(impl Function<T> + ?Sized), breakpoints: &[T]) -> Vec<T> {
        self.exact_map(breakpoints, |t, s| x.eval((t - s).max(T::zero())) * x.eval(s))
    }

    fn exact_map(&self, breakpoints: &[T], integrand: impl Fn(T, T) -> T) -> Vec<T> {
        let g = self.op.grid();
        self.nodes
            .iter()
            .map(|&t| {
                let mut cuts: Vec<T> = (0..=g.intervals()).map(|j| g.node::<T>(j)).collect();
                cuts.extend(breakpoints.iter().copied());
                cuts.extend((0..=g.intervals()).map(|j| t - g.node::<T>(j)));
                cuts.extend(breakpoints.iter().map(|&b| t - b));
                cuts.push(t);
                cuts.retain(|&c| c >= T::zero() && c <= t);
                cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                cuts.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * T::lit(16.0));
                cuts.windows(2).map(|w| gauss_legendre(w[0], w[1], |s| integrand(t, s))).sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> UniformGrid {
        UniformGrid::new(n).unwrap()
    }

    fn wiggle(g: UniformGrid, seed: f64) -> SampledFunction<f64> {
        SampledFunction::from_fn(g, move |t: f64| (seed * t + 0.3).sin() + 0.5 * (2.0 * seed * t).cos())
    }

    #[test]
    fn zero_input_gives_zero() {
        let g = grid(20);
        let op = QuadraticVolterraOperator::identity_kernel(g, 0.7).unwrap();
        let z = SampledFunction::zeros(g);
        for t in [0.0, 0.33, 1.0] {
            assert_eq!(op.apply(&z, t).unwrap(), 0.0);
        }
        let map = DiscreteForwardMap::at_grid_nodes(op);
        assert!(map.forward_data(&z).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_case_matches_antiderivative() {
        let g = grid(40);
        let op = QuadraticVolterraOperator::identity_kernel(g, 0.0).unwrap();
        let one = SampledFunction::constant(g, 1.0_f64);
        for t in [0.25_f64, 0.5, 0.8, 1.0] {
            assert!((op.apply(&one, t).unwrap() - t * t / 2.0).abs() < 1e-12);
        }
        // non-node evaluation point: linear interpolation of the integrand at
        // the endpoint costs O(h²)
        assert!((op.apply(&one, 0.513).unwrap() - 0.513f64.powi(2) / 2.0).abs() < 1e-3);
    }

    #[test]
    fn nonlinear_term_adds_self_convolution() {
        let g = grid(40);
        let op = QuadraticVolterraOperator::identity_kernel(g, 1.0).unwrap();
        let one = SampledFunction::constant(g, 1.0_f64);
        assert!((op.apply(&one, 1.0).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn forward_data_on_grid_nodes() {
        let g = grid(16);
        let map = DiscreteForwardMap::at_grid_nodes(QuadraticVolterraOperator::identity_kernel(g, 0.0).unwrap());
        let y = map.forward_data(&SampledFunction::constant(g, 1.0_f64)).unwrap();
        for (i, v) in y.iter().enumerate() {
            let t = (i + 1) as f64 / 16.0;
            assert!((v - t * t / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn positive_inputs_give_nondecreasing_data() {
        let g = grid(30);
        let map = DiscreteForwardMap::at_grid_nodes(QuadraticVolterraOperator::identity_kernel(g, 0.2).unwrap());
        let x = SampledFunction::from_fn(g, |t: f64| 1.0 + (6.0 * t).sin().abs());
        let y = map.forward_data(&x).unwrap();
        assert!(y.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn derivative_vanishes_on_zero_direction() {
        let g = grid(20);
        let op = QuadraticVolterraOperator::identity_kernel(g, 0.5).unwrap();
        let x = wiggle(g, 2.0);
        assert_eq!(op.apply_derivative(&x, &SampledFunction::zeros(g), 0.6).unwrap(), 0.0);
    }

    #[test]
    fn derivative_equals_operator_when_linear() {
        let g = grid(20);
        let op = QuadraticVolterraOperator::identity_kernel(g, 0.0).unwrap();
        let x = wiggle(g, 2.0);
        let f = wiggle(g, 5.0);
        for i in 1..=20 {
            let t = g.node(i);
            assert_eq!(op.apply_derivative(&x, &f, t).unwrap(), op.apply(&f, t).unwrap());
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let g = grid(25);
        let op = QuadraticVolterraOperator::identity_kernel(g, 0.8).unwrap();
        let x = wiggle(g, 3.0);
        let f = wiggle(g, 7.0);
        let eps = 1e-5;
        let plus = x.zip_map(&f, |a, b| a + eps * b).unwrap();
        let minus = x.zip_map(&f, |a, b| a - eps * b).unwrap();
        for i in 1..=25 {
            let t = g.node(i);
            let fd = (op.apply(&plus, t).unwrap() - op.apply(&minus, t).unwrap()) / (2.0 * eps);
            assert!((fd - op.apply_derivative(&x, &f, t).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn quadratic_taylor_remainder() {
        let g = grid(25);
        let x = wiggle(g, 3.0);
        let f = wiggle(g, 4.0);
        let xf = x.zip_map(&f, |a, b| a + b).unwrap();
        for nu in [0.0, 0.3] {
            let op = QuadraticVolterraOperator::identity_kernel(g, nu).unwrap();
            for i in 1..=25 {
                let t = g.node(i);
                let rem = op.apply(&xf, t).unwrap() - op.apply(&x, t).unwrap() - op.apply_derivative(&x, &f, t).unwrap();
                // the expansion terminates: remainder is exactly ν A₁(f)
                let expected = nu * op.apply_quadratic_part(&f, t).unwrap();
                assert!((rem - expected).abs() < 1e-13, "nu={nu} t={t}: {rem} vs {expected}");
            }
        }
    }

    #[test]
    fn volterra_causality() {
        let g = grid(20);
        let op = QuadraticVolterraOperator::identity_kernel(g, 0.4).unwrap();
        let x = wiggle(g, 2.0);
        let t = g.node::<f64>(9);
        let bumped = SampledFunction::from_fn(g, |s: f64| x.interpolate(s) + if s > t { 5.0 } else { 0.0 });
        assert_eq!(op.apply(&x, t).unwrap(), op.apply(&bumped, t).unwrap());
    }

    #[test]
    fn adjoint_of_zero_weights_is_zero() {
        let g = grid(10);
        let map = DiscreteForwardMap::at_grid_nodes(QuadraticVolterraOperator::identity_kernel(g, 0.3).unwrap());
        let a = map.adjoint(&wiggle(g, 1.0), &[0.0; 10]).unwrap();
        assert!(a.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn adjoint_of_first_unit_vector() {
        let g = grid(10);
        let map = DiscreteForwardMap::at_grid_nodes(QuadraticVolterraOperator::identity_kernel(g, 0.0).unwrap());
        let mut w = vec![0.0; 10];
        w[0] = 1.0;
        let a = map.adjoint(&SampledFunction::zeros(g), &w).unwrap();
        let t1 = 0.1;
        for (j, &v) in a.values().iter().enumerate() {
            let s = j as f64 / 10.0;
            assert!((v - (t1 - s).max(0.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn adjoint_duality_with_vanishing_kernel_at_origin() {
        // With x⁰(0) = 0 and x(0) = 0 every adjoint kernel vanishes at s = t_i,
        // so the sampled adjoint has no jumps and the trapezoid pairing is exact.
        let g = grid(30);
        let map = DiscreteForwardMap::at_grid_nodes(QuadraticVolterraOperator::identity_kernel(g, 0.6).unwrap());
        let x = SampledFunction::from_fn(g, |t: f64| t * (1.5 - t));
        for k in 0..20 {
            let f = wiggle(g, 1.0 + k as f64);
            let w: Vec<f64> = (0..30).map(|i| ((i * 7 + k * 3) % 11) as f64 - 5.0).collect();
            let lhs = map.adjoint_pairing(&x, &w, &f).unwrap();
            let adj = map.adjoint(&x, &w).unwrap();
            let rhs = adj.zip_map(&f, |a, b| a * b).unwrap().integrate(0.0, 1.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-6, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn exact_forward_matches_closed_form() {
        let g = grid(10);
        let map = DiscreteForwardMap::at_grid_nodes(QuadraticVolterraOperator::identity_kernel(g, 0.5).unwrap());
        // x(t) = t²: ∫₀ᵗ (t−s) s² ds = t⁴/12, ∫₀ᵗ (t−s)² s² ds = t⁵/30
        let y = map.forward_exact(&|t: f64| t * t, &[]);
        for (i, v) in y.iter().enumerate() {
            let t = (i + 1) as f64 / 10.0;
            assert!((v - (t.powi(4) / 12.0 + 0.5 * t.powi(5) / 30.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_forward_handles_kinks_off_grid() {
        let g = grid(25);
        let map = DiscreteForwardMap::at_grid_nodes(QuadraticVolterraOperator::identity_kernel(g, 0.0).unwrap());
        let hat = |t: f64| if t <= 0.5 { 2.0 * t } else { 2.0 - 2.0 * t };
        let y = map.forward_exact(&hat, &[0.5]);
        // ∫₀¹ (1−s) hat(s) ds = ∫ hat − ∫ s·hat = 1/2 − 1/4
        assert!((y[24] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = grid(10);
        assert!(QuadraticVolterraOperator::identity_kernel(g, -0.1).is_err());
        let op = QuadraticVolterraOperator::identity_kernel(g, 0.1).unwrap();
        assert!(op.apply(&SampledFunction::zeros(grid(11)), 0.5).is_err());
        assert!(DiscreteForwardMap::new(op.clone(), vec![0.0, 0.5]).is_err());
        assert!(DiscreteForwardMap::new(op, vec![0.5, 0.4]).is_err());
    }
}
