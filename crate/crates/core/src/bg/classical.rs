//! The classical Backus–Gilbert weights for a finite moment problem
//! `g_i = ∫ K_i(s) f(s) ds`: minimize the spread `∫ |t0 − s|² φ(s)² ds` of
//! `φ = Σ φ_i K_i` subject to `∫ φ = 1`.

use super::system::{Target, WeightVector};
use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::linalg::{dot, Lu, Matrix};
use crate::scalar::Real;

pub fn classical_bg_weights<T: Real>(kernels: &[SampledFunction<T>], t0: T) -> Result<WeightVector<T>> {
    let Some(first) = kernels.first() else {
        return Err(Error::InvalidArgument("at least one kernel is required".into()));
    };
    if !(t0 >= T::zero() && t0 <= T::one()) {
        return Err(Error::OutOfDomain(t0.to_f64_lossy()));
    }
    let grid = first.grid();
    let spread = SampledFunction::from_fn(grid, |s: T| (t0 - s) * (t0 - s));
    let n = kernels.len();
    let mut gram = Matrix::zeros(n, n);
    for i in 0..n {
        let weighted = kernels[i].zip_map(&spread, |k, w| k * w)?;
        for j in i..n {
            let v = weighted.zip_map(&kernels[j], |a, b| a * b)?.integrate(T::zero(), T::one())?;
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let k: Vec<T> = kernels.iter().map(|kern| kern.integrate(T::zero(), T::one())).collect::<Result<_>>()?;
    let mass: Vec<T> = kernels.iter().map(|kern| kern.map(|v| v.abs()).integrate(T::zero(), T::one())).collect::<Result<_>>()?;
    if !(dot(&k, &k).sqrt() > T::lit(64.0) * T::epsilon() * dot(&mass, &mass).sqrt()) {
        return Err(Error::Infeasible("every kernel integrates to zero".into()));
    }
    let z = Lu::factor(&gram)?.solve(&k)?;
    let denom = dot(&k, &z);
    if !(denom.abs() > T::zero() && denom.is_finite()) {
        return Err(Error::Infeasible("kernel integrals are orthogonal to the weight space".into()));
    }
    let coeffs: Vec<T> = z.iter().map(|&v| v / denom).collect();
    let residual = (dot(&coeffs, &k) - T::one()).abs();
    Ok(WeightVector { coeffs, target: Target::Delta(t0), residual, rank: n })
}
