//! A-posteriori error budget of a reconstruction `f_{ε,φ,h} = ⟨φ, y_ε⟩`
//! against ground truth `f = ⟨μ, x*⟩`.
//!
//! The four terms split `f_{ε,φ,h} − f` exactly:
//!
//! ```text
//! ⟨φ, y_ε − y⟩ + ⟨φ, νA₁(x*−x̄)⟩ − ⟨φ, νA₁(x̄)⟩ + (⟨φ, dA(x̄)x*⟩ − ⟨μ, x*⟩)
//! ```
//!
//! where `y = P_h A x*`. All operator data use the same Gauss–Legendre panels,
//! so the split holds up to rounding when `y` comes from
//! [`DiscreteForwardMap::forward_exact`].

use std::fmt::Write as _;

use super::system::WeightVector;
use crate::bspline::CubicBSplineBasis;
use crate::error::{Error, Result};
use crate::grid::{gauss_legendre, Function};
use crate::linalg::{dot, solve_dense};
use crate::moment_op::DiscreteForwardMap;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget<T> {
    /// `|⟨φ, y − y_ε⟩|`.
    pub noise: T,
    /// `|⟨φ, Ax* − Ax̄ − dA(x̄)(x* − x̄)⟩|`.
    pub linearization: T,
    /// `|⟨φ, Ax̄ − dA(x̄)x̄⟩|`.
    pub constraint: T,
    /// `|⟨dA(x̄)*φ − μ, x*⟩|`.
    pub adjoint_defect: T,
    /// Euclidean residual of the weight system, standing in for `dist(μ, A*Y_h)`.
    pub dist_mu: T,
    /// L² distance from `x*` to the spline space.
    pub dist_x: T,
    /// Norm of the projector onto the data space (orthogonal, hence 1).
    pub projector_norm: T,
    /// `|f − f_{ε,φ,h}|`.
    pub actual_error: T,
}

impl<T: Real> ErrorBudget<T> {
    /// Sum of the four terms; an upper bound for [`Self::actual_error`].
    pub fn sum(&self) -> T {
        self.noise + self.linearization + self.constraint + self.adjoint_defect
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("noise", self.noise),
            ("linearization", self.linearization),
            ("constraint", self.constraint),
            ("adjoint_defect", self.adjoint_defect),
            ("sum", self.sum()),
            ("actual_error", self.actual_error),
            ("dist_mu", self.dist_mu),
            ("dist_x", self.dist_x),
            ("projector_norm", self.projector_norm),
        ] {
            let _ = writeln!(s, "{k}={v:.12e}");
        }
        s
    }
}

/// Inputs of [`error_budget`] besides the operator and basis.
pub struct BudgetInput<'a, T> {
    pub x_star: &'a dyn Function<T>,
    pub x_lin: &'a dyn Function<T>,
    pub phi: &'a WeightVector<T>,
    /// `⟨μ, x*⟩`.
    pub truth: T,
    /// Clean data `P_h A x*`.
    pub y: &'a [T],
    /// Noisy data.
    pub y_eps: &'a [T],
}

pub fn error_budget<T: Real>(
    map: &DiscreteForwardMap<T>,
    basis: &CubicBSplineBasis,
    input: &BudgetInput<'_, T>,
) -> Result<ErrorBudget<T>> {
    let n = map.len();
    for len in [input.phi.coeffs.len(), input.y.len(), input.y_eps.len()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, found: len });
        }
    }
    let phi = &input.phi.coeffs;
    let nu = map.operator().nu();
    let diff: Vec<T> = input.y.iter().zip(input.y_eps).map(|(&a, &b)| a - b).collect();
    let noise = dot(phi, &diff).abs();
    let (linearization, constraint) = if nu == T::zero() {
        (T::zero(), T::zero())
    } else {
        let delta = |t: T| input.x_star.eval(t) - input.x_lin.eval(t);
        let rem = map.quadratic_exact(&delta, &[]);
        let off = map.quadratic_exact(input.x_lin, &[]);
        ((nu * dot(phi, &rem)).abs(), (nu * dot(phi, &off)).abs())
    };
    let d = map.derivative_exact(input.x_lin, input.x_star, &[]);
    let adjoint_defect = (dot(phi, &d) - input.truth).abs();
    let actual_error = (dot(phi, input.y_eps) - input.truth).abs();
    Ok(ErrorBudget {
        noise,
        linearization,
        constraint,
        adjoint_defect,
        dist_mu: input.phi.residual,
        dist_x: spline_distance(basis, input.x_star)?,
        projector_norm: T::one(),
        actual_error,
    })
}

/// L² distance from `f` to the span of `basis`, via the Gram system.
pub fn spline_distance<T: Real>(basis: &CubicBSplineBasis, f: &(impl Function<T> + ?Sized)) -> Result<T> {
    let g = basis.grid();
    let b: Vec<T> = (0..basis.len()).map(|j| basis.moment(j, f)).collect();
    let c = solve_dense(&basis.gram(), &b)?;
    let norm_sq: T = (0..g.intervals())
        .map(|k| gauss_legendre(g.node(k), g.node(k + 1), |s| f.eval(s) * f.eval(s)))
        .sum();
    Ok((norm_sq - dot(&b, &c)).max(T::zero()).sqrt())
}
