//! Point-value profiles and iterative re-linearization.

use std::fmt::Write as _;

use super::system::{check_conditioning, LeastSquaresSolver, MomentMatrix, Target, WeightVector};
use crate::bspline::CubicBSplineBasis;
use crate::error::{Error, Result};
use crate::grid::{Function, SampledFunction};
use crate::linalg::{dot, norm_inf};
use crate::moment_op::DiscreteForwardMap;
use crate::scalar::Real;

/// Reconstructed values at a list of target points.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T> {
    pub targets: Vec<T>,
    pub values: Vec<T>,
    /// Ground truth at the targets, when known.
    pub truth: Option<Vec<T>>,
}

impl<T: Real> Profile<T> {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn with_truth(mut self, f: &(impl Function<T> + ?Sized)) -> Self {
        self.truth = Some(self.targets.iter().map(|&t| f.eval(t)).collect());
        self
    }

    /// `max |value − truth|` over targets strictly inside `(a, b)`; `None`
    /// without truth or when no target falls in the window.
    pub fn sup_error_in(&self, a: T, b: T) -> Option<T> {
        let truth = self.truth.as_ref()?;
        self.targets
            .iter()
            .zip(&self.values)
            .zip(truth)
            .filter(|((&t, _), _)| t > a && t < b)
            .map(|((_, &v), &u)| (v - u).abs())
            .fold(None, |m: Option<T>, e| Some(m.map_or(e, |m| m.max(e))))
    }

    /// Sup-norm distance between the values of two profiles on the same targets.
    pub fn distance(&self, other: &Self) -> Result<T> {
        if self.values.len() != other.values.len() {
            return Err(Error::LengthMismatch { expected: self.values.len(), found: other.values.len() });
        }
        Ok(self.values.iter().zip(&other.values).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }

    /// `t,reconstructed,truth`; the truth column is left empty when unknown.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,reconstructed,truth\n");
        for (k, (t, v)) in self.targets.iter().zip(&self.values).enumerate() {
            let _ = match &self.truth {
                Some(u) => writeln!(out, "{t:.12e},{v:.12e},{:.12e}", u[k]),
                None => writeln!(out, "{t:.12e},{v:.12e},"),
            };
        }
        out
    }
}

/// The moment system for one linearization point, factored once and reused
/// for every δ target.
#[derive(Debug, Clone)]
pub struct ProfileSolver<T> {
    basis: CubicBSplineBasis,
    solver: LeastSquaresSolver<T>,
    condition: T,
}

impl<T: Real> ProfileSolver<T> {
    pub fn new(map: &DiscreteForwardMap<T>, basis: &CubicBSplineBasis, x_lin: &dyn Function<T>) -> Result<Self> {
        let m = MomentMatrix::assemble(map, basis, x_lin)?;
        let condition = check_conditioning(m.matrix())?;
        Ok(Self { basis: *basis, solver: LeastSquaresSolver::new(m.matrix()), condition })
    }

    pub fn condition(&self) -> T {
        self.condition
    }

    /// Weights reconstructing `x(t0)`.
    pub fn weights(&self, t0: T) -> Result<WeightVector<T>> {
        let mut rhs = self.basis.delta_moments(t0)?;
        rhs.push(T::zero());
        self.solver.solve(&rhs, Target::Delta(t0))
    }

    pub fn reconstruct(&self, y: &[T], targets: &[T]) -> Result<Profile<T>> {
        let mut values = Vec::with_capacity(targets.len());
        for &t0 in targets {
            values.push(self.weights(t0)?.apply(y)?);
        }
        Ok(Profile { targets: targets.to_vec(), values, truth: None })
    }
}

/// Reconstructs `x(t0)` for every `t0` in `targets` from data `y`,
/// linearizing at `x_lin`.
pub fn reconstruct_profile<T: Real>(
    map: &DiscreteForwardMap<T>,
    basis: &CubicBSplineBasis,
    x_lin: &dyn Function<T>,
    y: &[T],
    targets: &[T],
) -> Result<Profile<T>> {
    if y.len() != map.len() {
        return Err(Error::LengthMismatch { expected: map.len(), found: y.len() });
    }
    if targets.is_empty() {
        return Ok(Profile { targets: Vec::new(), values: Vec::new(), truth: None });
    }
    ProfileSolver::new(map, basis, x_lin)?.reconstruct(y, targets)
}

/// Early-exit threshold on the sup-norm change between rounds.
pub const REFINEMENT_TOL: f64 = 1e-8;
/// Growth factor of the profile sup norm treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e3;

/// Repeats the reconstruction with the linearization point replaced by the
/// spline interpolant of the previous round's values at the grid nodes.
/// Returns one profile per completed round.
pub fn iterative_refinement<T: Real>(
    map: &DiscreteForwardMap<T>,
    basis: &CubicBSplineBasis,
    x_init: &dyn Function<T>,
    y: &[T],
    targets: &[T],
    rounds: usize,
) -> Result<Vec<Profile<T>>> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("at least one refinement round is required".into()));
    }
    if y.len() != map.len() {
        return Err(Error::LengthMismatch { expected: map.len(), found: y.len() });
    }
    let grid = basis.grid();
    let nodes: Vec<T> = grid.nodes();
    let mut profiles: Vec<Profile<T>> = Vec::with_capacity(rounds);
    let mut x_lin: Option<crate::bspline::SplineFunction<T>> = None;
    let mut base_norm = T::zero();
    for round in 0..rounds {
        let solver = match &x_lin {
            None => ProfileSolver::new(map, basis, x_init)?,
            Some(s) => ProfileSolver::new(map, basis, s)?,
        };
        let profile = solver.reconstruct(y, targets)?;
        let norm = norm_inf(&profile.values);
        if round == 0 {
            base_norm = norm;
        } else if norm > T::lit(DIVERGENCE_FACTOR) * base_norm.max(T::epsilon()) {
            return Err(Error::Diverged { iterations: round + 1, norm: norm.to_f64_lossy() });
        }
        let converged = match profiles.last() {
            Some(prev) => profile.distance(prev)? < T::lit(REFINEMENT_TOL),
            None => false,
        };
        profiles.push(profile);
        if converged || round + 1 == rounds {
            break;
        }
        let at_nodes = solver.reconstruct(y, &nodes)?;
        let samples = SampledFunction::new(grid, at_nodes.values)?;
        x_lin = Some(basis.combination(basis.interpolate(&samples)?)?);
    }
    Ok(profiles)
}

/// `⟨φ, y⟩` for each weight vector; a convenience for reusing cached weights.
pub fn apply_all<T: Real>(weights: &[WeightVector<T>], y: &[T]) -> Result<Vec<T>> {
    weights
        .iter()
        .map(|w| {
            if w.coeffs.len() != y.len() {
                return Err(Error::LengthMismatch { expected: w.coeffs.len(), found: y.len() });
            }
            Ok(dot(&w.coeffs, y))
        })
        .collect()
}
