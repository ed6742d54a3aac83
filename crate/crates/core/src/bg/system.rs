//! Assembly and least-squares solution of the adjoint moment system.
//!
//! Rows `0..N` are indexed by basis members `S_j`, columns by measurement
//! nodes `t_i`; entry `(j, i)` is `⟨(P_h dA(x̄))* e_i, S_j⟩`. Row `N` is the
//! constraint `⟨φ, ν (P_h A₁(x̄) − P_h dA₁(x̄) x̄)⟩ = 0` that keeps the
//! weights orthogonal to the linearization offset.

use crate::bspline::CubicBSplineBasis;
use crate::error::{Error, Result};
use crate::grid::{gauss_legendre, Function};
use crate::linalg::{dot, norm2, Lu, Matrix, Svd};
use crate::moment_op::DiscreteForwardMap;
use crate::scalar::Real;

/// Condition estimates above this flag a basis/measurement pairing whose
/// moment matrix is numerically singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// What a weight vector reconstructs.
#[derive(Debug, Clone, PartialEq)]
pub enum Target<T> {
    /// Point evaluation `δ(t0 − ·)`.
    Delta(T),
    /// An arbitrary functional given by its basis moments.
    Moments(Vec<T>),
}

/// Matrix of the moment system plus one right-hand side.
#[derive(Debug, Clone)]
pub struct AssembledSystem<T> {
    /// `(N+1) × N`; the last row is the constraint row.
    pub matrix: Matrix<T>,
    /// Length `N+1`; the last entry is zero.
    pub rhs: Vec<T>,
    /// `σ_max / σ_min` of the full matrix.
    pub condition: T,
}

impl<T: Real> AssembledSystem<T> {
    pub fn constraint_row(&self) -> &[T] {
        self.matrix.row(self.matrix.rows() - 1)
    }
}

/// Target-independent part of the moment system.
#[derive(Debug, Clone)]
pub struct MomentMatrix<T> {
    matrix: Matrix<T>,
}

impl<T: Real> MomentMatrix<T> {
    /// Builds the `(N+1) × N` matrix for linearization point `x_lin`.
    ///
    /// Entries are integrated by Gauss–Legendre per grid cell, which is exact
    /// for kernels and linearization points that are piecewise polynomial of
    /// degree ≤ 6 on the grid (sampled functions and splines both are).
    pub fn assemble(map: &DiscreteForwardMap<T>, basis: &CubicBSplineBasis, x_lin: &dyn Function<T>) -> Result<Self> {
        let op = map.operator();
        let grid = op.grid();
        if grid != basis.grid() {
            return Err(Error::GridMismatch { expected: grid.intervals(), found: basis.grid().intervals() });
        }
        let n_basis = basis.len();
        let n_meas = map.len();
        let mut matrix = Matrix::zeros(n_basis + 1, n_meas);
        for (i, &t_i) in map.nodes().iter().enumerate() {
            let kernel = op.adjoint_kernel(x_lin, t_i);
            for j in 0..n_basis {
                let mut acc = T::zero();
                for c in basis.support_cells(j) {
                    let a = grid.node::<T>(c);
                    if a >= t_i {
                        break;
                    }
                    let b = grid.node::<T>(c + 1).min(t_i);
                    acc = acc + gauss_legendre(a, b, |s| kernel(s) * basis.eval_raw(j, s));
                }
                matrix[(j, i)] = acc;
            }
            // ν (A₁x̄ − dA₁(x̄)x̄)(t_i) = −ν (A₁x̄)(t_i) for the quadratic part
            if op.nu() != T::zero() {
                let self_conv = panels(grid.intervals(), t_i)
                    .map(|(a, b)| gauss_legendre(a, b, |s| x_lin.eval((t_i - s).max(T::zero())) * x_lin.eval(s)))
                    .sum::<T>();
                matrix[(n_basis, i)] = -op.nu() * self_conv;
            }
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    /// Attaches the moments `[⟨μ, S_j⟩]` as right-hand side and checks
    /// solvability of the square block.
    pub fn with_moments(&self, mu_moments: &[T]) -> Result<AssembledSystem<T>> {
        let n_basis = self.matrix.rows() - 1;
        if mu_moments.len() != n_basis {
            return Err(Error::LengthMismatch { expected: n_basis, found: mu_moments.len() });
        }
        let mut rhs = mu_moments.to_vec();
        rhs.push(T::zero());
        let condition = check_conditioning(&self.matrix)?;
        Ok(AssembledSystem { matrix: self.matrix.clone(), rhs, condition })
    }
}

fn panels<T: Real>(n: usize, t: T) -> impl Iterator<Item = (T, T)> {
    let nf = T::from_usize_lossy(n);
    (0..n).map(move |c| (T::from_usize_lossy(c) / nf, T::from_usize_lossy(c + 1) / nf)).filter_map(
        move |(a, b)| {
            if a >= t {
                None
            } else {
                Some((a, b.min(t)))
            }
        },
    )
}

pub(crate) fn check_conditioning<T: Real>(matrix: &Matrix<T>) -> Result<T> {
    let n_basis = matrix.rows() - 1;
    if n_basis == matrix.cols() {
        let square = Matrix::from_fn(n_basis, n_basis, |r, c| matrix[(r, c)]);
        Lu::factor(&square)?;
    }
    let condition = Svd::new(matrix).condition();
    if !(condition.to_f64_lossy() <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition: condition.to_f64_lossy(), threshold: CONDITION_LIMIT });
    }
    Ok(condition)
}

/// Builds the moment system for linearization point `x_lin` and target
/// moments `mu_moments`.
pub fn assemble_adjoint_system<T: Real>(
    map: &DiscreteForwardMap<T>,
    basis: &CubicBSplineBasis,
    x_lin: &dyn Function<T>,
    mu_moments: &[T],
) -> Result<AssembledSystem<T>> {
    MomentMatrix::assemble(map, basis, x_lin)?.with_moments(mu_moments)
}

/// Data weights `φ` of a reconstruction functional `f ≈ ⟨φ, y⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    pub coeffs: Vec<T>,
    pub target: Target<T>,
    /// Euclidean residual of all `N+1` rows.
    pub residual: T,
    /// Numerical rank of the system matrix.
    pub rank: usize,
}

impl<T: Real> WeightVector<T> {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `⟨φ, y⟩`.
    pub fn apply(&self, y: &[T]) -> Result<T> {
        reconstruct_value(self, y)
    }
}

/// Factored system matrix, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct LeastSquaresSolver<T> {
    matrix: Matrix<T>,
    svd: Svd<T>,
    tol: T,
}

impl<T: Real> LeastSquaresSolver<T> {
    pub fn new(matrix: &Matrix<T>) -> Self {
        let svd = Svd::new(matrix);
        let tol = svd.default_tolerance();
        Self { matrix: matrix.clone(), svd, tol }
    }

    pub fn rank(&self) -> usize {
        self.svd.rank(self.tol)
    }

    pub fn condition(&self) -> T {
        self.svd.condition()
    }

    /// Minimum-norm least-squares weights for one right-hand side.
    pub fn solve(&self, rhs: &[T], target: Target<T>) -> Result<WeightVector<T>> {
        let coeffs = self.svd.solve(rhs, self.tol)?;
        let r: Vec<T> = self.matrix.mul_vec(&coeffs)?.iter().zip(rhs).map(|(&a, &b)| a - b).collect();
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("weight vector".into()));
        }
        Ok(WeightVector { coeffs, target, residual: norm2(&r), rank: self.rank() })
    }
}

/// Least-squares solution of all `N+1` equations; minimum-norm when rank
/// deficient (the rank is recorded on the result).
pub fn solve_weights<T: Real>(sys: &AssembledSystem<T>) -> Result<WeightVector<T>> {
    let n_basis = sys.matrix.rows() - 1;
    let target = Target::Moments(sys.rhs[..n_basis].to_vec());
    LeastSquaresSolver::new(&sys.matrix).solve(&sys.rhs, target)
}

/// `f_{ε,φ} = ⟨φ, y⟩`.
pub fn reconstruct_value<T: Real>(phi: &WeightVector<T>, y: &[T]) -> Result<T> {
    if phi.coeffs.len() != y.len() {
        return Err(Error::LengthMismatch { expected: phi.coeffs.len(), found: y.len() });
    }
    Ok(dot(&phi.coeffs, y))
}
