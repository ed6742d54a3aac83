//! Extended Backus–Gilbert weights: minimize `‖𝓑φ‖²` subject to
//! `⟨dA*(x⁰)φ, 1⟩ = 1`, where `𝓑² = B G_h` is supplied as a matrix.

use super::system::{Target, WeightVector};
use crate::error::{Error, Result};
use crate::grid::gauss_legendre;
use crate::linalg::{dot, norm2, symmetric_eigen, Matrix, Svd};
use crate::moment_op::DiscreteForwardMap;
use crate::grid::Function;
use crate::scalar::Real;

/// Symmetric positive semidefinite part of `m`: symmetrize, then clamp
/// negative eigenvalues to zero.
pub fn psd_part<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let n = m.rows();
    let sym = Matrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)]) * T::half());
    let (lam, v) = symmetric_eigen(&sym)?;
    Ok(Matrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| v[(i, k)] * lam[k].max(T::zero()) * v[(j, k)]).sum()
    }))
}

/// `φ = argmin φᵀQφ` s.t. `a·φ = 1`, with `Q` the PSD part of `bgh`.
/// The KKT system is solved in the minimum-norm sense, so a degenerate `Q`
/// yields the minimum-norm feasible point.
pub fn extended_bg_weights<T: Real>(bgh: &Matrix<T>, a_row: &[T]) -> Result<WeightVector<T>> {
    let n = a_row.len();
    if bgh.rows() != n || bgh.cols() != n {
        return Err(Error::LengthMismatch { expected: n, found: bgh.rows() });
    }
    if norm2(a_row) == T::zero() {
        return Err(Error::Infeasible("constraint row is zero".into()));
    }
    let q = psd_part(bgh)?;
    let kkt = Matrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
        (true, true) => q[(i, j)],
        (true, false) => a_row[i],
        (false, true) => a_row[j],
        (false, false) => T::zero(),
    });
    let mut rhs = vec![T::zero(); n + 1];
    rhs[n] = T::one();
    let svd = Svd::new(&kkt);
    let sol = svd.solve(&rhs, svd.default_tolerance())?;
    let coeffs = sol[..n].to_vec();
    let residual = (dot(a_row, &coeffs) - T::one()).abs();
    Ok(WeightVector { coeffs, target: Target::Moments(Vec::new()), residual, rank: svd.rank(svd.default_tolerance()) })
}

/// Objective `φᵀ Q φ` with `Q` the PSD part of `bgh`.
pub fn extended_objective<T: Real>(bgh: &Matrix<T>, phi: &[T]) -> Result<T> {
    let q = psd_part(bgh)?;
    Ok(dot(phi, &q.mul_vec(phi)?))
}

/// Inputs of [`extended_bg_weights`] for the choice `B = dA(x̄)`:
/// `BG_h = [⟨dA*e_i, dA*e_j⟩]` and `a_i = ⟨dA*e_i, 1⟩`.
pub fn adjoint_gram<T: Real>(map: &DiscreteForwardMap<T>, x_lin: &dyn Function<T>) -> (Matrix<T>, Vec<T>) {
    let op = map.operator();
    let grid = op.grid();
    let n = map.len();
    let kernels: Vec<_> = map.nodes().iter().map(|&t| op.adjoint_kernel(x_lin, t)).collect();
    let cells: Vec<(T, T)> = (0..grid.intervals()).map(|c| (grid.node::<T>(c), grid.node::<T>(c + 1))).collect();
    let mut gram = Matrix::zeros(n, n);
    for i in 0..n {
        let t_i = map.nodes()[i];
        for j in i..n {
            let v: T = cells
                .iter()
                .take_while(|(a, _)| *a < t_i)
                .map(|&(a, b)| gauss_legendre(a, b.min(t_i), |s| kernels[i](s) * kernels[j](s)))
                .sum();
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let a_row = map
        .nodes()
        .iter()
        .zip(&kernels)
        .map(|(&t_i, k)| {
            cells.iter().take_while(|(a, _)| *a < t_i).map(|&(a, b)| gauss_legendre(a, b.min(t_i), &k)).sum()
        })
        .collect();
    (gram, a_row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;
    use crate::linalg::solve_dense;
    use crate::moment_op::QuadraticVolterraOperator;

    #[test]
    fn identity_objective_gives_projection() {
        let a = [1.0, -2.0, 0.5];
        let w = extended_bg_weights(&Matrix::identity(3), &a).unwrap();
        let nn: f64 = a.iter().map(|v| v * v).sum();
        for (p, q) in w.coeffs.iter().zip(&a) {
            assert!((p - q / nn).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_objective_gives_minimum_norm_feasible_point() {
        let a = [3.0_f64, 4.0];
        let w = extended_bg_weights(&Matrix::<f64>::zeros(2, 2), &a).unwrap();
        assert!((w.coeffs[0] - 3.0 / 25.0).abs() < 1e-14);
        assert!((w.coeffs[1] - 4.0 / 25.0).abs() < 1e-14);
        assert!(extended_objective(&Matrix::<f64>::zeros(2, 2), &w.coeffs).unwrap().abs() < 1e-15);
    }

    #[test]
    fn zero_constraint_is_infeasible() {
        assert!(matches!(extended_bg_weights(&Matrix::<f64>::identity(2), &[0.0, 0.0]), Err(Error::Infeasible(_))));
    }

    #[test]
    fn spd_case_matches_closed_form_kkt() {
        let b = Matrix::from_rows(&[
            vec![2.0, 0.3, -0.1, 0.0],
            vec![0.1, 1.5, 0.2, 0.4],
            vec![-0.3, 0.2, 1.0, 0.1],
            vec![0.0, 0.5, 0.1, 3.0],
        ])
        .unwrap();
        let q = b.transpose().mul(&b).unwrap();
        let a = [0.5, 1.0, -0.25, 2.0];
        let w = extended_bg_weights(&q, &a).unwrap();
        // oracle: φ = Q⁻¹a / (aᵀQ⁻¹a)
        let z = solve_dense(&q, &a).unwrap();
        let d: f64 = a.iter().zip(&z).map(|(x, y)| x * y).sum();
        for (p, zi) in w.coeffs.iter().zip(&z) {
            assert!((p - zi / d).abs() < 1e-8);
        }
        assert!(w.residual < 1e-12);
    }

    #[test]
    fn indefinite_input_is_clamped() {
        let m = Matrix::<f64>::from_rows(&[vec![1.0, 0.0], vec![0.0, -4.0]]).unwrap();
        let q = psd_part(&m).unwrap();
        assert!((q[(0, 0)] - 1.0).abs() < 1e-14 && q[(1, 1)].abs() < 1e-14);
    }

    #[test]
    fn adjoint_gram_is_symmetric_psd() {
        let g = UniformGrid::new(10).unwrap();
        let op = QuadraticVolterraOperator::<f64>::identity_kernel(g, 0.1).unwrap();
        let map = DiscreteForwardMap::at_grid_nodes(op);
        let (gram, a) = adjoint_gram(&map, map.operator().kernel());
        let (lam, _) = symmetric_eigen(&gram).unwrap();
        assert!(lam.iter().all(|&l| l > -1e-14));
        // ∫₀^{t_i} (1 + 2ν)(t_i − s) ds = (1 + 2ν) t_i² / 2
        for (i, &t) in map.nodes().iter().enumerate() {
            assert!((a[i] - 1.2 * t * t / 2.0).abs() < 1e-14);
        }
        let w = extended_bg_weights(&gram, &a).unwrap();
        assert!(w.residual < 1e-10);
    }
}
