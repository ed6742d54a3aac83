//! Hadamard's example on the unit square: Cauchy data
//! `u(x, 0) = 0`, `u_y(x, 0) = φ_k(x)` that vanish uniformly as `k → ∞`,
//! with solutions `u_k` that blow up.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Above this frequency `sinh(πk)` is assembled from logarithms.
pub const LOG_SCALE_FROM: u32 = 20;

fn pik<T: Real>(k: u32) -> T {
    T::PI() * T::from_usize_lossy(k as usize)
}

/// `φ_k(x) = sin(πkx) / (πk)`.
pub fn phi_k<T: Real>(k: u32, x: T) -> T {
    let w = pik::<T>(k);
    (w * x).sin() / w
}

/// `u_k(x, y) = sinh(πky) sin(πkx) / (πk)²`, harmonic with `u_k(x, 0) = 0`
/// and `∂_y u_k(x, 0) = φ_k(x)`.
pub fn u_k<T: Real>(k: u32, x: T, y: T) -> T {
    let w = pik::<T>(k);
    sinh_scaled(w * y, w * w) * (w * x).sin()
}

/// `∂_y u_k(x, y) = cosh(πky) sin(πkx) / (πk)`.
pub fn u_k_dy<T: Real>(k: u32, x: T, y: T) -> T {
    let w = pik::<T>(k);
    (w * y).cosh() * (w * x).sin() / w
}

/// `sinh(z) / d`, through `ln sinh z = z − ln 2 + ln(1 − e^{−2z})` once `z` is
/// large enough that `sinh z` alone might overflow.
fn sinh_scaled<T: Real>(z: T, d: T) -> T {
    if z <= T::lit(LOG_SCALE_FROM as f64) * T::PI() {
        return z.sinh() / d;
    }
    (z - T::LN_2() + (-(-z - z).exp()).ln_1p() - d.ln()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationRow<T> {
    pub k: u32,
    /// `‖φ_k‖_∞ = 1/(πk)`.
    pub data_norm: T,
    /// `sup |u_k| = sinh(πk)/(πk)²`, attained on `y = 1`.
    pub solution_sup: T,
    /// `sinh(πk)/(πk)`.
    pub ratio: T,
}

/// Rows `k = 1..=k_max`.
pub fn amplification_table<T: Real>(k_max: u32) -> Result<Vec<AmplificationRow<T>>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    Ok((1..=k_max)
        .map(|k| {
            let w = pik::<T>(k);
            AmplificationRow { k, data_norm: w.recip(), solution_sup: sinh_scaled(w, w * w), ratio: sinh_scaled(w, w) }
        })
        .collect())
}

/// `k,data_norm,solution_sup,ratio`.
pub fn table_csv<T: Real>(rows: &[AmplificationRow<T>]) -> String {
    let mut out = String::from("k,data_norm,solution_sup,ratio\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.12e},{:.12e},{:.12e}", r.k, r.data_norm, r.solution_sup, r.ratio);
    }
    out
}
