//! Polar grid on the annulus `1/2 ≤ r ≤ 1` and boundary traces.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const INNER_RADIUS: f64 = 0.5;
pub const OUTER_RADIUS: f64 = 1.0;

/// Nodes `(r_k, θ_m)` with `r_k = 1/2 + k Δr`, `k = 0..n_r`, and
/// `θ_m = −π/2 + m Δθ`, `m = 0..n_θ`, so node `m = 0` on the outer circle is
/// `P₁ = (0, −1)` and node `m = n_θ/2` is `P₂ = (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnnulusGrid {
    n_r: usize,
    n_theta: usize,
}

/// Boundary pieces: the right (`x ≥ 0`) and left (`x ≤ 0`) halves of the
/// outer circle and the inner circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Segment {
    Right,
    Left,
    Inner,
}

impl Segment {
    pub fn name(self) -> &'static str {
        match self {
            Segment::Right => "right",
            Segment::Left => "left",
            Segment::Inner => "inner",
        }
    }
}

impl AnnulusGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 3 {
            return Err(Error::InvalidArgument(format!("need at least 3 radial nodes, got {n_r}")));
        }
        if n_theta < 8 || n_theta % 2 != 0 {
            return Err(Error::InvalidArgument(format!("angular count must be even and >= 8, got {n_theta}")));
        }
        Ok(Self { n_r, n_theta })
    }

    #[inline]
    pub fn n_r(&self) -> usize {
        self.n_r
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Grid with both counts of intervals doubled.
    pub fn refined(&self) -> Self {
        Self { n_r: 2 * self.n_r - 1, n_theta: 2 * self.n_theta }
    }

    pub fn dr<T: Real>(&self) -> T {
        T::lit(OUTER_RADIUS - INNER_RADIUS) / T::from_usize_lossy(self.n_r - 1)
    }

    pub fn dtheta<T: Real>(&self) -> T {
        T::TAU() / T::from_usize_lossy(self.n_theta)
    }

    pub fn radius<T: Real>(&self, k: usize) -> T {
        T::lit(INNER_RADIUS) + T::from_usize_lossy(k) * self.dr()
    }

    pub fn angle<T: Real>(&self, m: usize) -> T {
        -T::FRAC_PI_2() + T::from_usize_lossy(m) * self.dtheta()
    }

    /// Number of nodes on each outer half, contact points included.
    #[inline]
    pub fn half_len(&self) -> usize {
        self.n_theta / 2 + 1
    }

    pub fn segment_len(&self, s: Segment) -> usize {
        match s {
            Segment::Right | Segment::Left => self.half_len(),
            Segment::Inner => self.n_theta,
        }
    }

    /// Angular index of trace node `q` on segment `s`. Outer halves are
    /// parameterized by `t = q Δθ ∈ [0, π]` measured from `P₁`.
    pub fn angular_index(&self, s: Segment, q: usize) -> usize {
        match s {
            Segment::Right | Segment::Inner => q,
            Segment::Left => (self.n_theta - q) % self.n_theta,
        }
    }

    /// Arc parameter of trace node `q`: `t ∈ [0, π]` on outer halves,
    /// `θ + π/2 ∈ [0, 2π)` on the inner circle.
    pub fn arc_param<T: Real>(&self, q: usize) -> T {
        T::from_usize_lossy(q) * self.dtheta()
    }

    /// Trapezoid weights (arc length) for traces on `s`.
    pub fn quadrature_weights<T: Real>(&self, s: Segment) -> Vec<T> {
        let h: T = self.dtheta();
        match s {
            Segment::Inner => vec![h * T::lit(INNER_RADIUS); self.n_theta],
            _ => {
                let mut w = vec![h * T::lit(OUTER_RADIUS); self.half_len()];
                w[0] = w[0] * T::half();
                let last = w.len() - 1;
                w[last] = w[last] * T::half();
                w
            }
        }
    }
}

/// Values at the nodes of one boundary segment.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace<T> {
    grid: AnnulusGrid,
    segment: Segment,
    values: Vec<T>,
}

impl<T: Real> BoundaryTrace<T> {
    pub fn new(grid: AnnulusGrid, segment: Segment, values: Vec<T>) -> Result<Self> {
        let n = grid.segment_len(segment);
        if values.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{} trace", segment.name())));
        }
        Ok(Self { grid, segment, values })
    }

    /// Samples `f` at the arc parameter of every node.
    pub fn from_fn(grid: AnnulusGrid, segment: Segment, f: impl Fn(T) -> T) -> Self {
        let values = (0..grid.segment_len(segment)).map(|q| f(grid.arc_param(q))).collect();
        Self { grid, segment, values }
    }

    pub fn constant(grid: AnnulusGrid, segment: Segment, c: T) -> Self {
        Self { grid, segment, values: vec![c; grid.segment_len(segment)] }
    }

    pub fn zeros(grid: AnnulusGrid, segment: Segment) -> Self {
        Self::constant(grid, segment, T::zero())
    }

    pub fn grid(&self) -> AnnulusGrid {
        self.grid
    }

    pub fn segment(&self) -> Segment {
        self.segment
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.segment != other.segment {
            return Err(Error::InvalidArgument(format!(
                "traces live on different segments or grids ({} vs {})",
                self.segment.name(),
                other.segment.name()
            )));
        }
        Ok(())
    }

    /// `αself + βother`.
    pub fn combine(&self, alpha: T, other: &Self, beta: T) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| alpha * a + beta * b).collect();
        Ok(Self { grid: self.grid, segment: self.segment, values })
    }

    pub fn scale(&self, alpha: T) -> Self {
        Self { grid: self.grid, segment: self.segment, values: self.values.iter().map(|&v| alpha * v).collect() }
    }

    /// `∫ self · other dΓ` by the trapezoid rule over arc length.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_compatible(other)?;
        let w = self.grid.quadrature_weights::<T>(self.segment);
        Ok(self.values.iter().zip(&other.values).zip(&w).map(|((&a, &b), &c)| a * b * c).sum())
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `node,t,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,t,value\n");
        for (q, v) in self.values.iter().enumerate() {
            let t: T = self.grid.arc_param(q);
            let _ = writeln!(out, "{q},{t:.12e},{v:.12e}");
        }
        out
    }
}
