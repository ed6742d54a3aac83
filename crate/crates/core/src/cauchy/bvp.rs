//! Mixed Dirichlet/Neumann problems for the Laplacian on the annulus by
//! second-order finite differences in polar coordinates.
//!
//! The five-point polar Laplacian is written in conservative form (flux
//! balance over a control volume per node, half volumes on the boundary
//! rings), which keeps the discrete operator symmetric. Neumann data are
//! outward normal derivatives: `∂/∂r` on the outer circle and `−∂/∂r` on
//! the inner one.
//! The two outer halves share the contact nodes `P₁`, `P₂`; there a
//! Dirichlet condition on either side wins, and two Neumann conditions are
//! averaged.

use std::fmt::Write as _;

use super::mesh::{AnnulusGrid, BoundaryTrace, Segment};
use crate::error::{Error, Result};
use crate::linalg::{BandMatrix, BandedLu};
use crate::scalar::Real;

/// Type of a boundary condition, without data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

/// A boundary condition with its data.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition<T> {
    Dirichlet(BoundaryTrace<T>),
    Neumann(BoundaryTrace<T>),
}

impl<T: Real> Condition<T> {
    pub fn kind(&self) -> BcKind {
        match self {
            Condition::Dirichlet(_) => BcKind::Dirichlet,
            Condition::Neumann(_) => BcKind::Neumann,
        }
    }

    pub fn trace(&self) -> &BoundaryTrace<T> {
        match self {
            Condition::Dirichlet(t) | Condition::Neumann(t) => t,
        }
    }
}

/// Condition types on `(Γ_r, Γ_l, Γ_i)`; determines the system matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BcPattern {
    pub right: BcKind,
    pub left: BcKind,
    pub inner: BcKind,
}

/// One condition per boundary segment.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedBvpSpec<T> {
    pub right: Condition<T>,
    pub left: Condition<T>,
    pub inner: Condition<T>,
}

impl<T: Real> MixedBvpSpec<T> {
    pub fn pattern(&self) -> BcPattern {
        BcPattern { right: self.right.kind(), left: self.left.kind(), inner: self.inner.kind() }
    }

    fn validate(&self, grid: AnnulusGrid) -> Result<()> {
        for (cond, seg) in [(&self.right, Segment::Right), (&self.left, Segment::Left), (&self.inner, Segment::Inner)] {
            let t = cond.trace();
            if t.segment() != seg || t.grid() != grid {
                return Err(Error::InvalidArgument(format!("{} condition carries a mismatched trace", seg.name())));
            }
        }
        Ok(())
    }
}

/// Discrete solution on all grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: AnnulusGrid,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn grid(&self) -> AnnulusGrid {
        self.grid
    }

    /// Value at radial index `k`, angular index `m`.
    #[inline]
    pub fn at(&self, k: usize, m: usize) -> T {
        self.values[m * self.grid.n_r() + k]
    }

    pub fn trace(&self, s: Segment) -> BoundaryTrace<T> {
        let g = self.grid;
        let k = if s == Segment::Inner { 0 } else { g.n_r() - 1 };
        let values = (0..g.segment_len(s)).map(|q| self.at(k, g.angular_index(s, q))).collect();
        BoundaryTrace::new(g, s, values).expect("field values are finite")
    }

    /// Outward normal derivative by the three-point one-sided difference.
    pub fn normal_derivative(&self, s: Segment) -> BoundaryTrace<T> {
        let g = self.grid;
        let dr: T = g.dr();
        let (three, four) = (T::lit(3.0), T::lit(4.0));
        let values = (0..g.segment_len(s))
            .map(|q| {
                let m = g.angular_index(s, q);
                if s == Segment::Inner {
                    -(-three * self.at(0, m) + four * self.at(1, m) - self.at(2, m)) / (T::two() * dr)
                } else {
                    let k = g.n_r() - 1;
                    (three * self.at(k, m) - four * self.at(k - 1, m) + self.at(k - 2, m)) / (T::two() * dr)
                }
            })
            .collect();
        BoundaryTrace::new(g, s, values).expect("field values are finite")
    }

    /// Outward flux consistent with the boundary rows of the scheme: the
    /// datum `g` for which imposing `u_ν = g` at a node reproduces this field.
    /// Feeding these values back as Neumann data returns the same discrete
    /// solution, which [`Self::normal_derivative`] does not guarantee.
    pub fn discrete_flux(&self, s: Segment) -> BoundaryTrace<T> {
        let g = self.grid;
        let n_t = g.n_theta();
        let k = if s == Segment::Inner { 0 } else { g.n_r() - 1 };
        let c = MixedBvpSolver::<T>::balance(g, k);
        let values = (0..g.segment_len(s))
            .map(|q| {
                let m = g.angular_index(s, q);
                let u = self.at(k, m);
                let mut e = c.c_ang * (self.at(k, (m + n_t - 1) % n_t) + self.at(k, (m + 1) % n_t) - T::two() * u);
                if k > 0 {
                    e = e + c.c_in * (self.at(k - 1, m) - u);
                }
                if k + 1 < g.n_r() {
                    e = e + c.c_out * (self.at(k + 1, m) - u);
                }
                -e / c.w
            })
            .collect();
        BoundaryTrace::new(g, s, values).expect("field values are finite")
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (T, T) {
        self.values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Largest deviation from `f(r, θ)` over all nodes.
    pub fn sup_error(&self, f: impl Fn(T, T) -> T) -> T {
        let g = self.grid;
        let mut e = T::zero();
        for m in 0..g.n_theta() {
            for k in 0..g.n_r() {
                e = e.max((self.at(k, m) - f(g.radius(k), g.angle(m))).abs());
            }
        }
        e
    }

    /// `r,theta,value`, angle-major.
    pub fn to_csv(&self) -> String {
        let g = self.grid;
        let mut out = String::from("r,theta,value\n");
        for m in 0..g.n_theta() {
            let th: T = g.angle(m);
            for k in 0..g.n_r() {
                let r: T = g.radius(k);
                let _ = writeln!(out, "{r:.12e},{th:.12e},{:.12e}", self.at(k, m));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Balance<T> {
    c_in: T,
    c_out: T,
    c_ang: T,
    w: T,
}

impl<T: Real> Balance<T> {
    fn diag(&self) -> T {
        self.c_in + self.c_out + T::two() * self.c_ang
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum NodeRule<T> {
    Interior,
    Dirichlet(T),
    /// Boundary node with outward normal derivative `g`.
    Neumann(T),
}

/// Factored system for one [`BcPattern`]; solves any data with that pattern.
#[derive(Debug, Clone)]
pub struct MixedBvpSolver<T> {
    grid: AnnulusGrid,
    pattern: BcPattern,
    lu: BandedLu<T>,
    /// Equation/unknown index of angular column `m` is `pos[m] * n_r + k`.
    pos: Vec<usize>,
    norm: T,
}

/// Relative residual accepted from the direct solve.
pub const SOLVE_TOL: f64 = 1e-10;

impl<T: Real> MixedBvpSolver<T> {
    pub fn new(grid: AnnulusGrid, pattern: BcPattern) -> Result<Self> {
        if pattern.right != BcKind::Dirichlet && pattern.left != BcKind::Dirichlet && pattern.inner != BcKind::Dirichlet {
            return Err(Error::NoDirichletSegment);
        }
        let (n_r, n_t) = (grid.n_r(), grid.n_theta());
        // Interleaving 0, n−1, 1, n−2, … keeps angular neighbours (including
        // the periodic wrap) at most two columns apart.
        let mut pos = vec![0; n_t];
        let (mut lo, mut hi, mut p) = (0usize, n_t - 1, 0usize);
        while lo <= hi {
            pos[lo] = p;
            p += 1;
            if lo != hi {
                pos[hi] = p;
                p += 1;
            }
            lo += 1;
            if hi == 0 {
                break;
            }
            hi -= 1;
        }
        let band = 2 * n_r;
        let mut a = BandMatrix::zeros(n_r * n_t, band, band);
        let zero_rules = Self::rules(grid, pattern, None)?;
        let mut norm = T::zero();
        for m in 0..n_t {
            for k in 0..n_r {
                let row = pos[m] * n_r + k;
                let entries = Self::stencil(grid, k, m, zero_rules[m * n_r + k]);
                let mut row_norm = T::zero();
                for (kk, mm, v) in entries {
                    a.add(row, pos[mm] * n_r + kk, v)?;
                    row_norm = row_norm + v.abs();
                }
                norm = norm.max(row_norm);
            }
        }
        let lu = BandedLu::factor(a)?;
        Ok(Self { grid, pattern, lu, pos, norm })
    }

    pub fn grid(&self) -> AnnulusGrid {
        self.grid
    }

    pub fn pattern(&self) -> BcPattern {
        self.pattern
    }

    /// Flux balance of the control volume around ring `k` (a half cell on
    /// the two boundary rings), divided by `Δθ`:
    /// `c_in (u_{k−1} − u) + c_out (u_{k+1} − u) + c_ang (u_{m−1} + u_{m+1} − 2u) + w g = 0`
    /// with `g` the outward normal derivative on a boundary ring.
    fn balance(grid: AnnulusGrid, k: usize) -> Balance<T> {
        let dr: T = grid.dr();
        let dt: T = grid.dtheta();
        let r: T = grid.radius(k);
        let last = grid.n_r() - 1;
        let c_in = if k == 0 { T::zero() } else { (r - dr * T::half()) / dr };
        let c_out = if k == last { T::zero() } else { (r + dr * T::half()) / dr };
        let width = if k == 0 || k == last { dr * T::half() } else { dr };
        let c_ang = width / (r * dt * dt);
        Balance { c_in, c_out, c_ang, w: r }
    }

    /// Row of the system at node `(k, m)` as `(k', m', coefficient)`.
    fn stencil(grid: AnnulusGrid, k: usize, m: usize, rule: NodeRule<T>) -> Vec<(usize, usize, T)> {
        let n_t = grid.n_theta();
        let c = Self::balance(grid, k);
        let prev = (m + n_t - 1) % n_t;
        let next = (m + 1) % n_t;
        match rule {
            NodeRule::Dirichlet(_) => vec![(k, m, c.diag())],
            _ => {
                let mut e = vec![(k, m, -c.diag()), (k, prev, c.c_ang), (k, next, c.c_ang)];
                if c.c_in != T::zero() {
                    e.push((k - 1, m, c.c_in));
                }
                if c.c_out != T::zero() {
                    e.push((k + 1, m, c.c_out));
                }
                e
            }
        }
    }

    /// Per-node rule, with data from `spec` when given.
    fn rules(grid: AnnulusGrid, pattern: BcPattern, spec: Option<&MixedBvpSpec<T>>) -> Result<Vec<NodeRule<T>>> {
        let (n_r, n_t) = (grid.n_r(), grid.n_theta());
        let half = n_t / 2;
        let val = |c: Option<&Condition<T>>, q: usize| c.map_or(T::zero(), |c| c.trace().values()[q]);
        let mk = |kind: BcKind, v: T| match kind {
            BcKind::Dirichlet => NodeRule::Dirichlet(v),
            BcKind::Neumann => NodeRule::Neumann(v),
        };
        let mut rules = vec![NodeRule::Interior; n_r * n_t];
        for m in 0..n_t {
            rules[m * n_r] = mk(pattern.inner, val(spec.map(|s| &s.inner), m));
            let outer = if m == 0 || m == half {
                let q = m;
                let (vr, vl) = (val(spec.map(|s| &s.right), q), val(spec.map(|s| &s.left), q));
                match (pattern.right, pattern.left) {
                    (BcKind::Dirichlet, BcKind::Dirichlet) => NodeRule::Dirichlet((vr + vl) * T::half()),
                    (BcKind::Dirichlet, BcKind::Neumann) => NodeRule::Dirichlet(vr),
                    (BcKind::Neumann, BcKind::Dirichlet) => NodeRule::Dirichlet(vl),
                    (BcKind::Neumann, BcKind::Neumann) => NodeRule::Neumann((vr + vl) * T::half()),
                }
            } else if m < half {
                mk(pattern.right, val(spec.map(|s| &s.right), m))
            } else {
                mk(pattern.left, val(spec.map(|s| &s.left), n_t - m))
            };
            rules[m * n_r + n_r - 1] = outer;
        }
        Ok(rules)
    }

    pub fn solve(&self, spec: &MixedBvpSpec<T>) -> Result<Field<T>> {
        if spec.pattern() != self.pattern {
            return Err(Error::InvalidArgument("boundary condition types differ from the factored pattern".into()));
        }
        spec.validate(self.grid)?;
        let g = self.grid;
        let (n_r, n_t) = (g.n_r(), g.n_theta());
        let rules = Self::rules(g, self.pattern, Some(spec))?;
        let mut b = vec![T::zero(); n_r * n_t];
        for m in 0..n_t {
            for k in 0..n_r {
                let c = Self::balance(g, k);
                b[self.pos[m] * n_r + k] = match rules[m * n_r + k] {
                    NodeRule::Interior => T::zero(),
                    NodeRule::Dirichlet(v) => c.diag() * v,
                    NodeRule::Neumann(v) => -c.w * v,
                };
            }
        }
        let x = self.lu.solve(&b)?;
        let res = self.lu.residual(&x, &b);
        let scale = self.norm * x.iter().fold(T::zero(), |m, v| m.max(v.abs()))
            + b.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if !(res <= T::lit(SOLVE_TOL) * scale.max(T::min_positive_value())) {
            return Err(Error::NotConverged { residual: res.to_f64_lossy() });
        }
        let mut values = vec![T::zero(); n_r * n_t];
        for m in 0..n_t {
            for k in 0..n_r {
                values[m * n_r + k] = x[self.pos[m] * n_r + k];
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("boundary value solution".into()));
        }
        Ok(Field { grid: g, values })
    }
}

/// Factors and solves in one call.
pub fn solve_mixed_bvp<T: Real>(grid: AnnulusGrid, spec: &MixedBvpSpec<T>) -> Result<Field<T>> {
    MixedBvpSolver::new(grid, spec.pattern())?.solve(spec)
}
