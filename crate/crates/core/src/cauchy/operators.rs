//! The Cauchy-data operator `A`, its companion `A♯`, the correction
//! functional `r_{a,b}`, sentinels, and the Kozlov–Maz'ya iteration.

use super::bvp::{BcKind, BcPattern, Condition, Field, MixedBvpSolver, MixedBvpSpec};
use super::mesh::{AnnulusGrid, BoundaryTrace, Segment};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `η_{a,b}(t) = a cos²(t/2) + b sin²(t/2)`: smooth, `a` at `P₁`, `b` at `P₂`.
pub fn eta_blend<T: Real>(grid: AnnulusGrid, a: T, b: T) -> BoundaryTrace<T> {
    BoundaryTrace::from_fn(grid, Segment::Right, |t: T| {
        let (s, c) = (t * T::half()).sin_cos();
        a * c * c + b * s * s
    })
}

/// `η(t) = a + (b − a) t / π`.
pub fn eta_linear<T: Real>(grid: AnnulusGrid, a: T, b: T) -> BoundaryTrace<T> {
    BoundaryTrace::from_fn(grid, Segment::Right, |t: T| a + (b - a) * t / T::PI())
}

/// Both mixed problems the toolkit needs, factored once.
#[derive(Debug, Clone)]
pub struct CauchyOperators<T> {
    grid: AnnulusGrid,
    /// Dirichlet on `Γ_r`, Neumann on `Γ_l` and `Γ_i`.
    right_dirichlet: MixedBvpSolver<T>,
    /// Neumann on `Γ_r` and `Γ_i`, Dirichlet on `Γ_l`.
    left_dirichlet: MixedBvpSolver<T>,
}

impl<T: Real> CauchyOperators<T> {
    pub fn new(grid: AnnulusGrid) -> Result<Self> {
        let right_dirichlet = MixedBvpSolver::new(
            grid,
            BcPattern { right: BcKind::Dirichlet, left: BcKind::Neumann, inner: BcKind::Neumann },
        )?;
        let left_dirichlet = MixedBvpSolver::new(
            grid,
            BcPattern { right: BcKind::Neumann, left: BcKind::Dirichlet, inner: BcKind::Neumann },
        )?;
        Ok(Self { grid, right_dirichlet, left_dirichlet })
    }

    pub fn grid(&self) -> AnnulusGrid {
        self.grid
    }

    fn check(&self, t: &BoundaryTrace<T>, s: Segment) -> Result<()> {
        if t.grid() != self.grid || t.segment() != s {
            return Err(Error::InvalidArgument(format!("expected a trace on the {} segment of this grid", s.name())));
        }
        Ok(())
    }

    fn zero_inner(&self) -> Condition<T> {
        Condition::Neumann(BoundaryTrace::zeros(self.grid, Segment::Inner))
    }

    /// `w` with `w = dirichlet` on `Γ_r`, `w_ν = neumann` on `Γ_l`, `w_ν = 0` on `Γ_i`.
    pub fn solve_right_dirichlet(&self, dirichlet: &BoundaryTrace<T>, neumann: &BoundaryTrace<T>) -> Result<Field<T>> {
        self.check(dirichlet, Segment::Right)?;
        self.check(neumann, Segment::Left)?;
        self.right_dirichlet.solve(&MixedBvpSpec {
            right: Condition::Dirichlet(dirichlet.clone()),
            left: Condition::Neumann(neumann.clone()),
            inner: self.zero_inner(),
        })
    }

    /// `u` with `u_ν = neumann` on `Γ_r`, `u = dirichlet` on `Γ_l`, `u_ν = 0` on `Γ_i`.
    pub fn solve_left_dirichlet(&self, neumann: &BoundaryTrace<T>, dirichlet: &BoundaryTrace<T>) -> Result<Field<T>> {
        self.check(neumann, Segment::Right)?;
        self.check(dirichlet, Segment::Left)?;
        self.left_dirichlet.solve(&MixedBvpSpec {
            right: Condition::Neumann(neumann.clone()),
            left: Condition::Dirichlet(dirichlet.clone()),
            inner: self.zero_inner(),
        })
    }

    /// `A φ = w|_{Γ_l}` where `w = φ` on `Γ_r` and `w_ν = 0` elsewhere.
    pub fn apply_a(&self, phi: &BoundaryTrace<T>) -> Result<BoundaryTrace<T>> {
        let w = self.solve_right_dirichlet(phi, &BoundaryTrace::zeros(self.grid, Segment::Left))?;
        Ok(w.trace(Segment::Left))
    }

    /// `A♯ ψ = v_ν|_{Γ_r}` where `v = 0` on `Γ_r`, `v_ν = ψ` on `Γ_l`, `v_ν = 0` on `Γ_i`.
    pub fn apply_a_sharp(&self, psi: &BoundaryTrace<T>) -> Result<BoundaryTrace<T>> {
        Ok(self.a_sharp_field(psi)?.discrete_flux(Segment::Right))
    }

    fn a_sharp_field(&self, psi: &BoundaryTrace<T>) -> Result<Field<T>> {
        self.solve_right_dirichlet(&BoundaryTrace::zeros(self.grid, Segment::Right), psi)
    }

    /// `⟨Aφ, ψ⟩_{Γ_l} + ⟨φ, A♯ψ⟩_{Γ_r}`; depends on `φ` only through its
    /// values at the contact points.
    pub fn green_pairing(&self, phi: &BoundaryTrace<T>, psi: &BoundaryTrace<T>) -> Result<T> {
        self.check(psi, Segment::Left)?;
        Ok(self.apply_a(phi)?.inner(psi)? + phi.inner(&self.apply_a_sharp(psi)?)?)
    }

    /// `r_{a,b}(ψ)` with the cosine blend `η_{a,b}`.
    pub fn correction_functional(&self, psi: &BoundaryTrace<T>, a: T, b: T) -> Result<T> {
        if a == T::zero() && b == T::zero() {
            self.check(psi, Segment::Left)?;
            return Ok(T::zero());
        }
        self.green_pairing(&eta_blend(self.grid, a, b), psi)
    }

    /// `⟨ψ, f⟩_{Γ_l} − r_{a,b}(ψ) ≈ ⟨μ, φ⟩` for `f = Aφ`, `a = φ(P₁)`, `b = φ(P₂)`.
    pub fn sentinel_reconstruct(&self, psi: &BoundaryTrace<T>, f: &BoundaryTrace<T>, a: T, b: T) -> Result<T> {
        self.check(f, Segment::Left)?;
        Ok(psi.inner(f)? - self.correction_functional(psi, a, b)?)
    }

    /// `μ = −A♯ψ̄`, so that `ψ̄` solves `−A♯ψ = μ`.
    pub fn sentinel_from(&self, psi_bar: &BoundaryTrace<T>) -> Result<BoundaryTrace<T>> {
        Ok(self.apply_a_sharp(psi_bar)?.scale(-T::one()))
    }

    /// Solves `−A♯ψ = μ` from `ψ = 0` with the default [`KmVariant::Cgls`].
    pub fn kozlov_mazya(&self, mu: &BoundaryTrace<T>, max_iter: usize, tol: T) -> Result<KozlovMazya<T>> {
        self.kozlov_mazya_with(KmVariant::Cgls, mu, max_iter, tol)
    }

    /// Solves `−A♯ψ = μ` from `ψ = 0`. Stops once the residual
    /// `‖A♯ψ_k + μ‖` (trapezoid `L²` on `Γ_r`) is at most `tol` or at the
    /// round-off floor, after `max_iter` steps, or on a stall.
    pub fn kozlov_mazya_with(
        &self,
        variant: KmVariant,
        mu: &BoundaryTrace<T>,
        max_iter: usize,
        tol: T,
    ) -> Result<KozlovMazya<T>> {
        self.check(mu, Segment::Right)?;
        let floor = T::lit(64.0) * T::epsilon() * l2(mu)?;
        let mut log = KmLog::new(tol.max(floor));
        let mut psi = BoundaryTrace::zeros(self.grid, Segment::Left);
        match variant {
            KmVariant::Alternating => {
                let neg_mu = mu.scale(-T::one());
                loop {
                    // (i) v = 0 on Γ_r, v_ν = ψ_k on Γ_l
                    let v = self.a_sharp_field(&psi)?;
                    let res = v.discrete_flux(Segment::Right).combine(T::one(), mu, T::one())?;
                    if let Some(status) = log.record(&psi, &res, max_iter)? {
                        return Ok(log.finish(psi, status));
                    }
                    // (ii) u_ν = −μ on Γ_r, u = v on Γ_l
                    psi = self.solve_left_dirichlet(&neg_mu, &v.trace(Segment::Left))?.discrete_flux(Segment::Left);
                }
            }
            KmVariant::Cgls => {
                let rows = self.contact_rows()?;
                let mut r = mu.scale(-T::one());
                let mut s = self.a_sharp_adjoint(&r, &rows)?;
                let mut p = s.clone();
                let mut gamma = s.inner(&s)?;
                loop {
                    // recomputed rather than taken from the recurrence for r
                    let res = self.apply_a_sharp(&psi)?.combine(T::one(), mu, T::one())?;
                    if let Some(status) = log.record(&psi, &res, max_iter)? {
                        return Ok(log.finish(psi, status));
                    }
                    let q = self.apply_a_sharp(&p)?;
                    let qq = q.inner(&q)?;
                    if qq == T::zero() || gamma == T::zero() {
                        return Ok(log.finish(psi, KmStatus::Stalled));
                    }
                    let alpha = gamma / qq;
                    psi = psi.combine(T::one(), &p, alpha)?;
                    r = r.combine(T::one(), &q, -alpha)?;
                    s = self.a_sharp_adjoint(&r, &rows)?;
                    let next = s.inner(&s)?;
                    p = s.combine(T::one(), &p, next / gamma)?;
                    gamma = next;
                }
            }
        }
    }

    /// Rows of `A♯` at the two contact nodes of `Γ_r`, as traces on `Γ_l`.
    fn contact_rows(&self) -> Result<[Vec<T>; 2]> {
        let n = self.grid.half_len();
        let mut rows = [vec![T::zero(); n], vec![T::zero(); n]];
        for j in 1..n - 1 {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let out = self.apply_a_sharp(&BoundaryTrace::new(self.grid, Segment::Left, e)?)?;
            rows[0][j] = out.values()[0];
            rows[1][j] = out.values()[n - 1];
        }
        Ok(rows)
    }

    /// Adjoint of `ψ ↦ A♯ψ` (free values at the interior `Γ_l` nodes) in the
    /// trapezoid inner products. Away from the contacts it is `−A`, by the
    /// discrete Green identity; the contact values go through `rows`.
    fn a_sharp_adjoint(&self, y: &BoundaryTrace<T>, rows: &[Vec<T>; 2]) -> Result<BoundaryTrace<T>> {
        let n = self.grid.half_len();
        let wr = self.grid.quadrature_weights::<T>(Segment::Right);
        let wl = self.grid.quadrature_weights::<T>(Segment::Left);
        let (y0, y1) = (y.values()[0], y.values()[n - 1]);
        let mut inner = y.values().to_vec();
        inner[0] = T::zero();
        inner[n - 1] = T::zero();
        let ay = self.apply_a(&BoundaryTrace::new(self.grid, Segment::Right, inner)?)?;
        let mut out: Vec<T> = ay.values().iter().map(|&v| -v).collect();
        out[0] = T::zero();
        out[n - 1] = T::zero();
        for j in 1..n - 1 {
            out[j] = out[j] + (wr[0] * y0 * rows[0][j] + wr[n - 1] * y1 * rows[1][j]) / wl[j];
        }
        BoundaryTrace::new(self.grid, Segment::Left, out)
    }
}

fn l2<T: Real>(t: &BoundaryTrace<T>) -> Result<T> {
    Ok(t.inner(t)?.max(T::zero()).sqrt())
}

/// Residual bookkeeping and stopping rules shared by both variants.
struct KmLog<T> {
    tol: T,
    residuals: Vec<T>,
    sup_residuals: Vec<T>,
    iterates: Vec<BoundaryTrace<T>>,
    best: T,
    since_best: usize,
}

impl<T: Real> KmLog<T> {
    fn new(tol: T) -> Self {
        Self { tol, residuals: Vec::new(), sup_residuals: Vec::new(), iterates: Vec::new(), best: T::infinity(), since_best: 0 }
    }

    fn record(&mut self, psi: &BoundaryTrace<T>, res: &BoundaryTrace<T>, max_iter: usize) -> Result<Option<KmStatus>> {
        let k = self.residuals.len();
        let norm = l2(res)?;
        if !norm.is_finite() {
            return Err(Error::NonFinite("Kozlov-Maz'ya residual".into()));
        }
        self.residuals.push(norm);
        self.sup_residuals.push(res.sup_norm());
        self.iterates.push(psi.clone());
        if norm <= self.tol {
            return Ok(Some(KmStatus::Converged));
        }
        if norm < self.best * (T::one() - T::lit(STALL_GAIN)) {
            self.best = norm;
            self.since_best = 0;
        } else {
            self.since_best += 1;
            if self.since_best >= STALL_WINDOW {
                return Ok(Some(KmStatus::Stalled));
            }
        }
        Ok((k == max_iter).then_some(KmStatus::MaxIterations))
    }

    fn finish(self, psi: BoundaryTrace<T>, status: KmStatus) -> KozlovMazya<T> {
        KozlovMazya { psi, residuals: self.residuals, sup_residuals: self.sup_residuals, iterates: self.iterates, status }
    }
}

/// Consecutive steps without a new best residual (improving by at least
/// [`STALL_GAIN`] relative) after which the data are deemed inconsistent.
pub const STALL_WINDOW: usize = 10;
pub const STALL_GAIN: f64 = 1e-4;

/// How `−A♯ψ = μ` is iterated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KmVariant {
    /// (i) `v = 0` on `Γ_r`, `v_ν = ψ_k` on `Γ_l`, read `g_k = v|_{Γ_l}`;
    /// (ii) `u_ν = −μ` on `Γ_r`, `u = g_k` on `Γ_l`, `ψ_{k+1} = u_ν|_{Γ_l}`.
    Alternating,
    /// Conjugate gradients on the normal equations of `A♯ψ = −μ`; each step
    /// solves one problem of type (i) and one with Dirichlet data on `Γ_r`.
    #[default]
    Cgls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KmStatus {
    Converged,
    MaxIterations,
    /// The residual stopped decreasing: `μ` is probably not in the range of `A♯`.
    Stalled,
}

/// Outcome of [`CauchyOperators::kozlov_mazya`].
#[derive(Debug, Clone, PartialEq)]
pub struct KozlovMazya<T> {
    pub psi: BoundaryTrace<T>,
    /// `‖A♯ψ_k + μ‖` in trapezoid `L²` for `k = 0, 1, …` (`ψ_0 = 0`).
    pub residuals: Vec<T>,
    /// The same residuals in the max norm.
    pub sup_residuals: Vec<T>,
    /// `ψ_k` for every recorded `k`.
    pub iterates: Vec<BoundaryTrace<T>>,
    pub status: KmStatus,
}

impl<T: Real> KozlovMazya<T> {
    pub fn iterations(&self) -> usize {
        self.residuals.len() - 1
    }

    /// `iteration,residual,sup_residual`.
    pub fn residuals_csv(&self) -> String {
        let mut out = String::from("iteration,residual,sup_residual\n");
        for (k, (r, s)) in self.residuals.iter().zip(&self.sup_residuals).enumerate() {
            out.push_str(&format!("{k},{r:.12e},{s:.12e}\n"));
        }
        out
    }

    /// `iteration,node,t,value` for the requested iterations.
    pub fn iterates_csv(&self, which: &[usize]) -> String {
        let mut out = String::from("iteration,node,t,value\n");
        for &k in which.iter().filter(|&&k| k < self.iterates.len()) {
            let it = &self.iterates[k];
            for (q, v) in it.values().iter().enumerate() {
                let t: T = it.grid().arc_param(q);
                out.push_str(&format!("{k},{q},{t:.12e},{v:.12e}\n"));
            }
        }
        out
    }
}
