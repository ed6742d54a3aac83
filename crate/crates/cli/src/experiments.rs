//! The experiments behind each id. Everything here is pure: results come
//! back as CSV text plus plot descriptions, and [`crate::run`] writes them.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use bgrecon_core::bg::{iterative_refinement, reconstruct_profile, Profile};
use bgrecon_core::bspline::CubicBSplineBasis;
use bgrecon_core::cauchy::{AnnulusGrid, BoundaryTrace, CauchyOperators, KmStatus, KmVariant, Segment};
use bgrecon_core::grid::{NoiseSpec, UniformGrid};
use bgrecon_core::hadamard::{amplification_table, table_csv};
use bgrecon_core::moment_op::{DiscreteForwardMap, QuadraticVolterraOperator};

use crate::config::{ExperimentConfig, ExperimentId};
use crate::error::CliError;
use crate::functions::TestFunctionId;
use crate::plot::PlotOptions;

/// Window for "interior" errors, away from the boundary layer of the basis.
pub const INTERIOR: (f64, f64) = (0.1, 0.9);
/// Annulus used for the iterate plots.
pub const FIG6_GRID: (usize, usize) = (17, 64);
/// Annulus used for the sentinel table.
pub const TABLE1_GRID: (usize, usize) = (33, 128);
pub const KM_MAX_ITER: usize = 100;
pub const KM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvFile {
    pub name: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRef {
    pub label: String,
    pub csv: String,
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRequest {
    pub file: String,
    pub options: PlotOptions,
    pub series: Vec<SeriesRef>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub csv: Vec<CsvFile>,
    pub plots: Vec<PlotRequest>,
    /// Human-readable `key=value` lines.
    pub summary: Vec<String>,
}

impl Outcome {
    fn csv(&mut self, name: impl Into<String>, text: String) {
        self.csv.push(CsvFile { name: name.into(), text });
    }

    fn plot(&mut self, file: String, title: String, x: &str, y: &str, series: Vec<SeriesRef>) -> &mut PlotRequest {
        let options = PlotOptions { title, x_label: x.into(), y_label: y.into(), ..Default::default() };
        self.plots.push(PlotRequest { file, options, series });
        self.plots.last_mut().expect("just pushed")
    }
}

fn series(label: impl Into<String>, csv: &str, x: &str, y: &str) -> SeriesRef {
    SeriesRef { label: label.into(), csv: csv.into(), x: x.into(), y: y.into() }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match cfg.id {
        ExperimentId::Fig1 => fig1(cfg),
        ExperimentId::Fig2 => fig2(cfg),
        ExperimentId::Fig3 => fig3(cfg),
        ExperimentId::Fig4 => fig4(cfg),
        ExperimentId::Fig5 => fig5(cfg),
        ExperimentId::Fig6 => fig6(),
        ExperimentId::Table1 => table1(),
        ExperimentId::Hadamard => hadamard(cfg),
    }
}

/// Moment map at the grid nodes with `x⁰(t) = t`, and the spline basis.
pub fn setup(n: usize, nu: f64) -> Result<(DiscreteForwardMap<f64>, CubicBSplineBasis), CliError> {
    let g = UniformGrid::new(n)?;
    let op = QuadraticVolterraOperator::identity_kernel(g, nu)?;
    Ok((DiscreteForwardMap::at_grid_nodes(op), CubicBSplineBasis::new(g)))
}

/// Grid nodes and cell midpoints, `k / 2N`.
pub fn nodes_and_midpoints(n: usize) -> Vec<f64> {
    (0..=2 * n).map(|k| k as f64 / (2 * n) as f64).collect()
}

/// Noise-free data for `f`.
pub fn exact_data(map: &DiscreteForwardMap<f64>, f: TestFunctionId) -> Vec<f64> {
    map.forward_exact(&|t: f64| f.eval(t), f.breakpoints())
}

/// Reconstruction of `f` from data `y` at nodes and midpoints.
pub fn reconstruct(n: usize, nu: f64, f: TestFunctionId, y: &[f64]) -> Result<Profile<f64>, CliError> {
    let (map, basis) = setup(n, nu)?;
    let p = reconstruct_profile(&map, &basis, map.operator().kernel(), y, &nodes_and_midpoints(n))?;
    Ok(p.with_truth(&|t: f64| f.eval(t)))
}

/// Error of the exact-data reconstruction at `t = 1/2`.
pub fn error_at_half(n: usize, nu: f64, f: TestFunctionId) -> Result<f64, CliError> {
    let (map, basis) = setup(n, nu)?;
    let y = exact_data(&map, f);
    let p = reconstruct_profile(&map, &basis, map.operator().kernel(), &y, &[0.5])?;
    Ok((p.values[0] - f.eval(0.5)).abs())
}

fn interior_error(p: &Profile<f64>) -> f64 {
    p.sup_error_in(INTERIOR.0, INTERIOR.1).unwrap_or(f64::NAN)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn profile_plot(out: &mut Outcome, file: String, title: String, csvs: &[(String, String)], truth_csv: &str) {
    let mut s = vec![series("truth", truth_csv, "t", "truth")];
    s.extend(csvs.iter().map(|(label, csv)| series(label.clone(), csv, "t", "reconstructed")));
    out.plot(file, title, "t", "x(t)", s);
}

fn fig1(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ns = cfg.n.map_or(vec![25, 50], |n| vec![n]);
    let nu = cfg.nu.unwrap_or(0.0);
    let mut out = Outcome::default();
    for f in [TestFunctionId::XA, TestFunctionId::XB, TestFunctionId::XC] {
        let mut made = Vec::new();
        for &n in &ns {
            let (map, _) = setup(n, nu)?;
            let p = reconstruct(n, nu, f, &exact_data(&map, f))?;
            let name = format!("fig1_{f}_n{n}.csv");
            out.summary.push(format!("{f} n={n} interior_sup_error={:.6e}", interior_error(&p)));
            out.csv(name.clone(), p.to_csv());
            made.push((format!("N={n}"), name));
        }
        let truth = made[0].1.clone();
        profile_plot(&mut out, format!("fig1_{f}.svg"), format!("{f}, exact data, nu={nu}"), &made, &truth);
    }
    Ok(out)
}

fn fig2(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = cfg.n.unwrap_or(25);
    let nu = cfg.nu.unwrap_or(0.0);
    let eps = cfg.eps.unwrap_or(0.01);
    let noise = NoiseSpec::new(eps, cfg.seed)?;
    let mut out = Outcome::default();
    for f in [TestFunctionId::XA, TestFunctionId::XB, TestFunctionId::XC] {
        let (map, _) = setup(n, nu)?;
        let y = exact_data(&map, f);
        let clean = reconstruct(n, nu, f, &y)?;
        let noisy = reconstruct(n, nu, f, &noise.apply(&y))?;
        let truth = clean.truth.clone().unwrap_or_default();
        let mut text = String::from("t,reconstructed,exact_data,truth\n");
        for k in 0..noisy.len() {
            let _ = writeln!(text, "{:.12e},{:.12e},{:.12e},{:.12e}", noisy.targets[k], noisy.values[k], clean.values[k], truth[k]);
        }
        let name = format!("fig2_{f}.csv");
        out.summary.push(format!(
            "{f} n={n} eps={eps} seed={} interior_sup_error={:.6e} exact_data_error={:.6e}",
            cfg.seed,
            interior_error(&noisy),
            interior_error(&clean)
        ));
        out.csv(name.clone(), text);
        out.plot(format!("fig2_{f}.svg"), format!("{f}, {}% noise, N={n}", eps * 100.0), "t", "x(t)", vec![
            series("truth", &name, "t", "truth"),
            series("exact data", &name, "t", "exact_data"),
            series("noisy data", &name, "t", "reconstructed"),
        ]);
    }
    Ok(out)
}

/// Sweep range of the convergence study.
pub const FIG3_RANGE: (usize, usize) = (10, 50);

fn fig3(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let nu = cfg.nu.unwrap_or(0.0);
    let funcs = [TestFunctionId::XLin2t, TestFunctionId::XB];
    let mut out = Outcome::default();
    let mut main = String::from("n,parity,error_x_lin2t,error_x_b\n");
    let mut by_parity = [String::from("n,error_x_lin2t,error_x_b\n"), String::from("n,error_x_lin2t,error_x_b\n")];
    let mut pts: [[Vec<(f64, f64)>; 2]; 2] = Default::default();
    for n in FIG3_RANGE.0..=FIG3_RANGE.1 {
        let e = [error_at_half(n, nu, funcs[0])?, error_at_half(n, nu, funcs[1])?];
        let parity = n % 2;
        let _ = writeln!(main, "{n},{},{:.12e},{:.12e}", ["even", "odd"][parity], e[0], e[1]);
        let _ = writeln!(by_parity[parity], "{n},{:.12e},{:.12e}", e[0], e[1]);
        for (fi, &err) in e.iter().enumerate() {
            pts[fi][parity].push((n as f64, err));
        }
    }
    let mut slopes = String::from("function,parity,slope\n");
    for (fi, f) in funcs.iter().enumerate() {
        for (pi, parity) in ["even", "odd"].iter().enumerate() {
            let s = loglog_slope(&pts[fi][pi]);
            let _ = writeln!(slopes, "{f},{parity},{s:.6}");
            out.summary.push(format!("{f} {parity} slope={s:.4}"));
        }
    }
    out.csv("fig3.csv", main);
    out.csv("fig3_even.csv", by_parity[0].clone());
    out.csv("fig3_odd.csv", by_parity[1].clone());
    out.csv("fig3_slopes.csv", slopes);
    for f in funcs {
        let col = format!("error_{f}");
        let p = out.plot(format!("fig3_{f}.svg"), format!("error at t=1/2 for {f}"), "N", "error", vec![
            series("even N", "fig3_even.csv", "n", &col),
            series("odd N", "fig3_odd.csv", "n", &col),
        ]);
        p.options.log_x = true;
        p.options.log_y = true;
    }
    Ok(out)
}

fn fig4(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = cfg.n.unwrap_or(25);
    let nus = cfg.nu.map_or(vec![0.01, 0.1, 1.0], |v| vec![v]);
    let f = TestFunctionId::XSq;
    let targets = nodes_and_midpoints(n);
    let truth = |t: f64| f.eval(t);
    let mut out = Outcome::default();
    let mut summary = String::from("nu,round1_interior_error,round2_interior_error\n");
    for nu in nus {
        let (map, basis) = setup(n, nu)?;
        let y = exact_data(&map, f);
        let rounds = iterative_refinement(&map, &basis, map.operator().kernel(), &y, &targets, 2)?;
        let r1 = rounds[0].clone().with_truth(&truth);
        let r2 = rounds.last().expect("at least one round").clone().with_truth(&truth);
        let (e1, e2) = (interior_error(&r1), interior_error(&r2));
        let _ = writeln!(summary, "{nu},{e1:.12e},{e2:.12e}");
        out.summary.push(format!("nu={nu} round1_interior_error={e1:.6e} round2_interior_error={e2:.6e}"));
        let mut text = String::from("t,reconstructed,refined,truth\n");
        for k in 0..targets.len() {
            let _ = writeln!(text, "{:.12e},{:.12e},{:.12e},{:.12e}", targets[k], r1.values[k], r2.values[k], truth(targets[k]));
        }
        let name = format!("fig4_nu{nu}.csv");
        out.csv(name.clone(), text);
        out.plot(format!("fig4_nu{nu}.svg"), format!("x(t)=t^2, N={n}, nu={nu}"), "t", "x(t)", vec![
            series("truth", &name, "t", "truth"),
            series("round 1", &name, "t", "reconstructed"),
            series("round 2", &name, "t", "refined"),
        ]);
    }
    out.csv("fig4_summary.csv", summary);
    Ok(out)
}

fn fig5(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = cfg.n.unwrap_or(25);
    let nu = cfg.nu.unwrap_or(0.01);
    let mut out = Outcome::default();
    for f in [TestFunctionId::XB, TestFunctionId::XC] {
        let (map, _) = setup(n, nu)?;
        let p = reconstruct(n, nu, f, &exact_data(&map, f))?;
        let name = format!("fig5_{f}.csv");
        out.summary.push(format!("{f} n={n} nu={nu} interior_sup_error={:.6e}", interior_error(&p)));
        out.csv(name.clone(), p.to_csv());
        profile_plot(&mut out, format!("fig5_{f}.svg"), format!("{f}, exact data, nu={nu}"), &[("reconstructed".into(), name.clone())], &name);
    }
    Ok(out)
}

fn annulus(dims: (usize, usize)) -> Result<CauchyOperators<f64>, CliError> {
    Ok(CauchyOperators::new(AnnulusGrid::new(dims.0, dims.1)?)?)
}

fn unit_sentinel(ops: &CauchyOperators<f64>) -> Result<BoundaryTrace<f64>, CliError> {
    Ok(ops.sentinel_from(&BoundaryTrace::constant(ops.grid(), Segment::Left, 1.0))?)
}

fn fig6() -> Result<Outcome, CliError> {
    let ops = annulus(FIG6_GRID)?;
    let mu = unit_sentinel(&ops)?;
    let km = ops.kozlov_mazya(&mu, KM_MAX_ITER, KM_TOL)?;
    let plain = ops.kozlov_mazya_with(KmVariant::Alternating, &mu, KM_MAX_ITER, KM_TOL)?;
    let mut out = Outcome::default();
    let last = km.iterations();
    let shown: Vec<usize> = [1, 2, 3].into_iter().filter(|&k| k < last).chain([last]).collect();
    let mut text = String::from("node,t");
    for k in &shown {
        let _ = write!(text, ",psi_{k}");
    }
    text.push('\n');
    let g = ops.grid();
    for q in 0..g.half_len() {
        let _ = write!(text, "{q},{:.12e}", g.arc_param::<f64>(q));
        for &k in &shown {
            let _ = write!(text, ",{:.12e}", km.iterates[k].values()[q]);
        }
        text.push('\n');
    }
    out.summary.push(format!("grid={}x{} status={:?} iterations={last}", FIG6_GRID.0, FIG6_GRID.1, km.status));
    out.summary.push(format!(
        "residual_1={:.6e} residual_final={:.6e} alternating_residual_final={:.6e}",
        km.residuals[1.min(last)],
        km.residuals[last],
        plain.residuals[plain.iterations()]
    ));
    out.csv("fig6_iterates.csv", text);
    out.csv("fig6_residuals.csv", km.residuals_csv());
    out.csv("fig6_alternating_residuals.csv", plain.residuals_csv());
    out.plot(
        "fig6_iterates.svg".into(),
        "iterates psi_k on the left arc (node 0 = (0,-1))".into(),
        "node",
        "psi",
        shown.iter().map(|k| series(format!("k={k}"), "fig6_iterates.csv", "node", &format!("psi_{k}"))).collect(),
    );
    out.plot("fig6_residuals.svg".into(), "residual ||A#psi_k + mu||".into(), "iteration", "residual", vec![
        series("conjugate gradients", "fig6_residuals.csv", "iteration", "residual"),
        series("plain alternation", "fig6_alternating_residuals.csv", "iteration", "residual"),
    ])
    .options
    .log_y = true;
    Ok(out)
}

/// One row of the sentinel table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentinelRow {
    /// `⟨μ, φ⟩`.
    pub truth: f64,
    /// `⟨ψ, f⟩`.
    pub raw: f64,
    /// `⟨ψ, f⟩ − r_{a,b}(ψ)`.
    pub corrected: f64,
    pub correction: f64,
}

impl SentinelRow {
    pub fn relative_error(&self) -> f64 {
        (self.corrected - self.truth).abs() / self.truth.abs()
    }
}

pub fn phi_1(t: f64) -> f64 {
    (t - FRAC_PI_2).powi(2)
}

pub fn phi_2(t: f64) -> f64 {
    PI - 2.0 * (t - FRAC_PI_2).abs()
}

/// Rows for `φ₁`, `φ₂` with `ψ` from the iteration on `μ = −A♯(1)`.
pub fn sentinel_table(dims: (usize, usize)) -> Result<(Vec<SentinelRow>, KmStatus, usize), CliError> {
    let ops = annulus(dims)?;
    let g = ops.grid();
    let mu = unit_sentinel(&ops)?;
    let km = ops.kozlov_mazya(&mu, KM_MAX_ITER, KM_TOL)?;
    if km.status == KmStatus::Stalled {
        return Err(CliError::Numerical(format!(
            "sentinel iteration stalled at residual {:.3e}",
            km.residuals.last().copied().unwrap_or(f64::NAN)
        )));
    }
    let mut rows = Vec::new();
    for phi_fn in [phi_1 as fn(f64) -> f64, phi_2] {
        let phi = BoundaryTrace::from_fn(g, Segment::Right, phi_fn);
        let (a, b) = (phi_fn(0.0), phi_fn(PI));
        let f = ops.apply_a(&phi)?;
        let raw = km.psi.inner(&f)?;
        let corrected = ops.sentinel_reconstruct(&km.psi, &f, a, b)?;
        rows.push(SentinelRow { truth: mu.inner(&phi)?, raw, corrected, correction: raw - corrected });
    }
    Ok((rows, km.status, km.iterations()))
}

fn table1() -> Result<Outcome, CliError> {
    let (rows, status, iterations) = sentinel_table(TABLE1_GRID)?;
    let mut out = Outcome::default();
    let mut text = String::from("phi,mu_phi,psi_f,corrected,relative_error\n");
    for (name, r) in ["phi_1", "phi_2"].iter().zip(&rows) {
        let _ = writeln!(text, "{name},{:.12e},{:.12e},{:.12e},{:.12e}", r.truth, r.raw, r.corrected, r.relative_error());
        out.summary.push(format!(
            "{name} mu_phi={:.5} psi_f={:.5} corrected={:.5} relative_error={:.5}",
            r.truth,
            r.raw,
            r.corrected,
            r.relative_error()
        ));
    }
    out.summary.push(format!("grid={}x{} km_status={status:?} km_iterations={iterations}", TABLE1_GRID.0, TABLE1_GRID.1));
    out.csv("table1.csv", text);
    Ok(out)
}

fn hadamard(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let k_max = cfg.n.unwrap_or(10);
    let k_max = u32::try_from(k_max).map_err(|_| CliError::Usage(format!("k_max {k_max} is too large")))?;
    let rows = amplification_table::<f64>(k_max)?;
    let mut out = Outcome::default();
    if let Some(r) = rows.iter().find(|r| r.ratio > 1e6) {
        out.summary.push(format!("ratio exceeds 1e6 at k={}", r.k));
    }
    out.csv("hadamard.csv", table_csv(&rows));
    let p = out.plot("hadamard.svg".into(), "sinh(pi k)/(pi k)".into(), "k", "ratio", vec![
        series("solution / data", "hadamard.csv", "k", "ratio"),
        series("data norm", "hadamard.csv", "k", "data_norm"),
    ]);
    p.options.log_y = true;
    Ok(out)
}
