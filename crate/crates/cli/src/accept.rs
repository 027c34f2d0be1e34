//! Acceptance suites. Each check records what was measured, what it was
//! compared with and the tolerance used.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use rmtgeo::correlators::{correlator_exact, correlator_free_unscaled, correlator_series};
use rmtgeo::curvature::{cauchy_chi, curvature_closed, curvature_mc, level_curvature, third_derivative};
use rmtgeo::ensembles::{build_family, sample, EnsembleSpec, HamiltonianFamily};
use rmtgeo::geodesics::{
    gue_divergence_lambda, gue_geodesic_state, gue_ode_residual, intbreak_geodesic, sphere_distance, Branch,
    GeodesicConstants, StopReason,
};
use rmtgeo::geometry::{
    fs_mc_2x2, fs_per_state, gue_metric_closed, intbreak_metric, intbreak_ricci, qmt_mc_sweep, ricci_fd,
    tridiag_beta_fs_beta3, tridiag_beta_fs_beta5, tridiag_beta_fs_closed, virial_closed, virial_pair_sum, DEFAULT_PHI,
};
use rmtgeo::numerics::ode::OdeOptions;
use rmtgeo::numerics::quad::tanh_sinh;
use rmtgeo::numerics::{integrate_fs_2x2, Integrand2x2, QuadratureSpec};
use rmtgeo::prng::SeedSpec;
use rmtgeo::spectra::{eigh, eigvalsh, log_grid, sff, spectral_moments};
use rmtgeo::stats::power_law_fit;

use crate::figures::{
    beta_family_sweep, caption_speed, fig8_grid, qmt_rows, trajectory_rows, CORRELATOR_HEADER, QMT_HEADER,
    TRAJECTORY_HEADER,
};
use crate::output::{num, Run};
use crate::{sub_seed, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ClosedForms,
    McVsClosed,
    Geodesics,
    Correlators,
    Curvature,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::ClosedForms, Suite::McVsClosed, Suite::Geodesics, Suite::Correlators, Suite::Curvature];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ClosedForms => "closed-forms",
            Suite::McVsClosed => "mc-vs-closed",
            Suite::Geodesics => "geodesics",
            Suite::Correlators => "correlators",
            Suite::Curvature => "curvature",
        }
    }

    pub fn parse(s: &str) -> Result<Suite, CliError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown suite `{s}`")))
    }

    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::ClosedForms => &[4, 5],
            Suite::McVsClosed => &[1, 2, 8, 10],
            Suite::Geodesics => &[6],
            Suite::Correlators => &[3],
            Suite::Curvature => &[7, 9],
        }
    }
}

/// How `observed` is judged against `target` and `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// |observed − target| ≤ tolerance
    Within,
    /// observed > target − tolerance
    Above,
    /// observed < target + tolerance
    Below,
    /// a boolean outcome; observed is informational
    Holds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub relation: Relation,
    pub observed: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn within(criterion: u8, name: impl Into<String>, observed: f64, target: f64, tolerance: f64) -> Self {
        let pass = (observed - target).abs() <= tolerance;
        Check { criterion, name: name.into(), relation: Relation::Within, observed, target, tolerance, pass }
    }

    /// `err` is a non-negative error measure bounded by `tolerance`.
    fn small(criterion: u8, name: impl Into<String>, err: f64, tolerance: f64) -> Self {
        Check::within(criterion, name, err, 0.0, tolerance)
    }

    fn above(criterion: u8, name: impl Into<String>, observed: f64, target: f64, tolerance: f64) -> Self {
        let pass = observed > target - tolerance;
        Check { criterion, name: name.into(), relation: Relation::Above, observed, target, tolerance, pass }
    }

    fn below(criterion: u8, name: impl Into<String>, observed: f64, target: f64, tolerance: f64) -> Self {
        let pass = observed < target + tolerance;
        Check { criterion, name: name.into(), relation: Relation::Below, observed, target, tolerance, pass }
    }

    fn holds(criterion: u8, name: impl Into<String>, observed: f64, pass: bool) -> Self {
        Check { criterion, name: name.into(), relation: Relation::Holds, observed, target: f64::NAN, tolerance: f64::NAN, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub criterion: u8,
    pub seconds: f64,
    pub budget_s: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub timing: Vec<Timing>,
}

struct Ctx<'a> {
    seed: u64,
    run: &'a mut Run,
    checks: Vec<Check>,
    timing: Vec<Timing>,
}

impl Ctx<'_> {
    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn time(&mut self, criterion: u8, started: Instant, budget_s: f64) {
        let seconds = started.elapsed().as_secs_f64();
        self.timing.push(Timing { criterion, seconds, budget_s, pass: seconds <= budget_s });
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// Runs one suite, writing its data CSVs, a checks CSV and a JSON report.
pub fn run_suite(suite: Suite, seed: u64, run: &mut Run) -> Result<SuiteReport, CliError> {
    let mut ctx = Ctx { seed, run, checks: Vec::new(), timing: Vec::new() };
    match suite {
        Suite::ClosedForms => closed_forms(&mut ctx)?,
        Suite::McVsClosed => mc_vs_closed(&mut ctx)?,
        Suite::Geodesics => geodesics(&mut ctx)?,
        Suite::Correlators => correlators(&mut ctx)?,
        Suite::Curvature => curvature(&mut ctx)?,
    }
    let pass = ctx.checks.iter().all(|c| c.pass) && ctx.timing.iter().all(|t| t.pass);
    let rows: Vec<Vec<String>> = ctx
        .checks
        .iter()
        .map(|c| {
            vec![
                c.criterion.to_string(),
                c.name.clone(),
                format!("{:?}", c.relation).to_lowercase(),
                num(c.observed),
                num(c.target),
                num(c.tolerance),
                c.pass.to_string(),
            ]
        })
        .collect();
    let header = ["criterion", "name", "relation", "observed", "target", "tolerance", "pass"];
    ctx.run.csv(&format!("accept_{}_checks.csv", suite.name()), &header, &rows)?;
    let report = SuiteReport { suite, seed, pass, checks: ctx.checks, timing: ctx.timing };
    ctx.run.json(&format!("accept_{}.json", suite.name()), &report)?;
    Ok(report)
}

fn closed_forms(ctx: &mut Ctx) -> Result<(), CliError> {
    let rs = log_grid(0.1, 20.0, 40);
    let mut e2 = 0.0f64;
    let (mut e3, mut e5) = (0.0f64, 0.0f64);
    for &r in &rs {
        e2 = e2.max(rel(tridiag_beta_fs_closed(2.0, r)?, intbreak_metric(r).0));
        e3 = e3.max(rel(tridiag_beta_fs_closed(3.0, r)?, tridiag_beta_fs_beta3(r)));
        e5 = e5.max(rel(tridiag_beta_fs_closed(5.0, r)?, tridiag_beta_fs_beta5(r)));
    }
    ctx.push(Check::small(4, "tridiag_beta2_equals_intbreak_grr", e2, 1e-8));
    ctx.push(Check::small(4, "generic_beta3_equals_special_case", e3, 1e-8));
    ctx.push(Check::small(4, "generic_beta5_equals_special_case", e5, 1e-8));
    let limit = 8.0 / (PI * PI);
    ctx.push(Check::within(4, "ricci_r0_value", intbreak_ricci(0.0), limit, 1e-8 * limit));
    ctx.push(Check::within(4, "ricci_r_to_0_limit", intbreak_ricci(1e-9), limit, 1e-8 * limit));
    ctx.push(Check::within(4, "ricci_large_r_expansion_r10", intbreak_ricci(10.0), 4.0 - 64.0 / 1500.0, 1e-3));

    let n = 64;
    let target = 4.0 / (n - 1) as f64;
    let mut e_gue = 0.0f64;
    let mut e_ib = 0.0f64;
    let mut rows = Vec::new();
    for &r in &rs {
        let g = ricci_fd(|x| gue_metric_closed(n, x).unwrap().0, |x| gue_metric_closed(n, x).unwrap().1, r, 1e-3 * r)?;
        e_gue = e_gue.max(rel(g, target));
        let fd = ricci_fd(|x| intbreak_metric(x).0, |x| intbreak_metric(x).1, r, 1e-3 * r)?;
        let exact = intbreak_ricci(r);
        e_ib = e_ib.max((fd - exact).abs());
        rows.push(vec![num(r), num(exact), num(fd), num(g)]);
    }
    ctx.push(Check::small(5, "ricci_fd_gue_metric_N64", e_gue, 1e-5));
    ctx.push(Check::small(5, "ricci_fd_intbreak", e_ib, 1e-5));
    ctx.run.csv("accept_ricci.csv", &["r", "ricci_intbreak", "ricci_intbreak_fd", "ricci_gue_fd"], &rows)?;
    Ok(())
}

fn mc_vs_closed(ctx: &mut Ctx) -> Result<(), CliError> {
    // 1: GUE QMT at N = 64, M = 500
    let started = Instant::now();
    let (n, m) = (64, 500);
    let g = EnsembleSpec::gue(n);
    let rs = [0.3, 0.5, 1.0, 2.0];
    let est = qmt_mc_sweep(&g, &g, Some(&g), &rs, DEFAULT_PHI, m, sub_seed(ctx.seed, 101))?;
    for e in &est {
        let (grr, gpp, _) = gue_metric_closed(n, e.r)?;
        let r = e.r;
        ctx.push(Check::within(1, format!("grr_3se_r{r}"), e.g_rr.mean, grr, 3.0 * e.g_rr.stderr));
        ctx.push(Check::small(1, format!("grr_rel_r{r}"), rel(e.g_rr.mean, grr), 0.05));
        ctx.push(Check::within(1, format!("gpp_3se_r{r}"), e.g_pp.mean, gpp, 3.0 * e.g_pp.stderr));
        ctx.push(Check::small(1, format!("gpp_rel_r{r}"), rel(e.g_pp.mean, gpp), 0.05));
        ctx.push(Check::within(1, format!("grp_zero_r{r}"), e.g_rp.mean, 0.0, 3.0 * e.g_rp.stderr));
    }
    ctx.run.csv("accept_gue_qmt.csv", &QMT_HEADER, &qmt_rows(&est))?;
    ctx.time(1, started, 120.0);

    // 2: virial theorem
    let seed = sub_seed(ctx.seed, 102);
    let sums = (0..m)
        .into_par_iter()
        .map(|k| Ok(virial_pair_sum(&eigvalsh(&sample(&g, &mut SeedSpec::new(seed, k as u64).slot(0))?)?)))
        .collect::<rmtgeo::Result<Vec<f64>>>()?;
    let mean = sums.iter().sum::<f64>() / m as f64;
    ctx.push(Check::small(2, "virial_N64_rel", rel(mean, virial_closed(n, g.variance, 2.0)), 0.05));
    ctx.push(Check::within(2, "virial_N2_hand_value", virial_closed(2, 1.0, 2.0), 1.0, 1e-15));

    // 8: 2×2 chains
    let started = Instant::now();
    let m2 = 100_000;
    let quad = QuadratureSpec::default();
    let chains: [(&str, Integrand2x2, fn(f64) -> f64); 4] = [
        ("tridiag_beta2", Integrand2x2::TridiagBeta { beta: 2.0 }, |r| tridiag_beta_fs_closed(2.0, r).unwrap()),
        ("eta0", Integrand2x2::InvariantEta { eta: 0.0, variance: 0.5 }, |r| intbreak_metric(r).0),
        ("haar_case1_beta2", Integrand2x2::HaarCase1 { beta: 2.0 }, |r| gue_metric_closed(2, r).unwrap().0),
        ("haar_case2_beta2", Integrand2x2::HaarCase2 { beta: 2.0 }, |r| intbreak_metric(r).0),
    ];
    let mut rows = Vec::new();
    for (k, (name, kind, closed)) in chains.into_iter().enumerate() {
        for r in [0.3, 1.0, 2.0] {
            let e = fs_mc_2x2(kind, r, m2, sub_seed(ctx.seed, 110 + k as u64))?;
            let q = integrate_fs_2x2(kind, r, &quad)?;
            let c = closed(r);
            let combined = (e.stderr * e.stderr + q.error * q.error).sqrt();
            ctx.push(Check::within(8, format!("{name}_mc_vs_reduced_r{r}"), e.mean, q.value, 3.0 * combined));
            ctx.push(Check::within(8, format!("{name}_mc_vs_closed_r{r}"), e.mean, c, 3.0 * e.stderr));
            ctx.push(Check::within(8, format!("{name}_reduced_vs_closed_r{r}"), q.value, c, 3.0 * q.error.max(1e-8 * c)));
            rows.push(vec![name.to_string(), num(r), num(e.mean), num(e.stderr), num(q.value), num(q.error), num(c)]);
        }
    }
    let header = ["chain", "r", "mc_mean", "mc_se", "reduced", "reduced_error", "closed"];
    ctx.run.csv("accept_2x2_chains.csv", &header, &rows)?;
    ctx.time(8, started, 300.0);

    // 10: large-N β-ensemble QMT, β = 2, γ = 0.5
    let rs = fig8_grid();
    let est = beta_family_sweep(256, 2.0, 0.5, &rs, 200, sub_seed(ctx.seed, 120))?;
    ctx.run.csv("accept_beta_qmt.csv", &QMT_HEADER, &qmt_rows(&est))?;
    let small: Vec<usize> = (0..rs.len()).filter(|&i| rs[i] <= 1.0).collect();
    let comps: [(&str, Vec<f64>); 3] = [
        ("grr", est.iter().map(|e| e.g_rr.mean).collect()),
        ("gpp", est.iter().map(|e| e.g_pp.mean).collect()),
        ("grp", est.iter().map(|e| e.g_rp.mean).collect()),
    ];
    for (name, v) in comps {
        let finite = v.iter().filter(|x| !x.is_finite()).count();
        ctx.push(Check::small(10, format!("{name}_finite_count_bad"), finite as f64, 0.0));
        let rises = v.windows(2).filter(|w| !(w[1] < w[0])).count();
        ctx.push(Check::small(10, format!("{name}_decreasing_violations"), rises as f64, 0.0));
        let xs: Vec<f64> = small.iter().map(|&i| rs[i]).collect();
        let ys: Vec<f64> = small.iter().map(|&i| v[i]).collect();
        let (slope, _) = power_law_fit(&xs, &ys);
        ctx.push(Check::below(10, format!("{name}_small_r_exponent"), slope, -0.5, 0.0));
    }
    Ok(())
}

fn geodesics(ctx: &mut Ctx) -> Result<(), CliError> {
    let mut worst = 0.0f64;
    for (k, l, a, r0) in [(1.0, 0.3, 1.0, 1.0), (0.7, 0.9, 3.5, 2.0), (2.0, 0.0, 31.5, 0.5), (1.0, 1.0, 10.0, 0.8)] {
        let c = GeodesicConstants { k, l, a };
        for b in [Branch::Growing, Branch::Decaying] {
            let lmax = gue_divergence_lambda(&c, r0, b)?;
            for i in 0..200 {
                let s = gue_geodesic_state(&c, r0, b, 0.9 * lmax * i as f64 / 199.0)?;
                if l == 0.0 && s.r < 1e-3 {
                    continue;
                }
                let [e1, e2] = gue_ode_residual(&s);
                worst = worst.max(e1.abs()).max(e2.abs());
            }
        }
    }
    ctx.push(Check::small(6, "gue_closed_form_ode_residual", worst, 1e-8));

    let opts = OdeOptions::default();
    let fig3 = GeodesicConstants::intbreak(caption_speed(1.0), 0.1);
    let mut rows = Vec::new();
    for (tag, theta0) in [("pi5", PI / 5.0), ("pi10", PI / 10.0), ("pi30", PI / 30.0)] {
        let tr = intbreak_geodesic(theta0, 0.0, &fig3, Branch::Growing, 50.0, &opts)?;
        ctx.push(Check::small(6, format!("fig3_{tag}_conservation"), tr.max_k_residual().max(tr.max_l_residual()), 1e-8));
        if tag == "pi5" {
            let top = tr.points.iter().fold(0.0f64, |a, p| a.max(p.theta));
            ctx.push(Check::above(6, "fig3_theta_max", top, FRAC_PI_2, 1e-2));
            rows = trajectory_rows(&tr);
        }
    }
    ctx.run.csv("accept_geodesic_fig3.csv", &TRAJECTORY_HEADER, &rows)?;

    let fig4 = GeodesicConstants::intbreak(caption_speed(0.1), 0.1);
    for (tag, theta0) in [("2pi5", 2.0 * PI / 5.0), ("pi3", FRAC_PI_3), ("pi4", FRAC_PI_4)] {
        let tr = intbreak_geodesic(theta0, 0.0, &fig4, Branch::Decaying, 50.0, &opts)?;
        ctx.push(Check::small(6, format!("fig4_{tag}_conservation"), tr.max_k_residual().max(tr.max_l_residual()), 1e-8));
        let end = tr.points.last().map(|p| p.lambda).unwrap_or(f64::NAN);
        ctx.push(Check::holds(6, format!("fig4_{tag}_reaches_theta0_at_lambda"), end, tr.stop == StopReason::ThetaLower && end.is_finite()));
        if tag == "pi3" {
            ctx.run.csv("accept_geodesic_fig4.csv", &TRAJECTORY_HEADER, &trajectory_rows(&tr))?;
        }
    }

    let mut worst = 0.0f64;
    for (k, l, a, r0, frac) in [(1.0, 0.4, 2.0, 1.2, 0.6), (0.5, 0.3, 7.5, 0.6, 0.8), (2.0, 1.5, 1.0, 3.0, 0.4)] {
        let c = GeodesicConstants { k, l, a };
        for b in [Branch::Growing, Branch::Decaying] {
            let lam1 = frac * gue_divergence_lambda(&c, r0, b)?;
            let speed = |x: f64| {
                let s = gue_geodesic_state(&c, r0, b, x).expect("inside the domain");
                let q = s.r * s.r + 1.0;
                (a / (q * q) * s.dr * s.dr + a * s.r * s.r / q * s.dphi * s.dphi).sqrt()
            };
            let len = tanh_sinh(|x, _, _| speed(x), 0.0, lam1, 1e-13).value;
            let p1 = gue_geodesic_state(&c, r0, b, lam1)?;
            let d = sphere_distance((1.0 / r0).atan(), 0.0, (1.0 / p1.r).atan(), p1.phi, a);
            worst = worst.max((d - len).abs());
        }
    }
    ctx.push(Check::small(6, "sphere_distance_vs_arclength", worst, 1e-6));
    Ok(())
}

fn correlators(ctx: &mut Ctx) -> Result<(), CliError> {
    let started = Instant::now();
    let (n, m, r) = (256, 100, 0.43);
    let t = log_grid(0.1, 50.0, 24);
    let s = correlator_series(n, r, &t, m, sub_seed(ctx.seed, 201), sub_seed(ctx.seed, 202))?;
    let gap = max_of((0..t.len()).map(|i| (s.g_mc[i] / s.g_exact[i] - 1.0).abs()));
    ctx.push(Check::small(3, "mc_vs_exact_max_rel", gap, 0.05));
    let rows: Vec<Vec<String>> = (0..t.len())
        .map(|i| vec![num(s.t[i]), num(s.g_mc[i]), num(s.g_mc_se[i]), num(s.g_exact[i]), num(s.g_free[i])])
        .collect();
    ctx.run.csv("accept_correlator.csv", &CORRELATOR_HEADER, &rows)?;

    // plateau: t√(r²+1) beyond the Heisenberg time 2N
    let a = (r * r + 1.0f64).sqrt();
    let tp = log_grid(4.0 * n as f64 / a, 16.0 * n as f64 / a, 5);
    let scaled: Vec<f64> = tp.iter().map(|x| x * a).collect();
    let variance = 1.0 / n as f64;
    let series = sff(&EnsembleSpec::gue(n).with_variance(variance), &scaled, m, sub_seed(ctx.seed, 203))?;
    let exact = correlator_exact(n, r, variance, &series, &tp)?;
    let free: Vec<f64> = tp.iter().map(|&x| correlator_free_unscaled(r, x)).collect();
    let worst = max_of(exact.iter().zip(&free).map(|(e, f)| (e - f).abs()));
    ctx.push(Check::small(3, "plateau_exact_vs_free_abs", worst, 2.0 / n as f64));
    let rows: Vec<Vec<String>> = (0..tp.len()).map(|i| vec![num(tp[i]), num(exact[i]), num(free[i])]).collect();
    ctx.run.csv("accept_plateau.csv", &["t", "G_exact", "G_free"], &rows)?;
    ctx.time(3, started, 300.0);
    Ok(())
}

fn gue16(seed: u64) -> rmtgeo::Result<HamiltonianFamily> {
    let g = EnsembleSpec::gue(16);
    build_family(&g, &g, None, SeedSpec::new(seed, 0))
}

fn curvature(ctx: &mut Ctx) -> Result<(), CliError> {
    let r = 1.0;
    let (mut e_fs, mut e_m1, mut e_sum, mut e_chi) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..8 {
        let fam = gue16(sub_seed(ctx.seed, 300 + k))?;
        let s = eigh(&fam.evaluate(r, 0.0))?;
        let v = fam.d_r(0.0);
        let ks = (0..16).map(|n| Ok(level_curvature(&s, &v, n)?.value)).collect::<rmtgeo::Result<Vec<f64>>>()?;
        e_sum = e_sum.max(ks.iter().sum::<f64>().abs() / ks.iter().map(|x| x.abs()).sum::<f64>());
        for n in 0..16 {
            let mo = spectral_moments(&s, &v, n, &[-2, -1])?;
            e_fs = e_fs.max(rel(mo[0].value, fs_per_state(&s, &v, n)?.value));
            e_m1 = e_m1.max(rel(mo[1].value, -ks[n]));
            e_chi = e_chi.max(rel(cauchy_chi(&s, &v, n, 0.0)?, ks[n]));
        }
    }
    ctx.push(Check::small(7, "moment_m2_equals_fs", e_fs, 1e-12));
    ctx.push(Check::small(7, "moment_m1_equals_minus_k", e_m1, 1e-12));
    ctx.push(Check::small(7, "curvature_sum_zero", e_sum, 1e-12));
    ctx.push(Check::small(7, "chi0_equals_k", e_chi, 1e-12));

    // finite-difference oracles on a fixed well-separated instance
    let fam = gue16(3)?;
    let level = |x: f64, n: usize| -> rmtgeo::Result<f64> { Ok(eigvalsh(&fam.evaluate(x, 0.0))?[n]) };
    let s = eigh(&fam.evaluate(r, 0.0))?;
    let v = fam.d_r(0.0);
    let (h2, h3) = (1e-4 * (1.0 + r), 1e-3 * (1.0 + r));
    let (mut e_k, mut e_l) = (0.0f64, 0.0f64);
    for n in 0..16 {
        let fd2 = 0.5 * (level(r + h2, n)? - 2.0 * level(r, n)? + level(r - h2, n)?) / (h2 * h2);
        e_k = e_k.max(rel(level_curvature(&s, &v, n)?.value, fd2));
        let e = |k: f64| level(r + k * h3, n);
        let d3 = (e(2.0)? - 2.0 * e(1.0)? + 2.0 * e(-1.0)? - e(-2.0)?) / (12.0 * h3 * h3 * h3);
        e_l = e_l.max(rel(third_derivative(&s, &v, n)?.value, d3));
    }
    ctx.push(Check::small(7, "curvature_vs_second_difference", e_k, 1e-5));
    ctx.push(Check::small(7, "third_derivative_vs_stencil", e_l, 1e-3));

    let mut rows = Vec::new();
    for beta in [2.0, 4.0] {
        for r in [0.5, 1.0, 2.0] {
            let est = curvature_mc(beta, r, 100_000, sub_seed(ctx.seed, 310))?;
            let k = curvature_closed(beta, r)?;
            ctx.push(Check::within(9, format!("beta{beta}_r{r}_3se"), est.upper.mean, k, 3.0 * est.upper.stderr));
            rows.push(vec![num(r), num(beta), num(est.upper.mean), num(est.upper.stderr), num(k)]);
        }
        let ratio = |r: f64| -> rmtgeo::Result<f64> { Ok(curvature_closed(beta, r)? / r.ln().abs()) };
        let (a, b) = (ratio(1e-3)?, ratio(1e-4)?);
        ctx.push(Check::small(9, format!("beta{beta}_log_divergence_stability"), (a / b - 1.0).abs(), 0.02));
    }
    ctx.run.csv("accept_curvature_mc.csv", &["r", "beta", "K2_mean", "K2_se", "K2_closed"], &rows)?;
    Ok(())
}
