//! Data series behind each figure.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI, SQRT_2};

use rmtgeo::correlators::correlator_series;
use rmtgeo::curvature::{curvature_closed, curvature_mc};
use rmtgeo::ensembles::EnsembleSpec;
use rmtgeo::geodesics::{
    intbreak_approx_constants, intbreak_geodesic, intbreak_r_approx, intbreak_theta_approx, Branch, GeodesicConstants,
    GeodesicTrajectory,
};
use rmtgeo::geometry::{
    fs_mc_2x2, gue_metric_closed, intbreak_metric, intbreak_ricci, qmt_mc_sweep, tridiag_beta_fs_closed, QmtEstimate,
    DEFAULT_PHI,
};
use rmtgeo::numerics::ode::OdeOptions;
use rmtgeo::numerics::{integrate_curvature_2x2, integrate_fs_2x2, Integrand2x2, QuadratureSpec};
use rmtgeo::spectra::log_grid;

use crate::config::{Overrides, Settings};
use crate::output::{num, opt, Run};
use crate::{sub_seed, CliError};

pub const QMT_HEADER: [&str; 10] =
    ["r", "phi", "grr_mean", "grr_se", "gpp_mean", "gpp_se", "grp_mean", "grp_se", "M", "rejected"];
pub const TRAJECTORY_HEADER: [&str; 6] = ["lambda", "theta", "r", "phi", "L_residual", "K_residual"];
pub const CORRELATOR_HEADER: [&str; 5] = ["t", "G_mc", "G_mc_se", "G_exact", "G_free"];

/// Captions quote K̃ as the conserved g(ẋ, ẋ); the integrator takes its square root.
pub fn caption_speed(k_tilde: f64) -> f64 {
    k_tilde.sqrt()
}

pub fn parse_id(id: &str) -> Result<u8, CliError> {
    id.strip_prefix("fig")
        .and_then(|s| s.parse::<u8>().ok())
        .filter(|k| (1..=12).contains(k))
        .ok_or_else(|| CliError::Usage(format!("unknown figure id `{id}`, expected fig1 … fig12")))
}

struct Scale {
    paper: bool,
    ov: Overrides,
}

impl Scale {
    fn n(&self, desk: usize, paper: usize) -> usize {
        self.ov.n.unwrap_or(if self.paper { paper } else { desk })
    }

    fn m(&self, desk: usize, paper: usize) -> usize {
        self.ov.m.unwrap_or(if self.paper { paper } else { desk })
    }
}

pub fn trajectory_rows(tr: &GeodesicTrajectory) -> Vec<Vec<String>> {
    tr.points
        .iter()
        .map(|p| vec![num(p.lambda), num(p.theta), num(p.r), num(p.phi), num(p.l_residual), num(p.k_residual)])
        .collect()
}

pub fn qmt_rows(est: &[QmtEstimate]) -> Vec<Vec<String>> {
    est.iter()
        .map(|e| {
            vec![
                num(e.r),
                num(e.phi),
                num(e.g_rr.mean),
                num(e.g_rr.stderr),
                num(e.g_pp.mean),
                num(e.g_pp.stderr),
                num(e.g_rp.mean),
                num(e.g_rp.stderr),
                e.realizations.to_string(),
                e.rejected_degenerate.to_string(),
            ]
        })
        .collect()
}

/// Large-N QMT family: H0 from the tridiagonal ensemble with index γ,
/// H1 and H2 from the one with index β.
pub fn beta_family_sweep(n: usize, beta: f64, gamma: f64, rs: &[f64], m: usize, seed: u64) -> rmtgeo::Result<Vec<QmtEstimate>> {
    let h0 = EnsembleSpec::tridiagonal(n, gamma);
    let h1 = EnsembleSpec::tridiagonal(n, beta);
    qmt_mc_sweep(&h0, &h1, Some(&h1), rs, DEFAULT_PHI, m, seed)
}

pub fn fig8_grid() -> Vec<f64> {
    log_grid(0.01, 10.0, 10)
}

fn ode() -> OdeOptions {
    OdeOptions::default()
}

/// Writes the CSVs of figure `id` into `run`.
pub fn run_figure(id: u8, s: &Settings, ov: Overrides, run: &mut Run) -> Result<(), CliError> {
    let sc = Scale { paper: s.paper_scale, ov };
    let seed = s.seed;
    let quad = QuadratureSpec::default();
    match id {
        1 => {
            // caption: N = 1000, r = 0.43, 100 realisations
            let (n, m) = (sc.n(256, 1000), sc.m(100, 100));
            let t = log_grid(0.05, 8.0 * n as f64, 80);
            let c = correlator_series(n, 0.43, &t, m, sub_seed(seed, 1), sub_seed(seed, 2))?;
            let rows = (0..t.len())
                .map(|i| vec![num(c.t[i]), num(c.g_mc[i]), num(c.g_mc_se[i]), num(c.g_exact[i]), num(c.g_free[i])])
                .collect::<Vec<_>>();
            run.csv("fig1_correlator.csv", &CORRELATOR_HEADER, &rows)?;
        }
        2 => {
            let mut rs = vec![0.0];
            rs.extend(log_grid(0.01, 100.0, 121));
            let rows: Vec<Vec<String>> =
                rs.iter().map(|&r| vec![num(r), num((SQRT_2 / r).atan()), num(intbreak_ricci(r))]).collect();
            run.csv("fig2_ricci.csv", &["r", "theta", "ricci"], &rows)?;
        }
        3 => {
            // caption: K̃ = 1, L̃ = 0.1, growing
            let c = GeodesicConstants::intbreak(caption_speed(1.0), 0.1);
            for (tag, theta0) in [("pi5", PI / 5.0), ("pi10", PI / 10.0), ("pi30", PI / 30.0)] {
                let tr = intbreak_geodesic(theta0, 0.0, &c, Branch::Growing, 3.0, &ode())?;
                run.csv(&format!("fig3_theta0_{tag}.csv"), &TRAJECTORY_HEADER, &trajectory_rows(&tr))?;
            }
        }
        4 => {
            // caption: K̃ = 0.1, L̃ = 0.1, decaying
            let c = GeodesicConstants::intbreak(caption_speed(0.1), 0.1);
            for (tag, theta0) in [("2pi5", 2.0 * PI / 5.0), ("pi3", FRAC_PI_3), ("pi4", FRAC_PI_4)] {
                let tr = intbreak_geodesic(theta0, 0.0, &c, Branch::Decaying, 50.0, &ode())?;
                run.csv(&format!("fig4_theta0_{tag}.csv"), &TRAJECTORY_HEADER, &trajectory_rows(&tr))?;
            }
        }
        5 => {
            // caption: K̃ = 0.1, L̃ = 0.1, θ0 = π/3
            let (k, l, theta0) = (caption_speed(0.1), 0.1, FRAC_PI_3);
            let tr = intbreak_geodesic(theta0, 0.0, &GeodesicConstants::intbreak(k, l), Branch::Decaying, 50.0, &ode())?;
            let (a1, _) = intbreak_approx_constants(k, l)?;
            let end = tr.points.last().map(|p| p.lambda + p.theta / a1).unwrap_or(0.0);
            let rows = tr
                .points
                .iter()
                .map(|p| {
                    Ok(vec![num(p.lambda), num(p.theta), num(intbreak_theta_approx(theta0, k, l, p.lambda)?), num(a1 * (end - p.lambda))])
                })
                .collect::<rmtgeo::Result<Vec<_>>>()?;
            run.csv("fig5_theta_approx.csv", &["lambda", "theta_numeric", "theta_approx", "theta_linear"], &rows)?;
        }
        6 => {
            // caption: K̃ = 0.1, L̃ = 0.1, r0 ∈ {√(2/3), √2}
            let (k, l) = (caption_speed(0.1), 0.1);
            for (tag, r0) in [("sqrt2over3", (2.0f64 / 3.0).sqrt()), ("sqrt2", SQRT_2)] {
                let theta0 = (SQRT_2 / r0).atan();
                let tr = intbreak_geodesic(theta0, 0.0, &GeodesicConstants::intbreak(k, l), Branch::Decaying, 50.0, &ode())?;
                let rows = tr
                    .points
                    .iter()
                    .map(|p| Ok(vec![num(p.lambda), num(p.r), num(intbreak_r_approx(theta0, k, l, p.lambda)?)]))
                    .collect::<rmtgeo::Result<Vec<_>>>()?;
                run.csv(&format!("fig6_r0_{tag}.csv"), &["lambda", "r_numeric", "r_approx"], &rows)?;
            }
        }
        7 => {
            let rows = (1..=200)
                .map(|k| {
                    let r = k as f64 / 20.0;
                    Ok(vec![num(r), num(tridiag_beta_fs_closed(2.0, r)?), num(tridiag_beta_fs_closed(3.0, r)?), num(tridiag_beta_fs_closed(5.0, r)?)])
                })
                .collect::<rmtgeo::Result<Vec<_>>>()?;
            run.csv("fig7_closed.csv", &["r", "beta2", "beta3", "beta5"], &rows)?;
            let m = sc.m(20_000, 100_000);
            let mut mc = Vec::new();
            for beta in [2.0, 3.0, 5.0] {
                let kind = Integrand2x2::TridiagBeta { beta };
                for r in [0.25, 0.5, 1.0, 2.0, 4.0] {
                    let e = fs_mc_2x2(kind, r, m, sub_seed(seed, 7))?;
                    let q = integrate_fs_2x2(kind, r, &quad)?;
                    mc.push(vec![num(r), num(beta), num(e.mean), num(e.stderr), num(q.value), m.to_string()]);
                }
            }
            run.csv("fig7_mc.csv", &["r", "beta", "grr_mean", "grr_se", "grr_reduced", "M"], &mc)?;
        }
        8 => {
            // caption: N = 1000, 1000 realisations; (β, γ) = (2, 0.5) and (3, 0.2)
            let (n, m) = (sc.n(256, 1000), sc.m(200, 1000));
            for (tag, beta, gamma) in [("beta2_gamma0.5", 2.0, 0.5), ("beta3_gamma0.2", 3.0, 0.2)] {
                let est = beta_family_sweep(n, beta, gamma, &fig8_grid(), m, sub_seed(seed, 8))?;
                run.csv(&format!("fig8_{tag}.csv"), &QMT_HEADER, &qmt_rows(&est))?;
            }
        }
        9 | 10 => {
            // fig9: η = 1; fig10: η = 1/2
            let eta = if id == 9 { 1.0 } else { 0.5 };
            let kind = Integrand2x2::InvariantEta { eta, variance: 0.5 };
            let m = sc.m(20_000, 100_000);
            let rows = log_grid(0.1, 10.0, 21)
                .into_iter()
                .map(|r| {
                    let e = fs_mc_2x2(kind, r, m, sub_seed(seed, id as u64))?;
                    let q = integrate_fs_2x2(kind, r, &quad).ok().filter(|q| q.achieved).map(|q| q.value);
                    Ok(vec![num(r), num(e.mean), num(e.stderr), opt(q), num(0.1 / (r * r)), num(intbreak_metric(r).0), m.to_string()])
                })
                .collect::<rmtgeo::Result<Vec<_>>>()?;
            let header = ["r", "grr_mean", "grr_se", "grr_reduced", "ref_inverse_square", "grr_intbreak", "M"];
            run.csv(&format!("fig{id}_eta.csv"), &header, &rows)?;
        }
        11 => {
            let m = sc.m(20_000, 100_000);
            let mut rows = Vec::new();
            for beta in [1.0, 2.0, 4.0] {
                for r in log_grid(1e-2, 10.0, 16) {
                    let e = curvature_mc(beta, r, m, sub_seed(seed, 11))?;
                    let closed = curvature_closed(beta, r).ok();
                    let q = integrate_curvature_2x2(beta, r, &quad).ok().filter(|q| q.achieved).map(|q| q.value);
                    let fs = (beta == 2.0).then(|| intbreak_metric(r).0);
                    rows.push(vec![num(r), num(beta), num(e.upper.mean), num(e.upper.stderr), opt(closed), opt(q), opt(fs)]);
                }
            }
            let header = ["r", "beta", "K2_mean", "K2_se", "K2_closed", "K2_reduced", "fs_beta2"];
            run.csv("fig11_curvature.csv", &header, &rows)?;
        }
        12 => {
            let m = sc.m(20_000, 100_000);
            for case in [1u8, 2] {
                let mut rows = Vec::new();
                for beta in [1.0, 2.0, 3.0, 5.0] {
                    let kind = if case == 1 { Integrand2x2::HaarCase1 { beta } } else { Integrand2x2::HaarCase2 { beta } };
                    for r in log_grid(0.1, 10.0, 13) {
                        let e = fs_mc_2x2(kind, r, m, sub_seed(seed, 12))?;
                        let q = integrate_fs_2x2(kind, r, &quad).ok().filter(|q| q.achieved).map(|q| q.value);
                        let reference = if case == 1 { gue_metric_closed(2, r)?.0 } else { intbreak_metric(r).0 };
                        rows.push(vec![num(r), num(beta), num(e.mean), num(e.stderr), opt(q), num(reference), m.to_string()]);
                    }
                }
                let header = ["r", "beta", "grr_mean", "grr_se", "grr_reduced", "grr_reference", "M"];
                run.csv(&format!("fig12_case{case}.csv"), &header, &rows)?;
            }
        }
        _ => return Err(CliError::Usage(format!("unknown figure id fig{id}"))),
    }
    Ok(())
}
