//! Thin verbs over the library modules.

use clap::{Args, ValueEnum};
use serde::Serialize;

use rmtgeo::ensembles::{sample, EnsembleSpec};
use rmtgeo::geodesics::{gue_divergence_lambda, gue_trajectory, intbreak_geodesic, Branch, GeodesicConstants};
use rmtgeo::geometry::{fs_mc_2x2, qmt_mc_sweep};
use rmtgeo::numerics::ode::OdeOptions;
use rmtgeo::numerics::Integrand2x2;
use rmtgeo::prng::SeedSpec;
use rmtgeo::spectra::{log_grid, sff};

use crate::figures::{caption_speed, qmt_rows, trajectory_rows, QMT_HEADER, TRAJECTORY_HEADER};
use crate::output::{num, Run};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFamily {
    Gue,
    Diagonal,
    Tridiagonal,
    Eta,
    Haar,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value = "gue")]
    pub family: SampleFamily,
    #[arg(long = "N", alias = "n", default_value_t = 4)]
    pub n: usize,
    /// σ²; ensemble default when omitted
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    /// number of realisations
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

pub fn cmd_sample(a: &SampleArgs, seed: u64, run: &mut Run) -> Result<(), CliError> {
    let mut spec = match a.family {
        SampleFamily::Gue => EnsembleSpec::gue(a.n),
        SampleFamily::Diagonal => EnsembleSpec::diagonal(a.n),
        SampleFamily::Tridiagonal => EnsembleSpec::tridiagonal(a.n, a.beta),
        SampleFamily::Eta => EnsembleSpec::eta(a.eta),
        SampleFamily::Haar => EnsembleSpec::haar_beta(a.beta),
    };
    if let Some(v) = a.variance {
        spec = spec.with_variance(v);
    }
    spec.validate()?;
    let mut rows = Vec::new();
    for k in 0..a.count {
        let h = sample(&spec, &mut SeedSpec::new(seed, k as u64).slot(0))?.to_dense();
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                rows.push(vec![k.to_string(), i.to_string(), j.to_string(), num(h[(i, j)].re), num(h[(i, j)].im)]);
            }
        }
    }
    run.csv("sample.csv", &["realization", "row", "col", "re", "im"], &rows)?;
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SffArgs {
    #[arg(long = "N", alias = "n", default_value_t = 256)]
    pub n: usize,
    #[arg(long = "M", alias = "m", default_value_t = 100)]
    pub m: usize,
    /// GUE σ²; 1/N when omitted
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
}

pub fn cmd_sff(a: &SffArgs, seed: u64, run: &mut Run) -> Result<(), CliError> {
    if !(a.t_min > 0.0 && a.t_max > a.t_min) || a.points == 0 {
        return Err(CliError::Usage("need 0 < t-min < t-max and points >= 1".into()));
    }
    let spec = EnsembleSpec::gue(a.n).with_variance(a.variance.unwrap_or(1.0 / a.n as f64));
    spec.validate()?;
    let s = sff(&spec, &log_grid(a.t_min, a.t_max, a.points), a.m, seed)?;
    let rows: Vec<Vec<String>> = (0..s.t.len())
        .map(|i| vec![num(s.t[i]), num(s.mean[i]), num(s.stderr[i]), s.realizations.to_string()])
        .collect();
    run.csv("sff.csv", &["t", "R_mean", "R_stderr", "M"], &rows)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeodesicFamily {
    Gue,
    Intbreak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchArg {
    Growing,
    Decaying,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GeodesicArgs {
    #[arg(long, value_enum, default_value = "intbreak")]
    pub family: GeodesicFamily,
    /// conserved K̃; for intbreak the value of g(ẋ, ẋ) as quoted in the captions
    #[arg(long = "K", alias = "k", default_value_t = 0.1)]
    pub k: f64,
    #[arg(long = "L", alias = "l", default_value_t = 0.1)]
    pub l: f64,
    #[arg(long, value_enum, default_value = "decaying")]
    pub branch: BranchArg,
    /// intbreak initial θ
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_3)]
    pub theta0: f64,
    /// gue initial r
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    /// gue dimension; A = (N − 1)/2
    #[arg(long = "N", alias = "n", default_value_t = 2)]
    pub n: usize,
    /// defaults to 50 for intbreak and 0.99 of the divergence for gue
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// gue output points
    #[arg(long, default_value_t = 400)]
    pub points: usize,
}

pub fn cmd_geodesic(a: &GeodesicArgs, run: &mut Run) -> Result<(), CliError> {
    let branch = match a.branch {
        BranchArg::Growing => Branch::Growing,
        BranchArg::Decaying => Branch::Decaying,
    };
    let tr = match a.family {
        GeodesicFamily::Intbreak => {
            if !(a.k > 0.0) {
                return Err(CliError::Usage(format!("K must be > 0, got {}", a.k)));
            }
            let c = GeodesicConstants::intbreak(caption_speed(a.k), a.l);
            intbreak_geodesic(a.theta0, 0.0, &c, branch, a.lambda_max.unwrap_or(50.0), &OdeOptions::default())?
        }
        GeodesicFamily::Gue => {
            let c = GeodesicConstants::gue(a.n, a.k, a.l);
            let end = match a.lambda_max {
                Some(x) => x,
                None => 0.99 * gue_divergence_lambda(&c, a.r0, branch)?,
            };
            let steps = a.points.max(2);
            let lambdas: Vec<f64> = (0..steps).map(|i| end * i as f64 / (steps - 1) as f64).collect();
            gue_trajectory(&c, a.r0, branch, &lambdas)?
        }
    };
    run.csv("geodesic.csv", &TRAJECTORY_HEADER, &trajectory_rows(&tr))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FsFamily {
    /// H0, H1, H2 all GUE(N)
    Gue,
    /// 2×2: H0 diagonal, H1, H2 GUE
    Intbreak,
    /// H0 tridiagonal with index γ, H1, H2 tridiagonal with index β
    Beta,
    /// 2×2 tridiagonal β perturbation, g_rr only
    Tridiag2,
    /// 2×2 η-ensemble perturbation, g_rr only
    Eta,
    /// 2×2 Haar Case 1, g_rr only
    Haar1,
    /// 2×2 Haar Case 2, g_rr only
    Haar2,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FsArgs {
    #[arg(long, value_enum, default_value = "gue")]
    pub family: FsFamily,
    #[arg(long = "N", alias = "n", default_value_t = 64)]
    pub n: usize,
    /// comma-separated r values
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub r: Vec<f64>,
    #[arg(long = "M", alias = "m", default_value_t = 500)]
    pub m: usize,
    #[arg(long, default_value_t = std::f64::consts::PI / 7.0)]
    pub phi: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
}

pub fn cmd_fs(a: &FsArgs, seed: u64, run: &mut Run) -> Result<(), CliError> {
    let kind = match a.family {
        FsFamily::Gue | FsFamily::Intbreak | FsFamily::Beta => None,
        FsFamily::Tridiag2 => Some(Integrand2x2::TridiagBeta { beta: a.beta }),
        FsFamily::Eta => Some(Integrand2x2::InvariantEta { eta: a.eta, variance: 0.5 }),
        FsFamily::Haar1 => Some(Integrand2x2::HaarCase1 { beta: a.beta }),
        FsFamily::Haar2 => Some(Integrand2x2::HaarCase2 { beta: a.beta }),
    };
    let rows = match kind {
        Some(kind) => a
            .r
            .iter()
            .map(|&r| {
                let e = fs_mc_2x2(kind, r, a.m, seed)?;
                let blank = String::new();
                Ok(vec![num(r), blank.clone(), num(e.mean), num(e.stderr), blank.clone(), blank.clone(), blank.clone(), blank, a.m.to_string(), "0".into()])
            })
            .collect::<rmtgeo::Result<Vec<_>>>()?,
        None => {
            let (h0, h1) = match a.family {
                FsFamily::Gue => (EnsembleSpec::gue(a.n), EnsembleSpec::gue(a.n)),
                FsFamily::Intbreak => (EnsembleSpec::diagonal(2), EnsembleSpec::gue(2)),
                _ => (EnsembleSpec::tridiagonal(a.n, a.gamma), EnsembleSpec::tridiagonal(a.n, a.beta)),
            };
            qmt_rows(&qmt_mc_sweep(&h0, &h1, Some(&h1), &a.r, a.phi, a.m, seed)?)
        }
    };
    run.csv("fs.csv", &QMT_HEADER, &rows)?;
    Ok(())
}
