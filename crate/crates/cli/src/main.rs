use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use rmtgeo_cli::accept::{run_suite, Suite};
use rmtgeo_cli::config::{resolve, ConfigFile, Overrides};
use rmtgeo_cli::figures::{parse_id, run_figure};
use rmtgeo_cli::output::Run;
use rmtgeo_cli::verbs::{cmd_fs, cmd_geodesic, cmd_sample, cmd_sff, FsArgs, GeodesicArgs, SampleArgs, SffArgs};
use rmtgeo_cli::{with_threads, CliError};

/// Figure data, acceptance suites and module verbs for random-matrix state geometry.
///
/// Exit codes: 0 ok, 1 acceptance failure or runtime error, 2 usage error.
#[derive(Debug, Parser)]
#[command(name = "rmtgeo", version)]
struct Cli {
    /// master seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// worker threads; results do not depend on it
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// output directory [env: RMTGEO_OUT_DIR]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// caption-faithful sizes instead of desk-scale defaults
    #[arg(long, global = true)]
    paper_scale: bool,
    /// TOML config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Cmd {
    /// Write the data behind one figure (fig1 … fig12)
    Figure {
        id: String,
        #[arg(long = "N", alias = "n")]
        n: Option<usize>,
        #[arg(long = "M", alias = "m")]
        m: Option<usize>,
    },
    /// Run an acceptance suite: closed-forms, mc-vs-closed, geodesics, correlators, curvature or all
    Accept { suite: String },
    /// Dump sampled matrices
    Sample(SampleArgs),
    /// Spectral form factor of GUE
    Sff(SffArgs),
    /// One geodesic trajectory
    Geodesic(GeodesicArgs),
    /// Monte-Carlo metric components
    Fs(FsArgs),
}

/// `inputs` determine the outputs and are hashed; `environment` does not.
#[derive(Serialize)]
struct Snapshot<'a> {
    inputs: Inputs<'a>,
    environment: Environment<'a>,
}

#[derive(Serialize)]
struct Inputs<'a> {
    command: &'a Cmd,
    seed: u64,
    paper_scale: bool,
    overrides: Option<Overrides>,
}

#[derive(Serialize)]
struct Environment<'a> {
    out_dir: &'a std::path::Path,
    threads: usize,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let s = resolve(&file, cli.seed, cli.threads, cli.out_dir.clone(), cli.paper_scale)?;
    let snapshot = |overrides| {
        let inputs = Inputs { command: &cli.cmd, seed: s.seed, paper_scale: s.paper_scale, overrides };
        let environment = Environment { out_dir: &s.out_dir, threads: s.threads };
        serde_json::to_value(Snapshot { inputs, environment }).expect("serialisable")
    };
    let start = |stem: &str, name: &str, overrides| Run::new(&s.out_dir, stem, name, snapshot(overrides), s.seed, s.threads);
    match &cli.cmd {
        Cmd::Figure { id, n, m } => {
            let k = parse_id(id)?;
            let ov = Overrides { n: *n, m: *m }.or(file.figure(k));
            let mut run = start(id, &format!("figure {id}"), Some(ov))?;
            with_threads(s.threads, || run_figure(k, &s, ov, &mut run))??;
            report_outputs(run.finish()?);
            Ok(true)
        }
        Cmd::Accept { suite } => {
            let suites = if suite == "all" { Suite::ALL.to_vec() } else { vec![Suite::parse(suite)?] };
            let mut all = true;
            for su in suites {
                let mut run = start(&format!("accept_{}", su.name()), &format!("accept {}", su.name()), None)?;
                let rep = with_threads(s.threads, || run_suite(su, s.seed, &mut run))??;
                for c in &rep.checks {
                    let mark = if c.pass { "PASS" } else { "FAIL" };
                    println!("{mark} [{}] {} observed={:e} target={:e} tol={:e}", c.criterion, c.name, c.observed, c.target, c.tolerance);
                }
                for t in &rep.timing {
                    let mark = if t.pass { "PASS" } else { "FAIL" };
                    println!("{mark} [{}] runtime {:.1}s budget {:.0}s", t.criterion, t.seconds, t.budget_s);
                }
                println!("{} suite {}", if rep.pass { "PASS" } else { "FAIL" }, su.name());
                all &= rep.pass;
                run.finish()?;
            }
            Ok(all)
        }
        Cmd::Sample(a) => {
            let mut run = start("sample", "sample", None)?;
            cmd_sample(a, s.seed, &mut run)?;
            report_outputs(run.finish()?);
            Ok(true)
        }
        Cmd::Sff(a) => {
            let mut run = start("sff", "sff", None)?;
            with_threads(s.threads, || cmd_sff(a, s.seed, &mut run))??;
            report_outputs(run.finish()?);
            Ok(true)
        }
        Cmd::Geodesic(a) => {
            let mut run = start("geodesic", "geodesic", None)?;
            cmd_geodesic(a, &mut run)?;
            report_outputs(run.finish()?);
            Ok(true)
        }
        Cmd::Fs(a) => {
            let mut run = start("fs", "fs", None)?;
            with_threads(s.threads, || cmd_fs(a, s.seed, &mut run))??;
            report_outputs(run.finish()?);
            Ok(true)
        }
    }
}

fn report_outputs(m: rmtgeo_cli::output::RunManifest) {
    for o in &m.outputs {
        println!("{} {}", o.sha256, o.path);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("rmtgeo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
