//! Config file: TOML with a `[run]` section and one optional section per
//! figure. Flags override file values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 2024;
pub const OUT_DIR_ENV: &str = "RMTGEO_OUT_DIR";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub paper_scale: Option<bool>,
}

/// Per-figure size overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub n: Option<usize>,
    pub m: Option<usize>,
}

impl Overrides {
    /// `self` wins field by field.
    pub fn or(self, other: Overrides) -> Overrides {
        Overrides { n: self.n.or(other.n), m: self.m.or(other.m) }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub run: RunSection,
    pub fig1: Option<Overrides>,
    pub fig2: Option<Overrides>,
    pub fig3: Option<Overrides>,
    pub fig4: Option<Overrides>,
    pub fig5: Option<Overrides>,
    pub fig6: Option<Overrides>,
    pub fig7: Option<Overrides>,
    pub fig8: Option<Overrides>,
    pub fig9: Option<Overrides>,
    pub fig10: Option<Overrides>,
    pub fig11: Option<Overrides>,
    pub fig12: Option<Overrides>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn figure(&self, id: u8) -> Overrides {
        let f = match id {
            1 => self.fig1,
            2 => self.fig2,
            3 => self.fig3,
            4 => self.fig4,
            5 => self.fig5,
            6 => self.fig6,
            7 => self.fig7,
            8 => self.fig8,
            9 => self.fig9,
            10 => self.fig10,
            11 => self.fig11,
            12 => self.fig12,
            _ => None,
        };
        f.unwrap_or_default()
    }
}

/// Resolved run settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub seed: u64,
    pub threads: usize,
    pub out_dir: PathBuf,
    pub paper_scale: bool,
}

/// Flag > config file > environment (out dir only) > default.
pub fn resolve(
    file: &ConfigFile,
    seed: Option<u64>,
    threads: Option<usize>,
    out_dir: Option<PathBuf>,
    paper_scale: bool,
) -> Result<Settings, CliError> {
    let threads = threads
        .or(file.run.threads)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if threads == 0 {
        return Err(CliError::Usage("threads must be at least 1".into()));
    }
    let out_dir = out_dir
        .or_else(|| file.run.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("rmtgeo-out"));
    Ok(Settings {
        seed: seed.or(file.run.seed).unwrap_or(DEFAULT_SEED),
        threads,
        out_dir,
        paper_scale: paper_scale || file.run.paper_scale.unwrap_or(false),
    })
}
