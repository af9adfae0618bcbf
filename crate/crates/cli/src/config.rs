use std::path::{Path, PathBuf};

use clap::Args;
use kfilter::EstimatorId;
use serde::{Deserialize, Serialize};

use crate::report::CliError;

pub const DEFAULT_OUT: &str = "kfilter-out";

/// Options shared by every subcommand. Anything left unset falls back to the
/// config file, then to the built-in default.
#[derive(Args, Clone, Debug, Default)]
pub struct SharedOpts {
    /// Rotation step of the SO(3) alphabet, radians.
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// lz78, lzw or dict_coder.
    #[arg(long, global = true)]
    pub estimator: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Noise amplitude: substitution probability for words, jitter std for paths.
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    #[arg(long = "memory-bits", global = true)]
    pub memory_bits: Option<f64>,
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    #[arg(long, global = true)]
    pub ctrl: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory; defaults to $KFILTER_OUT, then `kfilter-out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with any of the options above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub theta: Option<f64>,
    pub estimator: Option<String>,
    pub seed: Option<u64>,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    pub memory_bits: Option<f64>,
    pub degree: Option<usize>,
    pub ctrl: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new("config", format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::new("config", format!("{}: {e}", path.display())))
    }
}

/// Settings after merging flags, config file and defaults. Only the fields
/// that influence results are serialized, so the report hash ignores
/// `threads` and `out`.
#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub theta: f64,
    pub estimator: EstimatorId,
    pub seed: u64,
    pub sigma: Option<f64>,
    pub rho: f64,
    pub memory_bits: Option<f64>,
    pub degree: usize,
    pub ctrl: usize,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub out: PathBuf,
}

impl Settings {
    pub fn resolve(flags: &SharedOpts, env_out: Option<PathBuf>) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let estimator = flags
            .estimator
            .clone()
            .or(file.estimator)
            .map(|s| s.parse::<EstimatorId>())
            .transpose()
            .map_err(|e| CliError::new("config", e.to_string()))?
            .unwrap_or(EstimatorId::DictCoder);
        Ok(Self {
            theta: flags.theta.or(file.theta).unwrap_or(std::f64::consts::TAU / 100.0),
            estimator,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            sigma: flags.sigma.or(file.sigma),
            rho: flags.rho.or(file.rho).unwrap_or(kfilter::filters::DEFAULT_RHO),
            memory_bits: flags.memory_bits.or(file.memory_bits),
            degree: flags.degree.or(file.degree).unwrap_or(4),
            ctrl: flags.ctrl.or(file.ctrl).unwrap_or(16),
            threads: flags.threads.or(file.threads),
            out: flags
                .out
                .clone()
                .or(file.out)
                .or(env_out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        })
    }

    pub fn sigma_or(&self, default: f64) -> f64 {
        self.sigma.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "seed = 5\nrho = 6.0\nestimator = \"lzw\"\nout = \"from-file\"\n").unwrap();
        let flags = SharedOpts {
            seed: Some(9),
            config: Some(path),
            ..Default::default()
        };
        let s = Settings::resolve(&flags, Some("from-env".into())).unwrap();
        assert_eq!(s.seed, 9);
        assert_eq!(s.rho, 6.0);
        assert_eq!(s.estimator, EstimatorId::Lzw);
        assert_eq!(s.degree, 4);
        assert_eq!(s.out, PathBuf::from("from-file"));

        let s = Settings::resolve(&SharedOpts::default(), Some("from-env".into())).unwrap();
        assert_eq!(s.out, PathBuf::from("from-env"));
        assert_eq!(s.estimator, EstimatorId::DictCoder);
    }

    #[test]
    fn unknown_keys_and_estimators_fail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "sede = 5\n").unwrap();
        let flags = SharedOpts {
            config: Some(path),
            ..Default::default()
        };
        assert_eq!(Settings::resolve(&flags, None).unwrap_err().stage, "config");
        let flags = SharedOpts {
            estimator: Some("gzip".into()),
            ..Default::default()
        };
        assert!(Settings::resolve(&flags, None).is_err());
    }
}
