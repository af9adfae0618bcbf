use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::Settings;

pub const TOOL: &str = "kfilter";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliError {
    pub stage: String,
    pub message: String,
}

impl CliError {
    pub fn new(stage: &str, message: impl Into<String>) -> Self {
        Self {
            stage: stage.to_string(),
            message: message.into(),
        }
    }

    /// Tags a library error with the stage that raised it.
    pub fn at(stage: &'static str) -> impl Fn(kfilter::Error) -> CliError {
        move |e| CliError::new(stage, e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.stage, self.message)
    }
}

/// What every output carries besides its payload.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub estimator_version: &'static str,
    pub seed: u64,
    pub config_hash: String,
    pub config: Value,
}

impl Meta {
    pub fn new(command: &str, settings: &Settings, args: &impl Serialize) -> Self {
        let config = json!({ "settings": settings, "args": args });
        let digest = Sha256::digest(format!("{command}\n{config}").as_bytes());
        Self {
            tool: TOOL,
            tool_version: TOOL_VERSION,
            command: command.to_string(),
            estimator_version: settings.estimator.version(),
            seed: settings.seed,
            config_hash: digest.iter().map(|b| format!("{b:02x}")).collect(),
            config,
        }
    }

    /// One-line form for comment headers in text outputs.
    pub fn comment(&self, prefix: &str) -> String {
        format!(
            "{prefix} {} {} estimator {} seed {} config {}\n",
            self.tool, self.tool_version, self.estimator_version, self.seed, self.config_hash
        )
    }

    pub fn success(&self, result: impl Serialize) -> Value {
        json!({ "meta": self, "result": result })
    }

    pub fn failure(&self, err: &CliError) -> Value {
        json!({ "meta": self, "error": err })
    }
}

pub struct Outputs {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::new("output", format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        std::fs::write(&path, contents).map_err(|e| CliError::new("output", format!("{}: {e}", path.display())))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::new("output", e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }
}
