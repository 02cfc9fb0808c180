use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{io_at, CliError};
use crate::figure::FigureConfig;
use crate::sample::SampleConfig;
use crate::theory::TheoryConfig;
use crate::verify::VerifyConfig;

/// Fully resolved parameters of one command. Every run writes this next to
/// its output; `ginibre replay <file>` executes it again.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Sample(SampleConfig),
    Theory(TheoryConfig),
    Figure(FigureConfig),
    Verify(VerifyConfig),
}

impl RunConfig {
    pub fn run(&self) -> Result<(), CliError> {
        match self {
            RunConfig::Sample(c) => crate::sample::run(c),
            RunConfig::Theory(c) => crate::theory::run(c),
            RunConfig::Figure(c) => crate::figure::run(c),
            RunConfig::Verify(c) => crate::verify::run(c),
        }
    }

    /// Where the echoed config goes, if the command writes files.
    pub fn echo_path(&self) -> Option<PathBuf> {
        match self {
            RunConfig::Sample(c) => Some(sidecar(&c.out)),
            RunConfig::Theory(c) => Some(sidecar(&c.out)),
            RunConfig::Figure(c) => Some(c.out.join(format!("{}.config.json", c.figure.name()))),
            RunConfig::Verify(c) => c.out.as_deref().map(sidecar),
        }
    }

    pub fn write_echo(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| io_at(path, e))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| io_at(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| io_at(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: not a run config: {e}", path.display())))
    }
}

/// `run.jsonl` → `run.jsonl.config.json`.
pub fn sidecar(out: &Path) -> PathBuf {
    let mut s: OsString = out.as_os_str().to_owned();
    s.push(".config.json");
    s.into()
}
