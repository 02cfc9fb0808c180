use std::path::PathBuf;

use clap::Args;
use ginibre_core::io::RecordFile;
use ginibre_core::mc::{run_campaign, EnsembleConfig, DEFAULT_REJECT_THRESHOLD};
use ginibre_core::EnsembleKind;
use serde::{Deserialize, Serialize};

use crate::error::{io_at, usage, CliError};
use crate::parse_ensemble;

/// Sample matrices and store eigenvalues with their self-overlaps.
#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, value_parser = parse_ensemble)]
    pub ensemble: EnsembleKind,
    /// Matrix size.
    #[arg(long)]
    pub n: usize,
    /// Number of matrices.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record file (JSON lines).
    #[arg(long)]
    pub out: PathBuf,
    /// Drop matrices whose eigenvector condition number exceeds this.
    #[arg(long, default_value_t = DEFAULT_REJECT_THRESHOLD)]
    pub reject_threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub ensemble: EnsembleKind,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub reject_threshold: f64,
    pub out: PathBuf,
}

impl SampleConfig {
    pub fn ensemble_config(&self) -> EnsembleConfig {
        EnsembleConfig::new(self.ensemble, self.n, self.samples, self.seed).with_reject_threshold(self.reject_threshold)
    }
}

impl SampleArgs {
    pub fn resolve(self) -> Result<SampleConfig, CliError> {
        let config = SampleConfig {
            ensemble: self.ensemble,
            n: self.n,
            samples: self.samples as usize,
            seed: self.seed,
            reject_threshold: self.reject_threshold,
            out: self.out,
        };
        config.ensemble_config().validate().map_err(|e| usage(e.to_string()))?;
        Ok(config)
    }
}

pub fn run(config: &SampleConfig) -> Result<(), CliError> {
    let campaign = run_campaign(&config.ensemble_config()).map_err(|e| usage(e.to_string()))?;
    let s = &campaign.summary;
    if let Some(w) = &s.warning {
        eprintln!("warning: {w}");
    }
    RecordFile::from_campaign(&campaign).save(&config.out).map_err(|e| io_at(&config.out, e))?;
    eprintln!(
        "{} of {} matrices accepted, {} eigenvalues ({} real) written to {}",
        s.accepted,
        s.samples,
        s.records,
        s.real_records,
        config.out.display()
    );
    Ok(())
}
