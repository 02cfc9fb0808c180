//! Monte Carlo engine: Ginibre sampling, eigenvalues with bi-orthonormal
//! self-overlaps, the incomplete Schur frame of a complex GinOE eigenvalue,
//! perturbation experiments and seeded campaigns.
//!
//! Everything here runs in double precision.

mod campaign;
mod overlaps;
mod perturbation;
mod sampling;
mod schur_frame;

pub use campaign::{process_sample, run_campaign, run_campaign_streaming, Campaign, CampaignSummary, SampleOutcome};
pub use overlaps::{classify_eigenvalues, eigen_overlaps, Classification, EigenBasis, EigenOverlaps};
pub use perturbation::{perturbation_experiment, random_unit_perturbation, PerturbationResult};
pub use sampling::{sample_matrix, sample_rng, GinibreMatrix};
pub use schur_frame::{schur_cross_check, SchurFrame};

use serde::{Deserialize, Serialize};

use crate::linalg::LinalgError;
use crate::theory::{ComplexPoint, EnsembleKind};

/// Default cutoff on the condition number of the unit-column eigenvector matrix.
pub const DEFAULT_REJECT_THRESHOLD: f64 = 1e12;

/// Eigenvalues with `|Im z| ≤ REAL_AXIS_TOLERANCE·√N` count as real.
pub const REAL_AXIS_TOLERANCE: f64 = 1e-8;

/// Relative agreement required between the overlaps of a conjugate pair.
pub const PAIR_OVERLAP_TOLERANCE: f64 = 1e-6;

/// Campaigns whose rejection rate exceeds this fraction carry a warning.
pub const REJECTION_WARNING_RATE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub kind: EnsembleKind,
    pub n: usize,
    pub samples: usize,
    pub master_seed: u64,
    pub reject_threshold: f64,
}

impl EnsembleConfig {
    pub fn new(kind: EnsembleKind, n: usize, samples: usize, master_seed: u64) -> Self {
        Self { kind, n, samples, master_seed, reject_threshold: DEFAULT_REJECT_THRESHOLD }
    }

    pub fn with_reject_threshold(mut self, threshold: f64) -> Self {
        self.reject_threshold = threshold;
        self
    }

    pub fn validate(&self) -> Result<(), McError> {
        if self.n < 2 {
            return Err(McError::InvalidConfig(format!("n = {} (need n >= 2)", self.n)));
        }
        if self.samples < 1 {
            return Err(McError::InvalidConfig("samples = 0 (need at least one)".into()));
        }
        if !(self.reject_threshold > 1.0) {
            return Err(McError::InvalidConfig(format!(
                "reject_threshold = {} (need a finite value above 1)",
                self.reject_threshold
            )));
        }
        Ok(())
    }
}

/// One eigenvalue of one sampled matrix with its self-overlap `O_nn`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDatum {
    pub z: ComplexPoint<f64>,
    pub self_overlap: f64,
    pub is_real: bool,
    pub sample_index: u64,
    pub eigen_index: usize,
}

/// Why a sample was dropped from a campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectionReason {
    IllConditioned { condition: f64, threshold: f64 },
    Eigensolver { message: String },
    UnpairedEigenvalue { eigen_index: usize, z: ComplexPoint<f64> },
    PairOverlapMismatch { eigen_index: usize, partner: usize, relative_difference: f64 },
}

impl std::fmt::Display for RejectionReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RejectionReason::IllConditioned { condition, threshold } => {
                write!(f, "eigenvector condition number {condition:e} exceeds {threshold:e}")
            }
            RejectionReason::Eigensolver { message } => write!(f, "eigensolver failure: {message}"),
            RejectionReason::UnpairedEigenvalue { eigen_index, z } => {
                write!(f, "complex eigenvalue {} ({} + {}i) has no conjugate partner", eigen_index, z.re, z.im)
            }
            RejectionReason::PairOverlapMismatch { eigen_index, partner, relative_difference } => write!(
                f,
                "conjugate pair ({eigen_index}, {partner}) overlaps differ by {relative_difference:e} relative"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RejectionRecord {
    pub sample_index: u64,
    #[serde(flatten)]
    pub reason: RejectionReason,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum McError {
    #[error("invalid ensemble configuration: {0}")]
    InvalidConfig(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sample rejected: {0}")]
    Rejected(RejectionReason),
    #[error("eigenvalue tracking failed: {0}")]
    Tracking(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub(crate) fn domain(detail: impl Into<String>) -> McError {
    McError::Domain(detail.into())
}
