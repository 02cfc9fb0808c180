use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mc::{
    classify_eigenvalues, eigen_overlaps, sample_matrix, EnsembleConfig, McError, RejectionReason, RejectionRecord,
    SpectralDatum, REJECTION_WARNING_RATE,
};
use crate::theory::EnsembleKind;

/// Result of processing one sampled matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleOutcome {
    Accepted(Vec<SpectralDatum>),
    Rejected(RejectionRecord),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub samples: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub records: usize,
    pub real_records: usize,
    pub complex_records: usize,
    pub rejection_rate: f64,
    pub elapsed_seconds: f64,
    pub warning: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Campaign {
    pub config: EnsembleConfig,
    /// Records ordered by `(sample_index, eigen_index)`.
    pub records: Vec<SpectralDatum>,
    pub rejections: Vec<RejectionRecord>,
    pub summary: CampaignSummary,
}

/// sample → eigen_overlaps → classify (GinOE) for one index.
pub fn process_sample(config: &EnsembleConfig, sample_index: u64) -> SampleOutcome {
    let reject = |reason| SampleOutcome::Rejected(RejectionRecord { sample_index, reason });
    let as_reason = |e: McError| match e {
        McError::Rejected(reason) => reason,
        other => RejectionReason::Eigensolver { message: other.to_string() },
    };
    let matrix = sample_matrix(config, sample_index);
    let overlaps = match eigen_overlaps(&matrix, config.reject_threshold) {
        Ok(o) => o,
        Err(e) => return reject(as_reason(e)),
    };
    let data = overlaps.to_data(sample_index);
    match config.kind {
        EnsembleKind::GinUE => SampleOutcome::Accepted(data),
        EnsembleKind::GinOE => match classify_eigenvalues(&data, config.n) {
            Ok(c) => SampleOutcome::Accepted(c.data),
            Err(e) => reject(as_reason(e)),
        },
    }
}

/// Runs the campaign, handing each sample's outcome to `sink` in sample
/// order. Samples are processed in parallel in fixed-size chunks, so the
/// sequence seen by `sink` does not depend on the number of worker threads.
pub fn run_campaign_streaming(
    config: &EnsembleConfig,
    mut sink: impl FnMut(u64, &SampleOutcome),
) -> Result<CampaignSummary, McError> {
    config.validate()?;
    let start = Instant::now();
    let chunk = 256u64;
    let total = config.samples as u64;
    let (mut accepted, mut rejected, mut records, mut real_records) = (0usize, 0usize, 0usize, 0usize);
    let mut first = 0u64;
    while first < total {
        let last = (first + chunk).min(total);
        let outcomes: Vec<SampleOutcome> = (first..last).into_par_iter().map(|i| process_sample(config, i)).collect();
        for (offset, outcome) in outcomes.iter().enumerate() {
            match outcome {
                SampleOutcome::Accepted(data) => {
                    accepted += 1;
                    records += data.len();
                    real_records += data.iter().filter(|d| d.is_real).count();
                }
                SampleOutcome::Rejected(r) => {
                    rejected += 1;
                    log::debug!("sample {} rejected: {}", r.sample_index, r.reason);
                }
            }
            sink(first + offset as u64, outcome);
        }
        first = last;
    }
    let rejection_rate = rejected as f64 / config.samples as f64;
    let warning = (rejection_rate > REJECTION_WARNING_RATE).then(|| {
        let msg = format!(
            "rejection rate {:.3}% exceeds {:.1}% ({} of {} samples)",
            100.0 * rejection_rate,
            100.0 * REJECTION_WARNING_RATE,
            rejected,
            config.samples
        );
        log::warn!("{msg}");
        msg
    });
    Ok(CampaignSummary {
        samples: config.samples,
        accepted,
        rejected,
        records,
        real_records,
        complex_records: records - real_records,
        rejection_rate,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        warning,
    })
}

/// Runs the whole campaign in memory.
pub fn run_campaign(config: &EnsembleConfig) -> Result<Campaign, McError> {
    let mut records = Vec::with_capacity(config.n * config.samples);
    let mut rejections = Vec::new();
    let summary = run_campaign_streaming(config, |_, outcome| match outcome {
        SampleOutcome::Accepted(data) => records.extend_from_slice(data),
        SampleOutcome::Rejected(r) => rejections.push(r.clone()),
    })?;
    Ok(Campaign { config: *config, records, rejections, summary })
}
