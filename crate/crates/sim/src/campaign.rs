//! Monte-Carlo campaign: one independent task per `(snr, trial)`.

use std::time::Instant;

use gfdm_core::channel::{draw_impairments, synthesize_at_snr};
use gfdm_core::crlb::crlb_cfo;
use gfdm_core::estimator::{assemble_equivalent_channels, estimate_frame};
use gfdm_core::frame::draw_frame_truth;
use gfdm_core::{DetectionOperators, Detector, ReceivedFrame};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{CampaignConfig, Mode, Prepared};
use crate::error::{Result, SimError};
use crate::metrics::{count_bit_errors, is_outage, mse_cfo, mse_channel_iq, outage_probability};
use crate::seed::child_seed;

/// Relative singular-value cutoff of the detector.
pub const DETECTOR_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub snr_db: f64,
    pub trial: usize,
    pub mode: Mode,
    /// `None` when the trial failed.
    pub mse_cfo: Option<f64>,
    pub mse_channel_iq: Option<f64>,
    pub ber: Option<f64>,
    pub outage: bool,
    pub crlb_cfo: Option<f64>,
    pub seed: u64,
    pub wall_ms: f64,
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub snr_db: f64,
    pub mode: Mode,
    pub trials: usize,
    pub failed: usize,
    /// Means over the trials that did not fail.
    pub mse_cfo: Option<f64>,
    pub mse_channel_iq: Option<f64>,
    pub ber: Option<f64>,
    pub outage: f64,
    pub crlb_cfo: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CampaignOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

impl CampaignOutput {
    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| r.failed()).count()
    }

    /// Error when more than 10 % of the rows failed.
    pub fn check_failures(&self) -> Result<()> {
        let (failed, total) = (self.failed(), self.records.len());
        if failed * 10 > total {
            Err(SimError::TooManyFailures { failed, total })
        } else {
            Ok(())
        }
    }
}

pub struct Campaign {
    pub config: CampaignConfig,
    pub prepared: Prepared,
}

impl Campaign {
    pub fn new(config: CampaignConfig) -> Result<Self> {
        let prepared = config.prepare()?;
        Ok(Self { config, prepared })
    }

    pub fn seed(&self, snr_index: usize, trial: usize) -> u64 {
        child_seed(self.config.master_seed, snr_index, trial)
    }

    /// The frame of `(snr_index, trial)`, identical to the one `run` uses.
    pub fn frame(&self, snr_index: usize, trial: usize) -> Result<ReceivedFrame<f64>> {
        let p = &self.prepared;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed(snr_index, trial));
        let users = draw_impairments(&p.link.config, &p.ranges, &mut rng);
        let truth = draw_frame_truth(&p.link, users, &p.layout, &mut rng)?;
        let snr = self.config.snr_db[snr_index];
        let snr = if snr.is_finite() { Some(snr) } else { None };
        Ok(synthesize_at_snr(&p.link, truth, snr, &mut rng)?)
    }

    /// CRLB of the mean CFO for one frame, `None` without noise.
    pub fn crlb(&self, frame: &ReceivedFrame<f64>) -> Result<Option<f64>> {
        if frame.sigma2 <= 0.0 {
            return Ok(None);
        }
        Ok(Some(crlb_cfo(&self.prepared.link, &frame.truth, frame.sigma2)?))
    }

    pub fn run_trial(&self, snr_index: usize, trial: usize) -> Vec<TrialRecord> {
        let seed = self.seed(snr_index, trial);
        let snr_db = self.config.snr_db[snr_index];
        let blank = |mode: Mode, error: String| TrialRecord {
            snr_db,
            trial,
            mode,
            mse_cfo: None,
            mse_channel_iq: None,
            ber: None,
            outage: true,
            crlb_cfo: None,
            seed,
            wall_ms: 0.0,
            error: Some(error),
        };
        let frame = match self.frame(snr_index, trial) {
            Ok(f) => f,
            Err(e) => return self.config.modes.iter().map(|&m| blank(m, e.to_string())).collect(),
        };
        // A singular FIM leaves the column empty without failing the trial.
        let crlb = if self.config.crlb { self.crlb(&frame).ok().flatten() } else { None };
        self.config
            .modes
            .iter()
            .map(|&mode| {
                let start = Instant::now();
                let outcome = self.evaluate(mode, &frame);
                let wall_ms = if self.config.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
                match outcome {
                    Ok(m) => TrialRecord {
                        snr_db,
                        trial,
                        mode,
                        mse_cfo: Some(m.mse_cfo),
                        mse_channel_iq: Some(m.mse_channel_iq),
                        ber: Some(m.ber),
                        outage: is_outage(Some(m.ber), self.config.outage_threshold),
                        crlb_cfo: crlb,
                        seed,
                        wall_ms,
                        error: None,
                    },
                    Err(e) => TrialRecord {
                        crlb_cfo: crlb,
                        wall_ms,
                        ..blank(mode, e.to_string())
                    },
                }
            })
            .collect()
    }

    fn evaluate(&self, mode: Mode, frame: &ReceivedFrame<f64>) -> Result<TrialMetrics> {
        let p = &self.prepared;
        let link = &p.link;
        let truth = &frame.truth;
        let (ops, mse_phi, mse_h) = match mode {
            Mode::Genie => (DetectionOperators::genie(link, truth)?, 0.0, 0.0),
            Mode::Jcciqe => {
                let est = estimate_frame(link, &frame.y, &p.layout, &p.estimator)?;
                let phis: Vec<f64> = est.users.iter().map(|u| u.phi).collect();
                let true_phis: Vec<f64> = truth.users.iter().map(|u| u.phi).collect();
                let true_h: Vec<_> = truth.users.iter().map(|u| (u.h_source(), u.h_image())).collect();
                let mse_h = mse_channel_iq(&assemble_equivalent_channels(&est), &true_h);
                (DetectionOperators::from_estimate(link, &est)?, mse_cfo(&phis, &true_phis), mse_h)
            }
        };
        let detector = Detector::new(&ops, DETECTOR_CUTOFF)?;
        let mut errors = 0;
        let mut bits = 0;
        // Symbol 1 carries pilots and nulls and is left out of the BER.
        for (y, sent) in frame.y.iter().zip(&truth.data).skip(1) {
            let d = detector.detect_symbol(y)?;
            let sent = gfdm_core::CVector::from_iterator(d.len(), sent.iter().flat_map(|v| v.iter().copied()));
            errors += count_bit_errors(&d, &sent);
            bits += 2 * d.len();
        }
        let out = TrialMetrics {
            mse_cfo: mse_phi,
            mse_channel_iq: mse_h,
            ber: errors as f64 / bits as f64,
        };
        if ![out.mse_cfo, out.mse_channel_iq, out.ber].iter().all(|v| v.is_finite()) {
            return Err(SimError::Core(gfdm_core::Error::Numerical("non-finite metric".into())));
        }
        Ok(out)
    }

    /// Runs every `(snr, trial)` pair on the rayon pool. Rows come back in
    /// SNR, trial, mode order regardless of scheduling.
    pub fn run(&self) -> CampaignOutput {
        let trials = self.config.trials;
        let jobs = self.config.snr_db.len() * trials;
        let records: Vec<TrialRecord> = (0..jobs)
            .into_par_iter()
            .map(|j| self.run_trial(j / trials, j % trials))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        let summary = summarize(&records, &self.config);
        CampaignOutput { records, summary }
    }
}

struct TrialMetrics {
    mse_cfo: f64,
    mse_channel_iq: f64,
    ber: f64,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Per-(SNR, mode) means, recomputed from the rows alone.
pub fn summarize(records: &[TrialRecord], config: &CampaignConfig) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for &snr in &config.snr_db {
        for &mode in &config.modes {
            let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.mode == mode && r.snr_db.to_bits() == snr.to_bits()).collect();
            let ok = || rows.iter().filter(|r| !r.failed());
            let bers: Vec<Option<f64>> = rows.iter().map(|r| r.ber).collect();
            out.push(SummaryRow {
                snr_db: snr,
                mode,
                trials: rows.len(),
                failed: rows.len() - ok().count(),
                mse_cfo: mean(ok().map(|r| r.mse_cfo)),
                mse_channel_iq: mean(ok().map(|r| r.mse_channel_iq)),
                ber: mean(ok().map(|r| r.ber)),
                outage: outage_probability(&bers, config.outage_threshold),
                crlb_cfo: mean(rows.iter().map(|r| r.crlb_cfo)),
            });
        }
    }
    out
}

pub fn run_campaign(config: CampaignConfig) -> Result<CampaignOutput> {
    Ok(Campaign::new(config)?.run())
}
