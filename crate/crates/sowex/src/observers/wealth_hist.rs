//! Time-averaged stationary wealth distribution.
//!
//! Rather than snapshotting the whole array periodically, each agent's
//! wealth episode contributes its duration (in steps) to the bin it sat in.
//! That is exactly the average of the per-step histograms, costs O(1) per
//! trade, and keeps counts as integers so merging stays exact.

use super::MergeError;
use crate::engine::StepRecord;
use crate::hist::Histogram;

#[derive(Debug, Clone)]
pub struct WealthHistogram {
    hist: Histogram,
    // Step at which each agent's current value became visible.
    episode_start: Vec<u64>,
    attach_time: u64,
    steps_seen: u64,
}

impl WealthHistogram {
    /// Stationary wealth histograms default to 2e-3 bins over [0, 4]; the
    /// poverty-line estimators need the jump resolved to a few 1e-3.
    pub const DEFAULT_BIN_WIDTH: f64 = 0.002;
    pub const DEFAULT_UPPER: f64 = 4.0;

    pub fn new(lower: f64, bin_width: f64, n_bins: usize) -> Self {
        WealthHistogram {
            hist: Histogram::new(lower, bin_width, n_bins).expect("valid binning"),
            episode_start: Vec::new(),
            attach_time: 0,
            steps_seen: 0,
        }
    }

    pub fn default_range() -> Self {
        let bins = (Self::DEFAULT_UPPER / Self::DEFAULT_BIN_WIDTH).round() as usize;
        Self::new(0.0, Self::DEFAULT_BIN_WIDTH, bins)
    }

    pub(super) fn attach(&mut self, wealth: &[f64], time: u64) {
        self.attach_time = time;
        // Values present at attach are first visible in the state after the
        // next trade.
        self.episode_start = vec![time + 1; wealth.len()];
        // Remember the attach-time values so detach can flush agents that
        // never trade: store them lazily by replaying at detach from the
        // final array (untraded agents still hold them). Nothing to do here.
    }

    #[inline]
    pub(super) fn on_step(&mut self, rec: &StepRecord) {
        self.close_episode(rec.extremal_index, rec.extremal_wealth_before, rec.time);
        self.close_episode(rec.partner_index, rec.partner_wealth_before, rec.time);
        self.steps_seen += 1;
    }

    #[inline]
    fn close_episode(&mut self, agent: usize, value: f64, now: u64) {
        let start = self.episode_start[agent];
        if now > start {
            self.hist.record_weighted(value, now - start);
        }
        self.episode_start[agent] = now;
    }

    pub(super) fn detach(&mut self, wealth: &[f64], time: u64) {
        for (agent, &w) in wealth.iter().enumerate() {
            let start = self.episode_start[agent];
            if time + 1 > start {
                self.hist.record_weighted(w, time + 1 - start);
            }
        }
        self.episode_start.clear();
    }

    pub fn histogram(&self) -> &Histogram {
        &self.hist
    }

    pub fn steps_seen(&self) -> u64 {
        self.steps_seen
    }

    pub(super) fn merge(&mut self, other: &Self) -> Result<(), MergeError> {
        self.hist
            .merge(&other.hist)
            .map_err(|e| MergeError::ConfigMismatch {
                kind: "wealth_hist",
                reason: e.to_string(),
            })?;
        self.steps_seen += other.steps_seen;
        Ok(())
    }
}
