//! Ensemble wealth histograms at fixed time instants during relaxation.
//!
//! The peak position of the histogram at time `T` tracks the rising poverty
//! line `w_c(T, N)`; its approach to the stationary value gives the
//! dynamical exponent.

use super::MergeError;
use crate::engine::StepRecord;
use crate::hist::Histogram;

#[derive(Debug, Clone)]
pub struct RelaxationSnapshotter {
    times: Vec<u64>,
    cursor: usize,
    hists: Vec<Histogram>,
    runs: u64,
}

impl RelaxationSnapshotter {
    /// Relaxation histograms are coarser than stationary ones; the peak
    /// moves fast early on and per-instant statistics are thinner.
    pub const DEFAULT_BIN_WIDTH: f64 = 0.005;

    pub fn new(times: Vec<u64>, lower: f64, bin_width: f64, n_bins: usize) -> Self {
        let hist = Histogram::new(lower, bin_width, n_bins).expect("valid binning");
        let n = times.len();
        RelaxationSnapshotter {
            times,
            cursor: 0,
            hists: vec![hist; n],
            runs: 0,
        }
    }

    pub fn with_default_bins(times: Vec<u64>) -> Self {
        Self::new(times, 0.0, Self::DEFAULT_BIN_WIDTH, 800)
    }

    pub(super) fn attach(&mut self, wealth: &[f64], time: u64) {
        self.cursor = 0;
        self.runs += 1;
        while self.cursor < self.times.len() && self.times[self.cursor] <= time {
            if self.times[self.cursor] == time {
                let idx = self.cursor;
                self.snapshot(wealth, idx);
            }
            self.cursor += 1;
        }
    }

    #[inline]
    pub(super) fn on_step(&mut self, rec: &StepRecord, wealth: &[f64]) {
        while self.cursor < self.times.len() && self.times[self.cursor] <= rec.time {
            let idx = self.cursor;
            self.snapshot(wealth, idx);
            self.cursor += 1;
        }
    }

    fn snapshot(&mut self, wealth: &[f64], idx: usize) {
        for &w in wealth {
            self.hists[idx].record(w);
        }
    }

    pub(super) fn detach(&mut self) {}

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    /// Ensemble histogram at snapshot index `idx`.
    pub fn histogram(&self, idx: usize) -> &Histogram {
        &self.hists[idx]
    }

    pub(super) fn merge(&mut self, other: &Self) -> Result<(), MergeError> {
        if self.times != other.times {
            return Err(MergeError::ConfigMismatch {
                kind: "relaxation",
                reason: "snapshot grids differ".into(),
            });
        }
        for (a, b) in self.hists.iter_mut().zip(&other.hists) {
            a.merge(b).map_err(|e| MergeError::ConfigMismatch {
                kind: "relaxation",
                reason: e.to_string(),
            })?;
        }
        self.runs += other.runs;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_phase, ModelConfig, SimulationState, Variant};
    use crate::observers::{Observer, ObserverSet};
    use crate::topology::Topology;

    #[test]
    fn snapshots_taken_at_requested_times() {
        let topo = Topology::ring(32).unwrap();
        let config = ModelConfig::new(Variant::Minimal, 17);
        let mut state = SimulationState::init(&config, 32, 0);
        let mut set = ObserverSet::new();
        set.push(Observer::Relaxation(RelaxationSnapshotter::with_default_bins(
            vec![0, 100, 1000],
        )));
        run_phase(&mut state, &config, &topo, 1000, &mut set).unwrap();
        let snap = set.relaxation().unwrap();
        for idx in 0..3 {
            assert_eq!(snap.histogram(idx).total(), 32, "one run, 32 agents");
        }
        assert_eq!(snap.runs(), 1);
    }
}
