//! Avalanche decomposition of the extremal-wealth time series.
//!
//! Fixing a reference wealth `w_o`, an avalanche is a maximal run of
//! consecutive trades whose extremal wealth stays on the active side of
//! `w_o`: below it when the poorest agent drives the dynamics, above it when
//! the richest one does. The run length is the avalanche size. Lowering
//! `w_o` splits an avalanche into a nested hierarchy of smaller ones.

use super::MergeError;
use crate::engine::StepRecord;
use crate::hist::CountTable;

/// Which side of the reference wealth counts as "inside an avalanche".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvalancheDirection {
    /// Minimal-wealth dynamics: active while `w_min < w_o`.
    Below,
    /// Maximal-wealth dynamics: active while `w_max > w_o`.
    Above,
}

#[derive(Debug, Clone)]
struct ThresholdState {
    threshold: f64,
    active: bool,
    size: u64,
    start: u64,
    sizes: CountTable,
    intervals: Vec<(u64, u64)>,
}

#[derive(Debug, Clone)]
pub struct AvalancheRecorder {
    direction: AvalancheDirection,
    states: Vec<ThresholdState>,
    /// Truncated avalanches still open when the window closes are dropped,
    /// not clipped; clipping would bias the large-size tail.
    discard_truncated: bool,
    record_intervals: bool,
}

impl AvalancheRecorder {
    pub fn new(thresholds: &[f64], direction: AvalancheDirection) -> Self {
        let mut sorted: Vec<f64> = thresholds.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        AvalancheRecorder {
            direction,
            states: sorted
                .into_iter()
                .map(|threshold| ThresholdState {
                    threshold,
                    active: false,
                    size: 0,
                    start: 0,
                    sizes: CountTable::with_dense_limit(1 << 12),
                    intervals: Vec::new(),
                })
                .collect(),
            discard_truncated: true,
            record_intervals: false,
        }
    }

    /// Also keep the (start, end) step interval of every completed
    /// avalanche; used by hierarchy checks, too memory-hungry for
    /// production windows.
    pub fn recording_intervals(mut self) -> Self {
        self.record_intervals = true;
        self
    }

    pub fn direction(&self) -> AvalancheDirection {
        self.direction
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.threshold).collect()
    }

    pub(super) fn attach(&mut self, _time: u64) {
        for s in &mut self.states {
            s.active = false;
            s.size = 0;
        }
    }

    #[inline]
    pub(super) fn on_step(&mut self, rec: &StepRecord) {
        let w = rec.extremal_wealth_before;
        for s in &mut self.states {
            let inside = match self.direction {
                AvalancheDirection::Below => w < s.threshold,
                AvalancheDirection::Above => w > s.threshold,
            };
            if inside {
                if !s.active {
                    s.active = true;
                    s.size = 0;
                    s.start = rec.time;
                }
                s.size += 1;
            } else if s.active {
                s.sizes.add(s.size);
                if self.record_intervals {
                    s.intervals.push((s.start, rec.time - 1));
                }
                s.active = false;
                s.size = 0;
            }
        }
    }

    pub(super) fn detach(&mut self) {
        for s in &mut self.states {
            if s.active {
                if !self.discard_truncated {
                    s.sizes.add(s.size);
                    if self.record_intervals {
                        s.intervals.push((s.start, s.start + s.size - 1));
                    }
                }
                s.active = false;
                s.size = 0;
            }
        }
    }

    /// Completed-size counts for the `idx`-th threshold (ascending order).
    pub fn sizes(&self, idx: usize) -> &CountTable {
        &self.states[idx].sizes
    }

    /// Completed (start, end) intervals; empty unless interval recording was
    /// enabled.
    pub fn intervals(&self, idx: usize) -> &[(u64, u64)] {
        &self.states[idx].intervals
    }

    /// Mean completed-avalanche size at the `idx`-th threshold.
    pub fn mean_size(&self, idx: usize) -> f64 {
        self.states[idx].sizes.mean()
    }

    pub fn n_thresholds(&self) -> usize {
        self.states.len()
    }

    /// Index of the threshold closest to `w`.
    pub fn nearest_threshold(&self, w: f64) -> Option<usize> {
        self.states
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (a.threshold - w)
                    .abs()
                    .partial_cmp(&(b.threshold - w).abs())
                    .unwrap()
            })
            .map(|(i, _)| i)
    }

    pub(super) fn merge(&mut self, other: &Self) -> Result<(), MergeError> {
        if self.direction != other.direction
            || self.states.len() != other.states.len()
            || self
                .states
                .iter()
                .zip(&other.states)
                .any(|(a, b)| a.threshold != b.threshold)
        {
            return Err(MergeError::ConfigMismatch {
                kind: "avalanche",
                reason: "thresholds or direction differ".into(),
            });
        }
        for (a, b) in self.states.iter_mut().zip(&other.states) {
            a.sizes.merge(&b.sizes);
            a.intervals.extend_from_slice(&b.intervals);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::StepRecord;

    fn record(time: u64, w: f64) -> StepRecord {
        StepRecord {
            time,
            extremal_index: 0,
            partner_index: 1,
            extremal_wealth_before: w,
            partner_wealth_before: 1.0,
            delta: 1.0,
            epsilon: 0.5,
            new_wealth_i: 0.5,
            new_wealth_j: 0.5,
            used_min: true,
        }
    }

    fn feed(recorder: &mut AvalancheRecorder, series: &[f64]) {
        recorder.attach(0);
        for (k, &w) in series.iter().enumerate() {
            recorder.on_step(&record(k as u64 + 1, w));
        }
        recorder.detach();
    }

    #[test]
    fn maximal_runs_below_threshold() {
        // Below-threshold runs: (0.4, 0.3) then (0.45) -> sizes {2, 1}.
        let series = [0.6, 0.4, 0.3, 0.7, 0.45, 0.8];
        let mut r = AvalancheRecorder::new(&[0.5], AvalancheDirection::Below);
        feed(&mut r, &series);
        let sizes: Vec<_> = r.sizes(0).iter().collect();
        assert_eq!(sizes, vec![(1, 1), (2, 1)]);
    }

    #[test]
    fn trailing_truncated_avalanche_is_discarded() {
        let series = [0.6, 0.4, 0.3];
        let mut r = AvalancheRecorder::new(&[0.5], AvalancheDirection::Below);
        feed(&mut r, &series);
        assert_eq!(r.sizes(0).total(), 0);
    }

    #[test]
    fn above_direction_mirrors() {
        let series = [1.2, 1.5, 1.6, 1.1, 1.45];
        let mut r = AvalancheRecorder::new(&[1.4], AvalancheDirection::Above);
        feed(&mut r, &series);
        // Active run (1.5, 1.6) completes; trailing (1.45) is truncated.
        let sizes: Vec<_> = r.sizes(0).iter().collect();
        assert_eq!(sizes, vec![(2, 1)]);
    }

    #[test]
    fn empty_threshold_list_records_nothing() {
        let mut r = AvalancheRecorder::new(&[], AvalancheDirection::Below);
        feed(&mut r, &[0.1, 0.9]);
        assert_eq!(r.n_thresholds(), 0);
    }

    #[test]
    fn hierarchy_nesting_on_synthetic_series() {
        // Every avalanche at the lower threshold must sit inside exactly one
        // avalanche at the higher threshold.
        let series = [0.9, 0.5, 0.3, 0.55, 0.2, 0.9, 0.4, 0.9];
        let mut r = AvalancheRecorder::new(&[0.4, 0.7], AvalancheDirection::Below)
            .recording_intervals();
        feed(&mut r, &series);
        let low = r.intervals(0);
        let high = r.intervals(1);
        assert_eq!(high, &[(2, 5), (7, 7)]);
        assert_eq!(low, &[(3, 3), (5, 5)]);
        for &(ls, le) in low {
            let parents = high
                .iter()
                .filter(|&&(hs, he)| hs <= ls && le <= he)
                .count();
            assert_eq!(parents, 1, "child ({ls},{le}) not nested in one parent");
        }
        // Children sizes sum to no more than the parent size.
        let parent_size = 5 - 2 + 1;
        let child_sum: u64 = low.iter().map(|&(s, e)| e - s + 1).sum();
        assert!(child_sum <= parent_size);
    }

    #[test]
    fn merge_requires_identical_thresholds() {
        let mut a = AvalancheRecorder::new(&[0.5], AvalancheDirection::Below);
        let b = AvalancheRecorder::new(&[0.6], AvalancheDirection::Below);
        assert!(a.merge(&b).is_err());
        let c = AvalancheRecorder::new(&[0.5], AvalancheDirection::Above);
        assert!(a.merge(&c).is_err());
        let mut d = AvalancheRecorder::new(&[0.5], AvalancheDirection::Below);
        feed(&mut d, &[0.6, 0.4, 0.6]);
        let mut e = d.clone();
        e.merge(&d).unwrap();
        assert_eq!(e.sizes(0).total(), 2 * d.sizes(0).total());
    }
}
