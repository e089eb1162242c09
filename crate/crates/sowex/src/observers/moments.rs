//! Relaxation moment tracking.
//!
//! [`MomentSeries`] records the second moment of the wealth array at a grid
//! of absolute step times, averaged over the ensemble; its decay toward the
//! stationary value gives the relaxation collapse. [`StationarityProbe`]
//! compares the time-averaged variance over the last two quarters of a
//! relaxation window — an operational "has it converged" check.

use super::MergeError;
use crate::engine::{neumaier_sum_of, StepRecord};

/// Geometric grid of step times in `[from, upto]` with roughly
/// `per_decade` points per decade, always including the endpoints.
pub fn geometric_times(from: u64, upto: u64, per_decade: usize) -> Vec<u64> {
    assert!(per_decade > 0);
    let from = from.max(1);
    if upto <= from {
        return vec![upto];
    }
    let ratio = 10f64.powf(1.0 / per_decade as f64);
    let mut times = vec![from];
    let mut x = from as f64;
    while *times.last().unwrap() < upto {
        x *= ratio;
        let t = (x.round() as u64).max(times.last().unwrap() + 1).min(upto);
        times.push(t);
    }
    times
}

#[derive(Debug, Clone)]
pub struct MomentSeries {
    times: Vec<u64>,
    cursor: usize,
    /// Per checkpoint, sum over runs of (sum_i w_i^2) / N.
    sums: Vec<f64>,
    runs: u64,
    n_agents: usize,
}

impl MomentSeries {
    pub fn new(times: Vec<u64>) -> Self {
        let n = times.len();
        MomentSeries {
            times,
            cursor: 0,
            sums: vec![0.0; n],
            runs: 0,
            n_agents: 0,
        }
    }

    pub(super) fn attach(&mut self, wealth: &[f64], time: u64) {
        self.n_agents = wealth.len();
        self.runs += 1;
        self.cursor = 0;
        while self.cursor < self.times.len() && self.times[self.cursor] <= time {
            if self.times[self.cursor] == time {
                self.record(wealth, self.cursor);
            }
            self.cursor += 1;
        }
    }

    #[inline]
    pub(super) fn on_step(&mut self, rec: &StepRecord, wealth: &[f64]) {
        while self.cursor < self.times.len() && self.times[self.cursor] <= rec.time {
            self.record(wealth, self.cursor);
            self.cursor += 1;
        }
    }

    fn record(&mut self, wealth: &[f64], idx: usize) {
        let sum_sq = neumaier_sum_of(wealth, |w| w * w);
        self.sums[idx] += sum_sq / wealth.len() as f64;
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    /// (time, ensemble-mean second moment) series. The second moment equals
    /// 1 + variance because the mean wealth is pinned at 1.
    pub fn second_moments(&self) -> Vec<(u64, f64)> {
        self.times
            .iter()
            .zip(&self.sums)
            .map(|(&t, &s)| (t, s / self.runs.max(1) as f64))
            .collect()
    }

    /// (time, ensemble-mean wealth variance) series.
    pub fn variances(&self) -> Vec<(u64, f64)> {
        self.second_moments()
            .into_iter()
            .map(|(t, m2)| (t, m2 - 1.0))
            .collect()
    }

    pub(super) fn merge(&mut self, other: &Self) -> Result<(), MergeError> {
        if self.times != other.times {
            return Err(MergeError::ConfigMismatch {
                kind: "moments",
                reason: "checkpoint grids differ".into(),
            });
        }
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        self.runs += other.runs;
        Ok(())
    }
}

/// Compares the time-averaged wealth variance over the third and fourth
/// quarters of a window of `window_steps` steps starting at attach time.
/// The run is considered stationary when the two averages agree within
/// `0.5%`.
#[derive(Debug, Clone)]
pub struct StationarityProbe {
    window_steps: u64,
    q3_start: u64,
    q4_start: u64,
    end: u64,
    sum_sq: f64,
    inv_n: f64,
    q3_sum: f64,
    q3_count: u64,
    q4_sum: f64,
    q4_count: u64,
}

impl StationarityProbe {
    pub const TOLERANCE: f64 = 0.005;

    pub fn new(window_steps: u64) -> Self {
        StationarityProbe {
            window_steps,
            q3_start: 0,
            q4_start: 0,
            end: 0,
            sum_sq: 0.0,
            inv_n: 0.0,
            q3_sum: 0.0,
            q3_count: 0,
            q4_sum: 0.0,
            q4_count: 0,
        }
    }

    pub(super) fn attach(&mut self, wealth: &[f64], time: u64) {
        self.sum_sq = neumaier_sum_of(wealth, |w| w * w);
        self.inv_n = 1.0 / wealth.len() as f64;
        self.q3_start = time + self.window_steps / 2;
        self.q4_start = time + 3 * self.window_steps / 4;
        self.end = time + self.window_steps;
    }

    #[inline]
    pub(super) fn on_step(&mut self, rec: &StepRecord) {
        // Incremental second moment; drift over a window is far below the
        // 0.5% comparison threshold.
        self.sum_sq += rec.new_wealth_i * rec.new_wealth_i
            + rec.new_wealth_j * rec.new_wealth_j
            - rec.extremal_wealth_before * rec.extremal_wealth_before
            - rec.partner_wealth_before * rec.partner_wealth_before;
        if rec.time > self.q3_start && rec.time <= self.end {
            let var = self.sum_sq * self.inv_n - 1.0;
            if rec.time <= self.q4_start {
                self.q3_sum += var;
                self.q3_count += 1;
            } else {
                self.q4_sum += var;
                self.q4_count += 1;
            }
        }
    }

    /// Mean variance over the third quarter of the window.
    pub fn quarter3_mean(&self) -> f64 {
        self.q3_sum / self.q3_count.max(1) as f64
    }

    /// Mean variance over the fourth quarter of the window.
    pub fn quarter4_mean(&self) -> f64 {
        self.q4_sum / self.q4_count.max(1) as f64
    }

    /// Relative disagreement between the two quarter averages.
    pub fn relative_gap(&self) -> f64 {
        let a = self.quarter3_mean();
        let b = self.quarter4_mean();
        let scale = 0.5 * (a.abs() + b.abs());
        if scale == 0.0 {
            return 0.0;
        }
        (a - b).abs() / scale
    }

    pub fn is_stationary(&self) -> bool {
        self.q3_count > 0 && self.q4_count > 0 && self.relative_gap() <= Self::TOLERANCE
    }

    pub(super) fn merge(&mut self, other: &Self) -> Result<(), MergeError> {
        if self.window_steps != other.window_steps {
            return Err(MergeError::ConfigMismatch {
                kind: "stationarity",
                reason: "window lengths differ".into(),
            });
        }
        self.q3_sum += other.q3_sum;
        self.q3_count += other.q3_count;
        self.q4_sum += other.q4_sum;
        self.q4_count += other.q4_count;
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
    fn geometric_grid_is_strictly_increasing() {
        let times = geometric_times(1, 100_000, 10);
        assert_eq!(*times.first().unwrap(), 1);
        assert_eq!(*times.last().unwrap(), 100_000);
        assert!(times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn initial_variance_matches_uniform_distribution() {
        // Var(Uniform[0,2)) = 1/3.
        let topo = Topology::ring(4096).unwrap();
        let config = ModelConfig::new(Variant::Minimal, 5);
        let mut state = SimulationState::init(&config, 4096, 0);
        let mut set = ObserverSet::new();
        set.push(Observer::Moments(MomentSeries::new(vec![0, 10, 100])));
        run_phase(&mut state, &config, &topo, 100, &mut set).unwrap();
        let m = set.moments().unwrap();
        let vars = m.variances();
        assert_eq!(vars.len(), 3);
        // Sampling noise of the variance estimator at N=4096 is ~0.026 (1σ).
        assert!((vars[0].1 - 1.0 / 3.0).abs() < 0.06, "got {}", vars[0].1);
    }

    #[test]
    fn ensemble_average_and_merge_agree() {
        let topo = Topology::ring(64).unwrap();
        let config = ModelConfig::new(Variant::Minimal, 77);
        let times = vec![0, 50, 500];
        let mut merged = MomentSeries::new(times.clone());
        let mut direct = MomentSeries::new(times.clone());
        for run in 0..4 {
            let mut state = SimulationState::init(&config, 64, run);
            let mut set = ObserverSet::new();
            set.push(Observer::Moments(MomentSeries::new(times.clone())));
            run_phase(&mut state, &config, &topo, 500, &mut set).unwrap();
            merged.merge(set.moments().unwrap()).unwrap();

            let mut state2 = SimulationState::init(&config, 64, run);
            let mut set2 = ObserverSet::new();
            set2.push(Observer::Moments(std::mem::replace(
                &mut direct,
                MomentSeries::new(vec![]),
            )));
            run_phase(&mut state2, &config, &topo, 500, &mut set2).unwrap();
            direct = set2.moments().unwrap().clone();
        }
        assert_eq!(merged.runs(), 4);
        assert_eq!(direct.runs(), 4);
        for (a, b) in merged.second_moments().iter().zip(direct.second_moments()) {
            assert!((a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn stationarity_probe_quarter_accounting() {
        // Drive the probe with hand-made records over a 40-step window
        // attached at t=0. Quarters: q3 = (20, 30], q4 = (30, 40].
        let mut probe = StationarityProbe::new(40);
        probe.attach(&[1.0, 1.0], 0); // sum_sq = 2, variance 0
        let mk = |time, wi_new: f64, wj_new: f64, wi_old: f64, wj_old: f64| StepRecord {
            time,
            extremal_index: 0,
            partner_index: 1,
            extremal_wealth_before: wi_old,
            partner_wealth_before: wj_old,
            delta: wi_old + wj_old,
            epsilon: 0.5,
            new_wealth_i: wi_new,
            new_wealth_j: wj_new,
            used_min: true,
        };
        // Steps 1..=30 keep wealth at (1,1): variance 0 through q3.
        for t in 1..=30 {
            probe.on_step(&mk(t, 1.0, 1.0, 1.0, 1.0));
        }
        // Step 31 moves to (0.5, 1.5): variance = (0.25+2.25)/2 - 1 = 0.25.
        probe.on_step(&mk(31, 0.5, 1.5, 1.0, 1.0));
        for t in 32..=40 {
            probe.on_step(&mk(t, 0.5, 1.5, 0.5, 1.5));
        }
        assert!((probe.quarter3_mean() - 0.0).abs() < 1e-12);
        assert!((probe.quarter4_mean() - 0.25).abs() < 1e-12);
        assert!(!probe.is_stationary());
    }

    #[test]
    fn stationarity_probe_detects_cold_start() {
        // A window that covers the relaxation transient has very different
        // quarter averages (variance falls from 1/3 toward ~0.05).
        let topo = Topology::ring(256).unwrap();
        let config = ModelConfig::new(Variant::Minimal, 3);
        let mut state = SimulationState::init(&config, 256, 0);
        let mut set = ObserverSet::new();
        set.push(Observer::Stationarity(StationarityProbe::new(2_000_000)));
        run_phase(&mut state, &config, &topo, 2_000_000, &mut set).unwrap();
        let probe = set.stationarity().unwrap();
        assert!(probe.quarter3_mean() > probe.quarter4_mean());
    }
}
