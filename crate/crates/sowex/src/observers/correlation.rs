//! Two-point wealth correlation in the stationary state:
//! `C(x) = <w(0) w(x)> - <w>^2` with `<w>` pinned at 1 by conservation.
//!
//! The wealth array is sampled every `sample_interval` steps (default one
//! sweep-equivalent, N steps) and pair products are accumulated for every
//! separation along the lattice axes.

use super::MergeError;
use crate::engine::StepRecord;
use crate::topology::{Topology, TopologyError, TopologyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lattice {
    Ring { n: usize },
    Torus { side: usize },
}

#[derive(Debug, Clone)]
pub struct CorrelationAccumulator {
    lattice: Lattice,
    sample_interval: u64,
    next_sample: u64,
    /// pair_sums[x-1] accumulates sums of w_i * w_{i+x} over snapshots.
    pair_sums: Vec<f64>,
    snapshots: u64,
}

impl CorrelationAccumulator {
    pub fn new(topology: &Topology, sample_interval: u64) -> Result<Self, TopologyError> {
        let lattice = match topology.kind() {
            TopologyKind::Ring => Lattice::Ring {
                n: topology.n_agents(),
            },
            TopologyKind::Torus { side } => Lattice::Torus { side },
            TopologyKind::Ba { .. } => return Err(TopologyError::UnsupportedDistance("ba")),
            TopologyKind::Clique => return Err(TopologyError::UnsupportedDistance("clique")),
        };
        let max_sep = match lattice {
            Lattice::Ring { n } => n / 2,
            Lattice::Torus { side } => side / 2,
        };
        Ok(CorrelationAccumulator {
            lattice,
            sample_interval: sample_interval.max(1),
            next_sample: 0,
            pair_sums: vec![0.0; max_sep],
            snapshots: 0,
        })
    }

    pub(super) fn attach(&mut self, time: u64) {
        self.next_sample = time + self.sample_interval;
    }

    #[inline]
    pub(super) fn on_step(&mut self, rec: &StepRecord, wealth: &[f64]) {
        if rec.time >= self.next_sample {
            self.accumulate(wealth);
            self.next_sample += self.sample_interval;
        }
    }

    fn accumulate(&mut self, wealth: &[f64]) {
        match self.lattice {
            Lattice::Ring { n } => {
                for (k, sum) in self.pair_sums.iter_mut().enumerate() {
                    let x = k + 1;
                    let mut s = 0.0;
                    for i in 0..n {
                        s += wealth[i] * wealth[(i + x) % n];
                    }
                    *sum += s;
                }
            }
            Lattice::Torus { side } => {
                for (k, sum) in self.pair_sums.iter_mut().enumerate() {
                    let x = k + 1;
                    let mut s = 0.0;
                    for r in 0..side {
                        for c in 0..side {
                            let here = wealth[r * side + c];
                            s += here * wealth[r * side + (c + x) % side];
                            s += here * wealth[((r + x) % side) * side + c];
                        }
                    }
                    *sum += s;
                }
            }
        }
        self.snapshots += 1;
    }

    pub fn snapshots(&self) -> u64 {
        self.snapshots
    }

    pub fn sample_interval(&self) -> u64 {
        self.sample_interval
    }

    fn pairs_per_snapshot(&self) -> f64 {
        match self.lattice {
            Lattice::Ring { n } => n as f64,
            Lattice::Torus { side } => 2.0 * (side * side) as f64,
        }
    }

    /// (separation, C(x), pair count) estimates.
    pub fn estimates(&self) -> Vec<(usize, f64, u64)> {
        if self.snapshots == 0 {
            return Vec::new();
        }
        let pairs = self.pairs_per_snapshot();
        self.pair_sums
            .iter()
            .enumerate()
            .map(|(k, &sum)| {
                let count = pairs as u64 * self.snapshots;
                (k + 1, sum / (pairs * self.snapshots as f64) - 1.0, count)
            })
            .collect()
    }

    pub(super) fn merge(&mut self, other: &Self) -> Result<(), MergeError> {
        if self.lattice != other.lattice || self.sample_interval != other.sample_interval {
            return Err(MergeError::ConfigMismatch {
                kind: "correlation",
                reason: "lattice or sampling interval differ".into(),
            });
        }
        for (a, b) in self.pair_sums.iter_mut().zip(&other.pair_sums) {
            *a += b;
        }
        self.snapshots += other.snapshots;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dummy_record(time: u64) -> StepRecord {
        StepRecord {
            time,
            extremal_index: 0,
            partner_index: 1,
            extremal_wealth_before: 1.0,
            partner_wealth_before: 1.0,
            delta: 2.0,
            epsilon: 0.5,
            new_wealth_i: 1.0,
            new_wealth_j: 1.0,
            used_min: true,
        }
    }

    #[test]
    fn uniform_wealth_has_zero_correlation() {
        let topo = Topology::ring(8).unwrap();
        let mut c = CorrelationAccumulator::new(&topo, 1).unwrap();
        c.attach(0);
        let wealth = vec![1.0; 8];
        for t in 1..=5 {
            c.on_step(&dummy_record(t), &wealth);
        }
        assert_eq!(c.snapshots(), 5);
        for (_, corr, _) in c.estimates() {
            assert!(corr.abs() < 1e-12);
        }
    }

    #[test]
    fn alternating_wealth_has_alternating_sign() {
        let topo = Topology::ring(8).unwrap();
        let mut c = CorrelationAccumulator::new(&topo, 1).unwrap();
        c.attach(0);
        // w = 1 + (-1)^i * 0.5: C(x) = 0.25 * (-1)^x.
        let wealth: Vec<f64> = (0..8)
            .map(|i| 1.0 + if i % 2 == 0 { 0.5 } else { -0.5 })
            .collect();
        c.on_step(&dummy_record(1), &wealth);
        let est = c.estimates();
        assert!((est[0].1 - (-0.25)).abs() < 1e-12);
        assert!((est[1].1 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sampling_interval_respected() {
        let topo = Topology::ring(8).unwrap();
        let mut c = CorrelationAccumulator::new(&topo, 10).unwrap();
        c.attach(0);
        let wealth = vec![1.0; 8];
        for t in 1..=35 {
            c.on_step(&dummy_record(t), &wealth);
        }
        assert_eq!(c.snapshots(), 3);
    }
}
