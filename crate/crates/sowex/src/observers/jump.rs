//! Distances between successive extremal sites.
//!
//! On periodic lattices the extremal site performs a Lévy-flight-like walk;
//! this records the minimal-image separation between the initiators of
//! consecutive trades. A repeat of the same site counts as distance 0.
//! There is no natural metric on BA or clique graphs, so construction is
//! refused there.

use super::MergeError;
use crate::engine::StepRecord;
use crate::topology::{Topology, TopologyError, TopologyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Metric {
    Ring { n: usize },
    Torus { side: usize },
}

impl Metric {
    #[inline]
    fn distance(&self, a: usize, b: usize) -> usize {
        match *self {
            Metric::Ring { n } => {
                let d = a.abs_diff(b);
                d.min(n - d)
            }
            Metric::Torus { side } => {
                let (ra, ca) = (a / side, a % side);
                let (rb, cb) = (b / side, b % side);
                let dr = ra.abs_diff(rb);
                let dc = ca.abs_diff(cb);
                dr.min(side - dr) + dc.min(side - dc)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct JumpRecorder {
    metric: Metric,
    previous: Option<usize>,
    counts: Vec<u64>,
    total: u64,
}

impl JumpRecorder {
    pub fn new(topology: &Topology) -> Result<Self, TopologyError> {
        let metric = match topology.kind() {
            TopologyKind::Ring => Metric::Ring {
                n: topology.n_agents(),
            },
            TopologyKind::Torus { side } => Metric::Torus { side },
            TopologyKind::Ba { .. } => return Err(TopologyError::UnsupportedDistance("ba")),
            TopologyKind::Clique => return Err(TopologyError::UnsupportedDistance("clique")),
        };
        let max = topology.max_distance().unwrap();
        Ok(JumpRecorder {
            metric,
            previous: None,
            counts: vec![0; max + 1],
            total: 0,
        })
    }

    pub(super) fn attach(&mut self) {
        self.previous = None;
    }

    #[inline]
    pub(super) fn on_step(&mut self, rec: &StepRecord) {
        if let Some(prev) = self.previous {
            let d = self.metric.distance(prev, rec.extremal_index);
            self.counts[d] += 1;
            self.total += 1;
        }
        self.previous = Some(rec.extremal_index);
    }

    /// Counts per distance, index = distance.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Probability of a jump of exactly `distance`.
    pub fn probability(&self, distance: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts[distance] as f64 / self.total as f64
    }

    /// (distance, probability) points over non-empty distances >= 1, for
    /// tail fits.
    pub fn tail_points(&self) -> Vec<(f64, f64)> {
        (1..self.counts.len())
            .filter(|&d| self.counts[d] > 0)
            .map(|d| (d as f64, self.probability(d)))
            .collect()
    }

    pub(super) fn merge(&mut self, other: &Self) -> Result<(), MergeError> {
        if self.metric != other.metric {
            return Err(MergeError::ConfigMismatch {
                kind: "jump",
                reason: "different topologies".into(),
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }
}
