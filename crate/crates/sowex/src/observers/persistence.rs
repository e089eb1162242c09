//! Persistence times: the number of steps between two successive wealth
//! updates of the same agent.
//!
//! Every agent carries a clock. A trade reads and resets the clocks of both
//! participants. An agent's first trade inside the measurement window only
//! arms its clock (the preceding interval started before the window and is
//! left-censored); intervals still open when the window closes are discarded
//! symmetrically.

use super::MergeError;
use crate::engine::StepRecord;
use crate::hist::CountTable;

const UNARMED: u64 = u64::MAX;

#[derive(Debug, Clone)]
pub struct PersistenceClocks {
    last_update: Vec<u64>,
    times: CountTable,
    steps_seen: u64,
    open_at_detach: u64,
}

impl PersistenceClocks {
    pub fn new() -> Self {
        PersistenceClocks {
            last_update: Vec::new(),
            times: CountTable::new(),
            steps_seen: 0,
            open_at_detach: 0,
        }
    }

    pub(super) fn attach(&mut self, n_agents: usize, _time: u64) {
        self.last_update = vec![UNARMED; n_agents];
    }

    #[inline]
    pub(super) fn on_step(&mut self, rec: &StepRecord) {
        self.record_agent(rec.extremal_index, rec.time);
        self.record_agent(rec.partner_index, rec.time);
        self.steps_seen += 1;
    }

    #[inline]
    fn record_agent(&mut self, agent: usize, now: u64) {
        let last = self.last_update[agent];
        if last != UNARMED {
            self.times.add(now - last);
        }
        self.last_update[agent] = now;
    }

    pub(super) fn detach(&mut self) {
        self.open_at_detach += self
            .last_update
            .iter()
            .filter(|&&t| t != UNARMED)
            .count() as u64;
        self.last_update.clear();
    }

    /// Completed persistence-time counts; every recorded time is >= 1.
    pub fn times(&self) -> &CountTable {
        &self.times
    }

    pub fn steps_seen(&self) -> u64 {
        self.steps_seen
    }

    /// Intervals that were still open when the window closed (discarded).
    pub fn open_at_detach(&self) -> u64 {
        self.open_at_detach
    }

    pub(super) fn merge(&mut self, other: &Self) -> Result<(), MergeError> {
        self.times.merge(&other.times);
        self.steps_seen += other.steps_seen;
        self.open_at_detach += other.open_at_detach;
        Ok(())
    }
}

impl Default for PersistenceClocks {
    fn default() -> Self {
        Self::new()
    }
}
