//! Streaming instrumentation attached to a run.
//!
//! Observers receive every [`StepRecord`] of the phase they are attached to
//! plus a view of the wealth array, accumulate counts, and merge exactly
//! across independent runs. All heavy analysis happens later in
//! [`crate::estimators`]; observers only count.

mod avalanche;
mod correlation;
mod jump;
mod moments;
mod persistence;
mod relaxation;
mod wealth_hist;

pub use avalanche::{AvalancheDirection, AvalancheRecorder};
pub use correlation::CorrelationAccumulator;
pub use jump::JumpRecorder;
pub use moments::{geometric_times, MomentSeries, StationarityProbe};
pub use persistence::PersistenceClocks;
pub use relaxation::RelaxationSnapshotter;
pub use wealth_hist::WealthHistogram;

use crate::engine::StepRecord;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MergeError {
    #[error("cannot merge observers of different kinds ({left} vs {right})")]
    KindMismatch {
        left: &'static str,
        right: &'static str,
    },
    #[error("observer sets have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("incompatible {kind} configuration: {reason}")]
    ConfigMismatch { kind: &'static str, reason: String },
}

/// One streaming recorder. The enum keeps dispatch static and makes merging
/// two sets of observers a simple pairwise walk.
#[derive(Debug, Clone)]
pub enum Observer {
    WealthHist(WealthHistogram),
    Avalanche(AvalancheRecorder),
    Persistence(PersistenceClocks),
    Jump(JumpRecorder),
    Correlation(CorrelationAccumulator),
    Moments(MomentSeries),
    Relaxation(RelaxationSnapshotter),
    Stationarity(StationarityProbe),
}

impl Observer {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Observer::WealthHist(_) => "wealth_hist",
            Observer::Avalanche(_) => "avalanche",
            Observer::Persistence(_) => "persistence",
            Observer::Jump(_) => "jump",
            Observer::Correlation(_) => "correlation",
            Observer::Moments(_) => "moments",
            Observer::Relaxation(_) => "relaxation",
            Observer::Stationarity(_) => "stationarity",
        }
    }

    fn attach(&mut self, wealth: &[f64], time: u64) {
        match self {
            Observer::WealthHist(o) => o.attach(wealth, time),
            Observer::Avalanche(o) => o.attach(time),
            Observer::Persistence(o) => o.attach(wealth.len(), time),
            Observer::Jump(o) => o.attach(),
            Observer::Correlation(o) => o.attach(time),
            Observer::Moments(o) => o.attach(wealth, time),
            Observer::Relaxation(o) => o.attach(wealth, time),
            Observer::Stationarity(o) => o.attach(wealth, time),
        }
    }

    #[inline]
    fn on_step(&mut self, rec: &StepRecord, wealth: &[f64]) {
        match self {
            Observer::WealthHist(o) => o.on_step(rec),
            Observer::Avalanche(o) => o.on_step(rec),
            Observer::Persistence(o) => o.on_step(rec),
            Observer::Jump(o) => o.on_step(rec),
            Observer::Correlation(o) => o.on_step(rec, wealth),
            Observer::Moments(o) => o.on_step(rec, wealth),
            Observer::Relaxation(o) => o.on_step(rec, wealth),
            Observer::Stationarity(o) => o.on_step(rec),
        }
    }

    fn detach(&mut self, wealth: &[f64], time: u64) {
        match self {
            Observer::WealthHist(o) => o.detach(wealth, time),
            Observer::Avalanche(o) => o.detach(),
            Observer::Persistence(o) => o.detach(),
            Observer::Relaxation(o) => o.detach(),
            _ => {}
        }
    }

    /// Count-wise sum with an identically configured observer.
    pub fn merge(&mut self, other: &Observer) -> Result<(), MergeError> {
        match (self, other) {
            (Observer::WealthHist(a), Observer::WealthHist(b)) => a.merge(b),
            (Observer::Avalanche(a), Observer::Avalanche(b)) => a.merge(b),
            (Observer::Persistence(a), Observer::Persistence(b)) => a.merge(b),
            (Observer::Jump(a), Observer::Jump(b)) => a.merge(b),
            (Observer::Correlation(a), Observer::Correlation(b)) => a.merge(b),
            (Observer::Moments(a), Observer::Moments(b)) => a.merge(b),
            (Observer::Relaxation(a), Observer::Relaxation(b)) => a.merge(b),
            (Observer::Stationarity(a), Observer::Stationarity(b)) => a.merge(b),
            (left, right) => Err(MergeError::KindMismatch {
                left: left.kind_name(),
                right: right.kind_name(),
            }),
        }
    }
}

/// The observers attached to one phase of one run.
#[derive(Debug, Clone, Default)]
pub struct ObserverSet {
    observers: Vec<Observer>,
}

impl ObserverSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, obs: Observer) {
        self.observers.push(obs);
    }

    pub fn with(mut self, obs: Observer) -> Self {
        self.push(obs);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.observers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.observers.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Observer> {
        self.observers.iter()
    }

    pub fn attach(&mut self, wealth: &[f64], time: u64) {
        for o in &mut self.observers {
            o.attach(wealth, time);
        }
    }

    #[inline]
    pub fn on_step(&mut self, rec: &StepRecord, wealth: &[f64]) {
        for o in &mut self.observers {
            o.on_step(rec, wealth);
        }
    }

    pub fn detach(&mut self, wealth: &[f64], time: u64) {
        for o in &mut self.observers {
            o.detach(wealth, time);
        }
    }

    /// Pairwise count-wise sum. Associative, and commutative bit-for-bit on
    /// integer counts; the ensemble orchestrator always folds in run order
    /// so floating-point accumulators merge deterministically too.
    pub fn merge(&mut self, other: &ObserverSet) -> Result<(), MergeError> {
        if self.observers.len() != other.observers.len() {
            return Err(MergeError::LengthMismatch {
                left: self.observers.len(),
                right: other.observers.len(),
            });
        }
        for (a, b) in self.observers.iter_mut().zip(&other.observers) {
            a.merge(b)?;
        }
        Ok(())
    }

    pub fn wealth_hist(&self) -> Option<&WealthHistogram> {
        self.observers.iter().find_map(|o| match o {
            Observer::WealthHist(h) => Some(h),
            _ => None,
        })
    }

    pub fn avalanche(&self) -> Option<&AvalancheRecorder> {
        self.observers.iter().find_map(|o| match o {
            Observer::Avalanche(a) => Some(a),
            _ => None,
        })
    }

    pub fn persistence(&self) -> Option<&PersistenceClocks> {
        self.observers.iter().find_map(|o| match o {
            Observer::Persistence(p) => Some(p),
            _ => None,
        })
    }

    pub fn jump(&self) -> Option<&JumpRecorder> {
        self.observers.iter().find_map(|o| match o {
            Observer::Jump(j) => Some(j),
            _ => None,
        })
    }

    pub fn correlation(&self) -> Option<&CorrelationAccumulator> {
        self.observers.iter().find_map(|o| match o {
            Observer::Correlation(c) => Some(c),
            _ => None,
        })
    }

    pub fn moments(&self) -> Option<&MomentSeries> {
        self.observers.iter().find_map(|o| match o {
            Observer::Moments(m) => Some(m),
            _ => None,
        })
    }

    pub fn relaxation(&self) -> Option<&RelaxationSnapshotter> {
        self.observers.iter().find_map(|o| match o {
            Observer::Relaxation(r) => Some(r),
            _ => None,
        })
    }

    pub fn stationarity(&self) -> Option<&StationarityProbe> {
        self.observers.iter().find_map(|o| match o {
            Observer::Stationarity(s) => Some(s),
            _ => None,
        })
    }
}
