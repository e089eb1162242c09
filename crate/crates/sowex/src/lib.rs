//! Simulation engine and analysis toolkit for conservative extremal
//! wealth-exchange dynamics.
//!
//! `sowex` simulates a society of `N` agents holding non-negative wealth.
//! At every time step the globally poorest (or richest) agent trades with a
//! randomly chosen neighbor on an interaction graph: the pair pools its
//! wealth and reshuffles it by a fresh random fraction. Total wealth is
//! strictly conserved. The dynamics self-organizes into a critical state
//! with a sharp poverty line, power-law avalanches, and non-trivial
//! persistence statistics.
//!
//! The crate is organized around the measurement pipeline:
//!
//! * [`topology`] — the four interaction graphs (ring, torus, scale-free,
//!   clique),
//! * [`extremal`] — a tournament tree giving O(log N) extremal tracking,
//! * [`engine`] — the trade dynamics itself,
//! * [`observers`] — streaming instrumentation (histograms, avalanches,
//!   persistence clocks, jump distances, correlations, relaxation moments),
//! * [`estimators`] — critical-point estimators, power-law and Gaussian
//!   fits, extrapolation scans and finite-size data-collapse scoring,
//! * [`experiment`] — configuration, ensemble orchestration, table and
//!   manifest I/O behind the `sowex` command-line tool.
//!
//! ```
//! use sowex::engine::{ModelConfig, SimulationState, Variant};
//! use sowex::topology::Topology;
//!
//! let topo = Topology::ring(64).unwrap();
//! let config = ModelConfig::new(Variant::Minimal, 42);
//! let mut state = SimulationState::init(&config, topo.n_agents(), 0);
//! for _ in 0..10_000 {
//!     state.step(&config, &topo);
//! }
//! // Wealth is conserved to floating-point accuracy.
//! assert!((state.total_wealth() - state.initial_total()).abs() < 1e-9 * 64.0);
//! ```

pub mod engine;
pub mod estimators;
pub mod experiment;
pub mod extremal;
pub mod hist;
pub mod observers;
pub mod topology;

pub use engine::{ModelConfig, SimulationState, StepRecord, Variant};
pub use extremal::{ExtremalMode, TournamentTree};
pub use hist::Histogram;
pub use topology::{Topology, TopologyKind};

/// Crate version embedded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// The guide chapters double as doc-tests so the book snippets cannot drift
// out of sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/topologies.md")]
    mod topologies {}
    #[doc = include_str!("../../../book/src/extremal_search.md")]
    mod extremal_search {}
    #[doc = include_str!("../../../book/src/observers.md")]
    mod observers {}
    #[doc = include_str!("../../../book/src/estimators.md")]
    mod estimators {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
