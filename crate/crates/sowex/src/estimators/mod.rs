//! Post-processing: critical-point estimators, power-law and Gaussian fits,
//! extrapolation scans, and finite-size data-collapse scoring.
//!
//! Everything here is a pure function of immutable tables. Fit windows are
//! explicit arguments so analyses stay reproducible; per-pipeline defaults
//! live in [`crate::experiment::recipes`].

mod collapse;
mod gaussian;
mod power_law;
mod scan;
mod wc;

pub use collapse::{
    collapse_score, optimize_collapse, CollapseFit, CollapseTransform, ScalingCurve,
};
pub use gaussian::{gaussian_fit, gaussian_model};
pub use power_law::{linear_fit, mean_size_exponent, power_law_slope, scaling_relation_gap};
pub use scan::{bisect_rising, power_extrapolation_scan, ScanGrid, ScanResult};
pub use wc::{peak_position_quadratic, peak_ratio, two_peak_positions, wc_half, wc_slope, Flank};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("histogram has no usable peak")]
    NoPeak,
    #[error("flank of the peak is cut off by the histogram range")]
    FlankCutOff,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("non-positive data inside the fit window")]
    NonPositiveData,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("scaled curves share no overlapping support")]
    NoOverlap,
    #[error("expected exactly two peaks after smoothing, found {found}")]
    PeakCount { found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitKind {
    PowerLawSlope,
    GaussianFit,
    KappaScan,
    Collapse,
    LinearFit,
}

/// An estimated exponent or parameter set together with its residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: FitKind,
    pub parameters: BTreeMap<String, f64>,
    pub fit_range: (f64, f64),
    /// Mean squared error in fit space (log space for power laws and
    /// collapses, linear space otherwise).
    pub residual: f64,
    pub n_points: usize,
}

impl FitResult {
    pub fn new(kind: FitKind, fit_range: (f64, f64), residual: f64, n_points: usize) -> Self {
        FitResult {
            kind,
            parameters: BTreeMap::new(),
            fit_range,
            residual,
            n_points,
        }
    }

    pub fn set(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    /// Fetches a parameter the kind guarantees to be present.
    pub fn param(&self, name: &str) -> f64 {
        *self
            .parameters
            .get(name)
            .unwrap_or_else(|| panic!("fit result has no parameter {name:?}"))
    }
}
