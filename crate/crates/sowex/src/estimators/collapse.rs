//! Finite-size data collapse: score how well size-dependent curves fall
//! onto a single universal function after axis rescaling, and search for
//! the exponent pair that collapses them best.
//!
//! The score is the mean squared vertical distance, in log space, between
//! each scaled curve and the pointwise median curve over the shared
//! support. Zero means the scaled curves coincide; the paper-style "judge
//! by eye" step becomes a minimization.

use super::{EstimatorError, FitKind, FitResult};

/// One finite-size curve: the size `scale` (N), the raw `(x, y)` table, and
/// an optional per-curve shift `x_c` used by the shifted transform.
#[derive(Debug, Clone)]
pub struct ScalingCurve {
    pub scale: f64,
    pub shift: f64,
    pub points: Vec<(f64, f64)>,
}

impl ScalingCurve {
    pub fn new(scale: f64, points: Vec<(f64, f64)>) -> Self {
        ScalingCurve {
            scale,
            shift: 0.0,
            points,
        }
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }
}

/// Axis transform applied before scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseTransform {
    /// Histogram-style: plot `y * N^eta` against `x * N^-zeta`
    /// (log-x axis).
    HistogramFss,
    /// Mean-size-style: plot `y * N^-eta` against `x * N^zeta`
    /// (log-x axis).
    MeanSizeFss,
    /// Shifted: plot `y * N^-eta` against `(x - x_c) * N^zeta`
    /// (linear x axis).
    ShiftFss,
}

fn scaled_curve(
    curve: &ScalingCurve,
    eta: f64,
    zeta: f64,
    transform: CollapseTransform,
) -> Vec<(f64, f64)> {
    let n = curve.scale;
    let mut out: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter_map(|&(x, y)| {
            if y <= 0.0 {
                return None;
            }
            let (sx, sy) = match transform {
                CollapseTransform::HistogramFss => {
                    if x <= 0.0 {
                        return None;
                    }
                    ((x * n.powf(-zeta)).log10(), (y * n.powf(eta)).ln())
                }
                CollapseTransform::MeanSizeFss => {
                    if x <= 0.0 {
                        return None;
                    }
                    ((x * n.powf(zeta)).log10(), (y * n.powf(-eta)).ln())
                }
                CollapseTransform::ShiftFss => {
                    ((x - curve.shift) * n.powf(zeta), (y * n.powf(-eta)).ln())
                }
            };
            (sx.is_finite() && sy.is_finite()).then_some((sx, sy))
        })
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

fn interpolate(points: &[(f64, f64)], x: f64) -> Option<f64> {
    if points.len() < 2 || x < points[0].0 || x > points[points.len() - 1].0 {
        return None;
    }
    let k = match points.binary_search_by(|p| p.0.partial_cmp(&x).unwrap()) {
        Ok(k) => return Some(points[k].1),
        Err(k) => k,
    };
    let (x0, y0) = points[k - 1];
    let (x1, y1) = points[k];
    Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}

/// Mean squared log-space distance of the scaled curves from their
/// pointwise median over the shared support. Lower is better; zero iff the
/// scaled curves coincide.
pub fn collapse_score(
    curves: &[ScalingCurve],
    eta: f64,
    zeta: f64,
    transform: CollapseTransform,
) -> Result<f64, EstimatorError> {
    if curves.len() < 2 {
        return Err(EstimatorError::TooFewPoints {
            needed: 2,
            got: curves.len(),
        });
    }
    let scaled: Vec<Vec<(f64, f64)>> = curves
        .iter()
        .map(|c| scaled_curve(c, eta, zeta, transform))
        .collect();
    if scaled.iter().any(|s| s.len() < 2) {
        return Err(EstimatorError::NoOverlap);
    }
    let lo = scaled
        .iter()
        .map(|s| s[0].0)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = scaled
        .iter()
        .map(|s| s[s.len() - 1].0)
        .fold(f64::INFINITY, f64::min);
    if lo >= hi {
        return Err(EstimatorError::NoOverlap);
    }
    // Evaluation grid: every scaled sample point inside the shared support.
    let mut grid: Vec<f64> = scaled
        .iter()
        .flat_map(|s| s.iter().map(|p| p.0))
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    if grid.len() < 2 {
        return Err(EstimatorError::NoOverlap);
    }
    let mut total = 0.0;
    let mut count = 0usize;
    let mut column = Vec::with_capacity(scaled.len());
    for &x in &grid {
        column.clear();
        for s in &scaled {
            if let Some(y) = interpolate(s, x) {
                column.push(y);
            }
        }
        if column.len() < 2 {
            continue;
        }
        let mut sorted = column.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = sorted.len();
        let median = if m % 2 == 1 {
            sorted[m / 2]
        } else {
            0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
        };
        for &y in &column {
            total += (y - median) * (y - median);
            count += 1;
        }
    }
    if count == 0 {
        return Err(EstimatorError::NoOverlap);
    }
    Ok(total / count as f64)
}

#[derive(Debug, Clone)]
pub struct CollapseFit {
    pub fit: FitResult,
    /// (eta, zeta, score) over the coarse scan, for landscape export.
    pub landscape: Vec<(f64, f64, f64)>,
}

/// Coarse grid scan plus local refinement of the exponent pair minimizing
/// [`collapse_score`].
///
/// Parameters of the result: `eta`, `zeta`, `ratio` (= eta/zeta), `score`
/// and `inconclusive` (1.0 when the score landscape is flat to within
/// 1e-3 across the coarse grid).
pub fn optimize_collapse(
    curves: &[ScalingCurve],
    transform: CollapseTransform,
    eta_range: (f64, f64),
    zeta_range: (f64, f64),
) -> Result<CollapseFit, EstimatorError> {
    if curves.len() < 2 {
        return Err(EstimatorError::TooFewPoints {
            needed: 2,
            got: curves.len(),
        });
    }
    let coarse = 13usize;
    let mut landscape = Vec::with_capacity(coarse * coarse);
    let mut best: Option<(f64, f64, f64)> = None; // (score, eta, zeta)
    let mut seen_scores = Vec::new();
    for i in 0..coarse {
        let eta = eta_range.0 + (eta_range.1 - eta_range.0) * i as f64 / (coarse - 1) as f64;
        for j in 0..coarse {
            let zeta =
                zeta_range.0 + (zeta_range.1 - zeta_range.0) * j as f64 / (coarse - 1) as f64;
            let Ok(score) = collapse_score(curves, eta, zeta, transform) else {
                continue;
            };
            landscape.push((eta, zeta, score));
            seen_scores.push(score);
            if best.map_or(true, |(b, ..)| score < b) {
                best = Some((score, eta, zeta));
            }
        }
    }
    let (mut best_score, mut best_eta, mut best_zeta) = best.ok_or(EstimatorError::NoOverlap)?;
    let flat = {
        let max = seen_scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = seen_scores.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min < 1e-3
    };
    // Local refinement around the best pair. Collapse landscapes have a
    // narrow valley along which eta/zeta is nearly constant; the box only
    // shrinks when the minimum stops moving, so the search can crawl along
    // the valley to its true bottom.
    let mut de = (eta_range.1 - eta_range.0) / (coarse - 1) as f64;
    let mut dz = (zeta_range.1 - zeta_range.0) / (coarse - 1) as f64;
    for _ in 0..24 {
        let fine = 9usize;
        let (prev_eta, prev_zeta) = (best_eta, best_zeta);
        for i in 0..fine {
            let eta = prev_eta - de + 2.0 * de * i as f64 / (fine - 1) as f64;
            for j in 0..fine {
                let zeta = prev_zeta - dz + 2.0 * dz * j as f64 / (fine - 1) as f64;
                if let Ok(score) = collapse_score(curves, eta, zeta, transform) {
                    if score < best_score {
                        best_score = score;
                        best_eta = eta;
                        best_zeta = zeta;
                    }
                }
            }
        }
        let moved = ((best_eta - prev_eta) / de).abs().max(((best_zeta - prev_zeta) / dz).abs());
        if moved < 0.9 {
            de /= 3.0;
            dz /= 3.0;
            if de.max(dz) < 1e-4 {
                break;
            }
        }
    }
    let n_points: usize = curves.iter().map(|c| c.points.len()).sum();
    let fit = FitResult::new(
        FitKind::Collapse,
        (eta_range.0, eta_range.1),
        best_score,
        n_points,
    )
    .set("eta", best_eta)
    .set("zeta", best_zeta)
    .set("ratio", best_eta / best_zeta.max(1e-300))
    .set("score", best_score)
    .set("inconclusive", if flat { 1.0 } else { 0.0 });
    Ok(CollapseFit { fit, landscape })
}
