//! Critical-wealth (poverty line) estimators and peak analysis of the
//! stationary wealth distribution.
//!
//! The distribution of the Minimal model jumps from near zero to its peak
//! within a few bins; the half-peak crossing and the steepest-slope
//! intercept of that rising flank give two independent finite-size
//! estimates of the critical wealth. For the Maximal model the roles
//! mirror: the sharp edge sits on the falling (right) flank.

use super::EstimatorError;
use crate::hist::Histogram;

/// Which side of the peak carries the critical edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flank {
    /// Rising edge left of the peak (Minimal-model poverty line).
    Left,
    /// Falling edge right of the peak (Maximal-model wealth ceiling).
    Right,
}

fn peak_index(dens: &[f64]) -> Result<usize, EstimatorError> {
    let (k, &peak) = dens
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .ok_or(EstimatorError::NoPeak)?;
    if peak <= 0.0 {
        return Err(EstimatorError::NoPeak);
    }
    Ok(k)
}

/// Wealth at which the density first reaches half of its peak value,
/// approaching the peak along the chosen flank, with linear interpolation
/// between bin centers.
pub fn wc_half(hist: &Histogram, flank: Flank) -> Result<f64, EstimatorError> {
    let dens = hist.densities();
    let k_peak = peak_index(&dens)?;
    let half = dens[k_peak] / 2.0;
    match flank {
        Flank::Left => {
            let k = (0..=k_peak)
                .find(|&k| dens[k] >= half)
                .expect("peak itself reaches half");
            if k == 0 {
                return Err(EstimatorError::FlankCutOff);
            }
            let (d0, d1) = (dens[k - 1], dens[k]);
            Ok(hist.bin_center(k - 1) + (half - d0) / (d1 - d0) * hist.bin_width())
        }
        Flank::Right => {
            let k = (k_peak..dens.len())
                .rev()
                .find(|&k| dens[k] >= half)
                .expect("peak itself reaches half");
            if k + 1 == dens.len() {
                return Err(EstimatorError::FlankCutOff);
            }
            let (d0, d1) = (dens[k], dens[k + 1]);
            Ok(hist.bin_center(k) + (d0 - half) / (d0 - d1) * hist.bin_width())
        }
    }
}

/// Intercept of the steepest line on the chosen flank.
///
/// Finds the consecutive bin pair with the largest slope toward the peak,
/// extends that line to zero density, and returns the wealth intercept.
pub fn wc_slope(hist: &Histogram, flank: Flank) -> Result<f64, EstimatorError> {
    let dens = hist.densities();
    let k_peak = peak_index(&dens)?;
    let w = hist.bin_width();
    match flank {
        Flank::Left => {
            let mut best: Option<(usize, f64)> = None;
            for k in 1..=k_peak {
                let rise = dens[k] - dens[k - 1];
                if best.map_or(true, |(_, b)| rise > b) {
                    best = Some((k, rise));
                }
            }
            let (k, rise) = best.ok_or(EstimatorError::FlankCutOff)?;
            if rise <= 0.0 {
                return Err(EstimatorError::NoPeak);
            }
            Ok(hist.bin_center(k - 1) - dens[k - 1] * w / rise)
        }
        Flank::Right => {
            let mut best: Option<(usize, f64)> = None;
            for k in k_peak..dens.len() - 1 {
                let drop = dens[k] - dens[k + 1];
                if best.map_or(true, |(_, b)| drop > b) {
                    best = Some((k, drop));
                }
            }
            let (k, drop) = best.ok_or(EstimatorError::FlankCutOff)?;
            if drop <= 0.0 {
                return Err(EstimatorError::NoPeak);
            }
            Ok(hist.bin_center(k) + dens[k] * w / drop)
        }
    }
}

/// Peak position refined by a 3-bin quadratic interpolation; reduces bin
/// quantization when tracking the relaxing poverty line.
pub fn peak_position_quadratic(hist: &Histogram) -> Result<f64, EstimatorError> {
    let dens = hist.densities();
    let k = peak_index(&dens)?;
    if k == 0 || k + 1 == dens.len() {
        return Ok(hist.bin_center(k));
    }
    let (dl, dc, dr) = (dens[k - 1], dens[k], dens[k + 1]);
    let denom = dl - 2.0 * dc + dr;
    if denom >= 0.0 {
        return Ok(hist.bin_center(k));
    }
    let offset = 0.5 * (dl - dr) / denom;
    Ok(hist.bin_center(k) + offset * hist.bin_width())
}

/// Centered moving average with window `window` (odd), shrinking at the
/// edges.
fn smooth(dens: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..dens.len())
        .map(|k| {
            let lo = k.saturating_sub(half);
            let hi = (k + half + 1).min(dens.len());
            dens[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

fn find_two_peaks(
    hist: &Histogram,
    smooth_window: usize,
) -> Result<(usize, usize, Vec<f64>), EstimatorError> {
    let dens = smooth(&hist.densities(), smooth_window.max(1));
    let mut peaks = Vec::new();
    for k in 1..dens.len().saturating_sub(1) {
        if dens[k] > dens[k - 1] && dens[k] >= dens[k + 1] && dens[k] > 0.0 {
            peaks.push(k);
        }
    }
    if peaks.len() != 2 {
        return Err(EstimatorError::PeakCount { found: peaks.len() });
    }
    let (a, b) = (peaks[0], peaks[1]);
    // A genuine double peak needs a dip between the maxima.
    let valley = dens[a..=b].iter().cloned().fold(f64::INFINITY, f64::min);
    if valley >= dens[a].min(dens[b]) {
        return Err(EstimatorError::PeakCount { found: 1 });
    }
    Ok((a, b, dens))
}

/// Ratio of the right peak height to the left peak height of a bimodal
/// histogram, after moving-average smoothing.
pub fn peak_ratio(hist: &Histogram, smooth_window: usize) -> Result<f64, EstimatorError> {
    let (a, b, dens) = find_two_peaks(hist, smooth_window)?;
    Ok(dens[b] / dens[a])
}

/// Positions of the two peaks of a bimodal histogram (quadratic-refined on
/// the smoothed curve).
pub fn two_peak_positions(
    hist: &Histogram,
    smooth_window: usize,
) -> Result<(f64, f64), EstimatorError> {
    let (a, b, dens) = find_two_peaks(hist, smooth_window)?;
    let refine = |k: usize| -> f64 {
        if k == 0 || k + 1 == dens.len() {
            return hist.bin_center(k);
        }
        let denom = dens[k - 1] - 2.0 * dens[k] + dens[k + 1];
        if denom >= 0.0 {
            return hist.bin_center(k);
        }
        hist.bin_center(k) + 0.5 * (dens[k - 1] - dens[k + 1]) / denom * hist.bin_width()
    };
    Ok((refine(a), refine(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist_from_densities(lower: f64, width: f64, dens: &[f64]) -> Histogram {
        // Counts proportional to the requested densities.
        let mut h = Histogram::new(lower, width, dens.len()).unwrap();
        for (k, &d) in dens.iter().enumerate() {
            let count = (d * 1e6).round() as u64;
            if count > 0 {
                h.record_weighted(lower + (k as f64 + 0.5) * width, count);
            }
        }
        h
    }

    #[test]
    fn half_crossing_interpolates_linearly() {
        // Zero density below 0.80, rising linearly to a peak of 10 at 0.81.
        let mut dens = vec![0.0; 10];
        dens[5] = 0.0; // center 0.805 -> bin edges align: centers 0.75+..
        let h = hist_from_densities(0.755, 0.01, &[0.0, 0.0, 0.0, 0.0, 0.0, 10.0, 4.0, 2.0, 1.0]);
        // centers: 0.76, 0.77, ..., peak at 0.81 (index 5), half = 5 between
        // centers 0.80 (0) and 0.81 (10) -> 0.805.
        let wc = wc_half(&h, Flank::Left).unwrap();
        assert!((wc - 0.805).abs() < 1e-9, "wc {wc}");
        let _ = dens;
    }

    #[test]
    fn slope_intercept_from_two_point_edge() {
        // Rising edge (0.80, 0) -> (0.81, 10): the steepest line meets zero
        // density at 0.80.
        let h = hist_from_densities(0.755, 0.01, &[0.0, 0.0, 0.0, 0.0, 0.0, 10.0, 4.0, 2.0, 1.0]);
        let wc = wc_slope(&h, Flank::Left).unwrap();
        assert!((wc - 0.80).abs() < 1e-9, "wc {wc}");
    }

    #[test]
    fn slope_is_left_of_half_on_rising_flanks() {
        for dens in [
            vec![0.0, 0.1, 0.5, 2.0, 8.0, 10.0, 6.0, 3.0],
            vec![0.0, 0.0, 4.9, 5.0, 10.0, 2.0],
            vec![0.0, 1.0, 1.5, 9.0, 9.5, 4.0],
        ] {
            let h = hist_from_densities(0.0, 0.1, &dens);
            let half = wc_half(&h, Flank::Left).unwrap();
            let slope = wc_slope(&h, Flank::Left).unwrap();
            assert!(
                slope <= half + 1e-12,
                "slope {slope} right of half {half} for {dens:?}"
            );
        }
    }

    #[test]
    fn monotone_histogram_is_rejected() {
        let h = hist_from_densities(0.0, 0.1, &[10.0, 8.0, 6.0, 4.0]);
        assert_eq!(wc_half(&h, Flank::Left).unwrap_err(), EstimatorError::FlankCutOff);
        let empty = Histogram::new(0.0, 0.1, 4).unwrap();
        assert_eq!(wc_half(&empty, Flank::Left).unwrap_err(), EstimatorError::NoPeak);
    }

    #[test]
    fn right_flank_mirrors_left() {
        // Falling edge (1.39, 10) -> (1.40, 0-ish).
        let h = hist_from_densities(1.30, 0.01, &[1.0, 2.0, 4.0, 8.0, 10.0, 10.0, 10.0, 10.0, 10.0, 0.001]);
        let wc = wc_half(&h, Flank::Right).unwrap();
        // centers 1.305..; peak plateau ends at center 1.385 (idx 8), half=5
        // between centers 1.385 (10) and 1.395 (0.001).
        assert!((wc - 1.390).abs() < 5e-4, "wc {wc}");
        let ws = wc_slope(&h, Flank::Right).unwrap();
        assert!(ws >= wc - 1e-9, "slope intercept {ws} left of half {wc}");
    }

    #[test]
    fn quadratic_peak_interpolation() {
        // Parabola d(w) = 10 - 100 (w - 0.83)^2 sampled at centers.
        let centers: Vec<f64> = (0..9).map(|k| 0.755 + (k as f64 + 0.5) * 0.01).collect();
        let dens: Vec<f64> = centers
            .iter()
            .map(|&c| (10.0 - 100.0 * (c - 0.83) * (c - 0.83)).max(0.0))
            .collect();
        let h = hist_from_densities(0.755, 0.01, &dens);
        let p = peak_position_quadratic(&h).unwrap();
        assert!((p - 0.83).abs() < 2e-3, "peak {p}");
    }

    #[test]
    fn symmetric_double_peak_has_unit_ratio() {
        let dens = vec![0.1, 5.0, 0.5, 0.2, 0.5, 5.0, 0.1];
        let h = hist_from_densities(0.0, 0.1, &dens);
        let r = peak_ratio(&h, 1).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        let (l, rgt) = two_peak_positions(&h, 1).unwrap();
        assert!(l < rgt);
    }

    #[test]
    fn single_peak_is_rejected_for_ratio() {
        let h = hist_from_densities(0.0, 0.1, &[0.1, 2.0, 5.0, 2.0, 0.1]);
        assert!(matches!(
            peak_ratio(&h, 1).unwrap_err(),
            EstimatorError::PeakCount { found: 1 }
        ));
    }

    #[test]
    fn asymmetric_double_peak_ratio() {
        let dens = vec![0.1, 2.0, 0.3, 0.2, 0.3, 6.0, 0.1];
        let h = hist_from_densities(0.0, 0.1, &dens);
        let r = peak_ratio(&h, 1).unwrap();
        assert!((r - 3.0).abs() < 1e-6, "ratio {r}");
    }
}
