//! Log-log least-squares slope measurements.

use super::{EstimatorError, FitKind, FitResult};

/// Ordinary least squares y = slope * x + intercept; returns
/// (slope, intercept, mean squared residual).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let mse = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>()
        / n;
    (slope, intercept, mse)
}

/// Least-squares straight line in (log x, log y) over the window
/// `[window.0, window.1]`; the decay exponent is minus the slope.
///
/// Parameters: `slope`, `exponent` (= -slope), `amplitude` (the prefactor
/// of y = amplitude * x^slope). Residual is the MSE in log space.
pub fn power_law_slope(
    points: &[(f64, f64)],
    window: (f64, f64),
) -> Result<FitResult, EstimatorError> {
    let selected: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, _)| x >= window.0 && x <= window.1)
        .collect();
    if selected.len() < 5 {
        return Err(EstimatorError::TooFewPoints {
            needed: 5,
            got: selected.len(),
        });
    }
    if selected.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(EstimatorError::NonPositiveData);
    }
    let xs: Vec<f64> = selected.iter().map(|&(x, _)| x.ln()).collect();
    let ys: Vec<f64> = selected.iter().map(|&(_, y)| y.ln()).collect();
    let (slope, intercept, mse) = linear_fit(&xs, &ys);
    Ok(FitResult::new(FitKind::PowerLawSlope, window, mse, selected.len())
        .set("slope", slope)
        .set("exponent", -slope)
        .set("amplitude", intercept.exp()))
}

/// Growth exponent of the mean critical-avalanche size with system size:
/// fits `<s>(N) ~ N^beta` in log-log space over all supplied sizes.
pub fn mean_size_exponent(points: &[(f64, f64)]) -> Result<FitResult, EstimatorError> {
    if points.len() < 3 {
        return Err(EstimatorError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if points.iter().any(|&(n, s)| n <= 0.0 || s <= 0.0) {
        return Err(EstimatorError::NonPositiveData);
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, s)| s.ln()).collect();
    let (slope, intercept, mse) = linear_fit(&xs, &ys);
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(0.0, f64::max);
    Ok(FitResult::new(FitKind::PowerLawSlope, (lo, hi), mse, points.len())
        .set("beta", slope)
        .set("slope", slope)
        .set("amplitude", intercept.exp()))
}

/// Gap of the avalanche scaling relation beta = zeta_tau * (2 - tau).
pub fn scaling_relation_gap(beta: f64, zeta_tau: f64, tau: f64) -> f64 {
    (beta - zeta_tau * (2.0 - tau)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_power_law(c: f64, exponent: f64, n: usize) -> Vec<(f64, f64)> {
        (1..=n)
            .map(|k| {
                let x = 1.5f64.powi(k as i32);
                (x, c * x.powf(-exponent))
            })
            .collect()
    }

    #[test]
    fn exact_power_law_recovered() {
        let pts = sample_power_law(1.0, 2.89, 20);
        let fit = power_law_slope(&pts, (0.0, f64::INFINITY)).unwrap();
        assert!((fit.param("exponent") - 2.89).abs() < 1e-6);
        assert!(fit.residual < 1e-20);
    }

    #[test]
    fn amplitude_invariance() {
        let a = power_law_slope(&sample_power_law(1.0, 1.5, 12), (0.0, 1e12)).unwrap();
        let b = power_law_slope(&sample_power_law(42.0, 1.5, 12), (0.0, 1e12)).unwrap();
        assert!((a.param("exponent") - b.param("exponent")).abs() < 1e-12);
        // Rescaling x leaves the exponent unchanged too.
        let scaled: Vec<(f64, f64)> = sample_power_law(1.0, 1.5, 12)
            .into_iter()
            .map(|(x, y)| (7.0 * x, y))
            .collect();
        let c = power_law_slope(&scaled, (0.0, 1e12)).unwrap();
        assert!((a.param("exponent") - c.param("exponent")).abs() < 1e-12);
    }

    #[test]
    fn window_filters_points() {
        let mut pts = sample_power_law(1.0, 2.0, 15);
        // Contaminate outside the window; fit inside must stay exact.
        pts.push((1e9, 1.0));
        let fit = power_law_slope(&pts, (1.0, 1e5)).unwrap();
        assert!((fit.param("exponent") - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_sparse_or_nonpositive() {
        let pts = sample_power_law(1.0, 2.0, 4);
        assert!(matches!(
            power_law_slope(&pts, (0.0, 1e12)).unwrap_err(),
            EstimatorError::TooFewPoints { .. }
        ));
        let mut bad = sample_power_law(1.0, 2.0, 8);
        bad[3].1 = 0.0;
        assert_eq!(
            power_law_slope(&bad, (0.0, 1e12)).unwrap_err(),
            EstimatorError::NonPositiveData
        );
    }

    #[test]
    fn mean_size_examples() {
        let pts: Vec<(f64, f64)> = [128.0f64, 256.0, 512.0, 1024.0]
            .iter()
            .map(|&n| (n, n.powf(1.92)))
            .collect();
        let fit = mean_size_exponent(&pts).unwrap();
        assert!((fit.param("beta") - 1.92).abs() < 1e-9);
        // Relation check: beta = zeta_tau (2 - tau).
        let gap = scaling_relation_gap(1.92, 2.18, 1.12);
        assert!(gap < 0.01, "gap {gap}");
    }
}
