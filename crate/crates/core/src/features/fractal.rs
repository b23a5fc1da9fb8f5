//! Petrosian and Higuchi fractal dimensions.

use crate::error::{Error, Result};

/// Count of sign changes in the first difference: pairs with `d_i * d_{i+1} < 0`.
pub fn derivative_sign_changes(samples: &[f64]) -> usize {
    let d: Vec<f64> = samples.windows(2).map(|w| w[1] - w[0]).collect();
    d.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
}

/// Petrosian fractal dimension.
pub fn petrosian_fd(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::input(format!(
            "PFD needs at least 3 samples, got {n}"
        )));
    }
    let n_delta = derivative_sign_changes(samples) as f64;
    let n = n as f64;
    let log_n = n.log10();
    Ok(log_n / (log_n + (n / (n + 0.4 * n_delta)).log10()))
}

/// Mean normalized curve length `L(k)` over the `k` offset sub-series.
fn curve_length(samples: &[f64], k: usize) -> f64 {
    let n = samples.len();
    let total: f64 = (0..k)
        .map(|m| {
            // m is zero-based here; the series is x[m], x[m+k], ...
            let steps = (n - 1 - m) / k;
            let sum: f64 = (1..=steps)
                .map(|i| (samples[m + i * k] - samples[m + (i - 1) * k]).abs())
                .sum();
            sum * (n - 1) as f64 / (steps * k) as f64 / k as f64
        })
        .sum();
    total / k as f64
}

/// Higuchi fractal dimension: least-squares slope of `ln L(k)` against
/// `ln(1/k)` for `k = 1..=k_max`.
///
/// A flat signal has zero curve length at every scale and is reported as
/// dimension 1 (a straight line). Scales with zero length are dropped from
/// the fit; if fewer than two remain the result is also 1.
pub fn higuchi_fd(samples: &[f64], k_max: usize) -> Result<f64> {
    if k_max < 2 {
        return Err(Error::input(format!(
            "k_max must be at least 2, got {k_max}"
        )));
    }
    if samples.len() < 2 * k_max {
        return Err(Error::input(format!(
            "HFD with k_max {k_max} needs at least {} samples, got {}",
            2 * k_max,
            samples.len()
        )));
    }
    let points: Vec<(f64, f64)> = (1..=k_max)
        .filter_map(|k| {
            let l = curve_length(samples, k);
            (l > 0.0).then(|| ((1.0 / k as f64).ln(), l.ln()))
        })
        .collect();
    if points.len() < 2 {
        return Ok(1.0);
    }
    Ok(least_squares_slope(&points))
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        let dx = x - mean_x;
        (sxy + dx * (y - mean_y), sxx + dx * dx)
    });
    sxy / sxx
}
