use crate::error::{Error, Result};

/// Hjorth mobility and complexity from the mean-square of the signal and of
/// its first and second differences. Signals without variation give `(0, 0)`.
pub fn hjorth_params(samples: &[f64]) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::input(format!(
            "Hjorth parameters need at least 3 samples, got {n}"
        )));
    }
    let d: Vec<f64> = samples.windows(2).map(|w| w[1] - w[0]).collect();
    let activity = mean_square(samples);
    let a1 = mean_square(&d);
    if activity == 0.0 || a1 == 0.0 {
        return Ok((0.0, 0.0));
    }
    let a2 = d
        .windows(2)
        .map(|w| {
            let e = w[1] - w[0];
            e * e
        })
        .sum::<f64>()
        / (n - 2) as f64;
    let mobility = (a1 / activity).sqrt();
    let complexity = (a2 / a1).sqrt() / mobility;
    Ok((mobility, complexity))
}

fn mean_square(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}
