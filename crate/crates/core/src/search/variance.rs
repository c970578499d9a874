//! Per-coordinate 2x2 variance of the sufficient statistics [theta, theta^2].

use crate::error::{Error, Result};

/// Unbiased sample variance of `T_i = [theta_i, theta_i^2]`:
///
/// ```text
/// V = 1/(N-1) * sum_i T_i T_i'  -  1/(N^2-N) * (sum_i T_i)(sum_i T_i)'
/// ```
///
/// The result is symmetric and positive semidefinite up to rounding.
pub fn estimate_variance_2x2(thetas: &[f64]) -> Result<[[f64; 2]; 2]> {
    let n = thetas.len();
    if n < 2 {
        return Err(Error::invalid_argument(format!(
            "variance estimate needs at least 2 samples, got {n}"
        )));
    }
    let nf = n as f64;
    let mut outer = [[0.0f64; 2]; 2];
    let mut sum = [0.0f64; 2];
    for &t in thetas {
        let ti = [t, t * t];
        for r in 0..2 {
            for c in 0..2 {
                outer[r][c] += ti[r] * ti[c];
            }
            sum[r] += ti[r];
        }
    }
    let mut v = [[0.0f64; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            v[r][c] = outer[r][c] / (nf - 1.0) - sum[r] * sum[c] / (nf * nf - nf);
        }
    }
    Ok(v)
}
