//! Learning-rate and sample-size schedules.

use crate::error::{Error, Result};
use crate::search::config::OptimizerConfig;

/// Schedule for iteration `k >= 1`:
///
/// * `alpha_k = alpha0 / k^alpha_exp`
/// * `N_k = ceil(n0 * k^(tau - alpha_exp))`, unless `fixed_sample_size` is
///   set, in which case `N_k` is that constant (the sample-size schedule is
///   then inactive and the `tau > 2*alpha_exp` requirement does not apply).
pub fn schedule(k: u64, config: &OptimizerConfig) -> Result<(f64, usize)> {
    if k < 1 {
        return Err(Error::invalid_argument("iterations are 1-based"));
    }
    let kf = k as f64;
    let alpha = config.alpha0 / kf.powf(config.alpha_exp);
    let n = match config.fixed_sample_size() {
        Some(n) => n,
        None => {
            if config.tau <= 2.0 * config.alpha_exp {
                return Err(Error::invalid_config(format!(
                    "sample-size schedule requires tau > 2*alpha_exp ({} <= {})",
                    config.tau,
                    2.0 * config.alpha_exp
                )));
            }
            // Small epsilon keeps exact-integer products from rounding up.
            (config.n0 as f64 * kf.powf(config.tau - config.alpha_exp) - 1e-9).ceil() as usize
        }
    };
    Ok((alpha, n))
}
