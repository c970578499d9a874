//! Optimizer configuration shared by all three update modes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::adam::AdamConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Es,
    Gass,
    Cem,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Es => "es",
            Mode::Gass => "gass",
            Mode::Cem => "cem",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub mode: Mode,
    /// Base learning rate `alpha0`.
    pub alpha0: f64,
    /// Learning-rate decay exponent; 0 keeps the rate constant.
    pub alpha_exp: f64,
    /// Base sample size `n0`.
    pub n0: usize,
    /// Sample-size growth constant; only used when `fixed_sample_size` is
    /// unset, and must then satisfy `tau > 2*alpha_exp`.
    pub tau: f64,
    /// ES noise standard deviation / GASS variance ridge.
    pub gamma: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// CEM elite fraction.
    pub elite_frac: f64,
    /// Constant sample size overriding the schedule. `Some(0)` means
    /// "follow the schedule" so config files can switch the schedule on.
    pub fixed_sample_size: Option<usize>,
    /// Draw perturbations in mirrored pairs.
    pub antithetic: bool,
    /// Initial per-coordinate sigma for the GASS/CEM search distribution.
    pub initial_sigma: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            mode: Mode::Es,
            alpha0: 0.01,
            alpha_exp: 0.0,
            n0: 50,
            tau: 1.0,
            gamma: 0.02,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            elite_frac: 0.2,
            fixed_sample_size: Some(50),
            antithetic: false,
            initial_sigma: 0.02,
        }
    }
}

impl OptimizerConfig {
    /// The constant sample size, if one is configured (0 disables it).
    pub fn fixed_sample_size(&self) -> Option<usize> {
        match self.fixed_sample_size {
            Some(0) | None => None,
            some => some,
        }
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            eps: self.adam_eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0) {
            return Err(Error::invalid_config("alpha0 must be positive"));
        }
        if !(0.0..1.0).contains(&self.alpha_exp) {
            return Err(Error::invalid_config("alpha_exp must lie in [0, 1)"));
        }
        if self.n0 == 0 {
            return Err(Error::invalid_config("n0 must be positive"));
        }
        if !(self.tau > 0.0) {
            return Err(Error::invalid_config("tau must be positive"));
        }
        if self.fixed_sample_size().is_none() && self.tau <= 2.0 * self.alpha_exp {
            return Err(Error::invalid_config(
                "active sample-size schedule requires tau > 2*alpha_exp",
            ));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::invalid_config("gamma must be positive"));
        }
        if !(self.elite_frac > 0.0 && self.elite_frac <= 1.0) {
            return Err(Error::invalid_config("elite_frac must lie in (0, 1]"));
        }
        for (name, beta) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::invalid_config(format!("{name} must lie in [0, 1)")));
            }
        }
        if !(self.adam_eps > 0.0) {
            return Err(Error::invalid_config("adam_eps must be positive"));
        }
        if !(self.initial_sigma > 0.0) {
            return Err(Error::invalid_config("initial_sigma must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        OptimizerConfig::default().validate().unwrap();
    }

    #[test]
    fn schedule_precondition_enforced_only_when_active() {
        let mut c = OptimizerConfig { alpha_exp: 0.6, tau: 1.0, ..OptimizerConfig::default() };
        assert!(c.validate().is_ok()); // fixed_sample_size active by default
        c.fixed_sample_size = None;
        assert!(c.validate().is_err());
        c.fixed_sample_size = Some(0);
        assert!(c.validate().is_err());
        c.tau = 1.3;
        assert!(c.validate().is_ok());
    }
}
