//! Per-parameter learning-rate adaptation (bias-corrected ADAM).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// Exponential moving moments plus the update counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        AdamState {
            first_moment: vec![0.0; dim],
            second_moment: vec![0.0; dim],
            step_count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.first_moment.len()
    }
}

/// One ADAM update: returns `base_rate * m_hat / (sqrt(v_hat) + eps)` and
/// advances the state by exactly one step.
pub fn adam_step(
    grad: &[f64],
    base_rate: f64,
    state: &mut AdamState,
    config: &AdamConfig,
) -> Result<Vec<f64>> {
    if grad.len() != state.dim() {
        return Err(Error::invalid_argument(format!(
            "gradient length {} does not match ADAM state dimension {}",
            grad.len(),
            state.dim()
        )));
    }
    state.step_count += 1;
    let t = state.step_count as i32;
    let bc1 = 1.0 - config.beta1.powi(t);
    let bc2 = 1.0 - config.beta2.powi(t);
    let mut step = Vec::with_capacity(grad.len());
    for (j, &g) in grad.iter().enumerate() {
        let m = config.beta1 * state.first_moment[j] + (1.0 - config.beta1) * g;
        let v = config.beta2 * state.second_moment[j] + (1.0 - config.beta2) * g * g;
        state.first_moment[j] = m;
        state.second_moment[j] = v;
        let m_hat = m / bc1;
        let v_hat = v / bc2;
        step.push(base_rate * m_hat / (v_hat.sqrt() + config.eps));
    }
    Ok(step)
}
