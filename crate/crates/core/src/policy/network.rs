//! Feedforward heading network over a flat parameter vector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bound on the network's relative heading output (m). The output layer is
/// scaled through `R_MAX * tanh`, so every component lies in [-R_MAX, R_MAX].
pub const R_MAX: f64 = 500.0;

/// Layer widths `[input, hidden..., output]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyShape(Vec<usize>);

impl PolicyShape {
    pub fn new(layers: Vec<usize>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::invalid_argument(
                "a policy shape needs at least input and output widths",
            ));
        }
        if layers.iter().any(|&w| w == 0) {
            return Err(Error::invalid_argument("layer widths must be positive"));
        }
        Ok(PolicyShape(layers))
    }

    pub fn layers(&self) -> &[usize] {
        &self.0
    }

    pub fn input_dim(&self) -> usize {
        self.0[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.0.last().unwrap()
    }

    /// Total number of parameters: `sum(in*out + out)` over consecutive
    /// layer pairs. `[102, 200, 200, 50, 3]` gives exactly 71,003.
    pub fn param_count(&self) -> usize {
        self.0.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }
}

/// Flat parameter vector plus its shape descriptor.
///
/// Layout: for each layer pair `(a -> b)`, `b*a` weights in row-major order
/// (output index major), then `b` biases, concatenated over layers.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    shape: PolicyShape,
    values: Vec<f64>,
}

impl PolicyParams {
    pub fn new(shape: PolicyShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.param_count() {
            return Err(Error::invalid_argument(format!(
                "parameter vector of length {} does not match shape {:?} (expects {})",
                values.len(),
                shape.layers(),
                shape.param_count()
            )));
        }
        Ok(PolicyParams { shape, values })
    }

    pub fn zeros(shape: PolicyShape) -> Self {
        let n = shape.param_count();
        PolicyParams { shape, values: vec![0.0; n] }
    }

    pub fn shape(&self) -> &PolicyShape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Evaluate the network: hidden layers use `tanh`, the output layer is
/// scaled through `R_MAX * tanh`.
pub fn forward(params: &PolicyParams, input: &[f64]) -> Result<Vec<f64>> {
    let layers = params.shape.layers();
    if input.len() != layers[0] {
        return Err(Error::invalid_argument(format!(
            "input length {} does not match network input width {}",
            input.len(),
            layers[0]
        )));
    }
    let mut x = input.to_vec();
    let mut offset = 0;
    for (l, pair) in layers.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let weights = &params.values[offset..offset + a * b];
        let biases = &params.values[offset + a * b..offset + a * b + b];
        offset += a * b + b;
        let last = l == layers.len() - 2;
        let mut y = Vec::with_capacity(b);
        for o in 0..b {
            let row = &weights[o * a..(o + 1) * a];
            let mut acc = biases[o];
            for (w, xi) in row.iter().zip(&x) {
                acc += w * xi;
            }
            y.push(if last { R_MAX * acc.tanh() } else { acc.tanh() });
        }
        x = y;
    }
    Ok(x)
}

/// Relative heading reference in the agent-local frame: `x` forward along
/// the current heading, `y` left, `z` up, each in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadingTarget {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Interpret a 3-wide network output as a heading target.
pub fn heading_from_output(out: &[f64]) -> Result<HeadingTarget> {
    if out.len() != 3 {
        return Err(Error::invalid_argument(format!(
            "heading output must have 3 components, got {}",
            out.len()
        )));
    }
    Ok(HeadingTarget { x: out[0], y: out[1], z: out[2] })
}
