//! Levy test function and the regression dataset sampled from it.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mlp::Dataset;

/// Sampling protocol for the Levy regression task.
#[derive(Debug, Clone, PartialEq)]
pub struct LevySpec {
    pub n_dims: usize,
    pub box_low: f64,
    pub box_high: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for LevySpec {
    fn default() -> Self {
        Self { n_dims: 5, box_low: -4.0, box_high: 4.0, n_samples: 1000, seed: 0 }
    }
}

impl LevySpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_dims < 2 {
            return Err(Error::InvalidConfig(format!("Levy needs at least 2 dimensions, got {}", self.n_dims)));
        }
        if !(self.box_low < self.box_high) || !self.box_low.is_finite() || !self.box_high.is_finite() {
            return Err(Error::InvalidConfig(format!("invalid sampling box [{}, {}]", self.box_low, self.box_high)));
        }
        Ok(())
    }
}

/// `f(x) = (π/n){ Σ_{i<n} (x_i−1)²(1+10 sin²(πx_{i+1})) + 10 sin²(πx₁) + (x_n−1)² }`
pub fn levy_value(x: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Domain(format!("Levy needs at least 2 coordinates, got {n}")));
    }
    let sin2 = |v: f64| (PI * v).sin().powi(2);
    let chain: f64 = x.windows(2).map(|p| (p[0] - 1.0).powi(2) * (1.0 + 10.0 * sin2(p[1]))).sum();
    let total = chain + 10.0 * sin2(x[0]) + (x[n - 1] - 1.0).powi(2);
    Ok(PI / n as f64 * total)
}

/// Draws `n_samples` inputs uniformly from the box and labels them with
/// [`levy_value`]. Uses stream 0 of the seeded generator.
pub fn generate_dataset(spec: &LevySpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(0);
    let mut inputs = Vec::with_capacity(spec.n_samples * spec.n_dims);
    let mut targets = Vec::with_capacity(spec.n_samples);
    for _ in 0..spec.n_samples {
        let start = inputs.len();
        inputs.extend((0..spec.n_dims).map(|_| rng.random_range(spec.box_low..=spec.box_high)));
        targets.push(levy_value(&inputs[start..])?);
    }
    Dataset::new(spec.n_dims, 1, inputs, targets)
}
