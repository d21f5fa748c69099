//! Quadratic smoke suite: on `½wᵀAw − bᵀw` the momentum extrapolation used
//! by L-MoQ equals the look-ahead gradient of L-NAQ, so both drivers must
//! trace the same iterates.

use lmoq_core::{run, OptimConfig, OptimizerKind, Quadratic};
use serde::Serialize;

use crate::error::BenchError;

pub const SMOKE_DIM: usize = 20;
pub const SMOKE_ITERS: usize = 20;
pub const SMOKE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct SmokeCase {
    pub seed: u64,
    /// Largest `|w_naq − w_moq|` component over the final iterate.
    pub max_deviation: f64,
    /// Largest relative gap between the two loss traces.
    pub max_loss_gap: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmokeReport {
    pub dim: usize,
    pub iterations: usize,
    pub tolerance: f64,
    pub cases: Vec<SmokeCase>,
}

impl SmokeReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }
}

pub fn quadratic_case(seed: u64, memory: usize) -> Result<SmokeCase, BenchError> {
    let q = Quadratic::random(SMOKE_DIM, seed);
    // ε tiny so neither driver stops before SMOKE_ITERS
    let cfg = OptimConfig { memory, k_max: SMOKE_ITERS, epsilon: 1e-300, ..OptimConfig::default() };
    let w0 = vec![1.0; SMOKE_DIM];
    let naq = run(OptimizerKind::Lnaq, &q, w0.clone(), &cfg)?;
    let moq = run(OptimizerKind::Lmoq, &q, w0, &cfg)?;
    let max_deviation = naq.final_w.iter().zip(&moq.final_w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let max_loss_gap = naq
        .trace
        .iter()
        .zip(&moq.trace)
        .map(|(a, b)| (a.loss - b.loss).abs() / a.loss.abs().max(1.0))
        .fold(0.0, f64::max);
    let passed = naq.trace.len() == moq.trace.len()
        && naq.iterations() == SMOKE_ITERS
        && max_deviation <= SMOKE_TOLERANCE
        && max_loss_gap <= SMOKE_TOLERANCE;
    Ok(SmokeCase { seed, max_deviation, max_loss_gap, passed })
}

pub fn quadratic_smoke(base_seed: u64, cases: usize, memory: usize) -> Result<SmokeReport, BenchError> {
    let cases =
        (0..cases as u64).map(|i| quadratic_case(base_seed.wrapping_add(i), memory)).collect::<Result<_, _>>()?;
    Ok(SmokeReport { dim: SMOKE_DIM, iterations: SMOKE_ITERS, tolerance: SMOKE_TOLERANCE, cases })
}
