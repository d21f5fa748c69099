use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use lmoq_core::{OptimConfig, OptimizerKind, ThetaRecurrence};
use serde::{Deserialize, Serialize};

use crate::error::BenchError;

/// `lbfgs`, `lnaq`, `lmoq` or `all`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum OptimizerChoice {
    One(OptimizerKind),
    All,
}

impl OptimizerChoice {
    pub fn kinds(self) -> Vec<OptimizerKind> {
        match self {
            OptimizerChoice::One(k) => vec![k],
            OptimizerChoice::All => OptimizerKind::ALL.to_vec(),
        }
    }
}

impl fmt::Display for OptimizerChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizerChoice::One(k) => f.write_str(k.id()),
            OptimizerChoice::All => f.write_str("all"),
        }
    }
}

impl FromStr for OptimizerChoice {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(OptimizerChoice::All);
        }
        s.parse().map(OptimizerChoice::One).map_err(|_| {
            BenchError::InvalidConfig(format!("unknown optimizer '{s}' (expected lbfgs, lnaq, lmoq or all)"))
        })
    }
}

impl From<OptimizerChoice> for String {
    fn from(c: OptimizerChoice) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for OptimizerChoice {
    type Error = BenchError;

    fn try_from(s: String) -> Result<Self, BenchError> {
        s.parse()
    }
}

/// Benchmark protocol. Defaults follow the reference setup: 5–50–1 network,
/// `m = 16`, `k_max = 10000`, `ε = 1e-6`, 50 trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub optimizer: OptimizerChoice,
    pub m: usize,
    pub k_max: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub base_seed: u64,
    pub n_samples: usize,
    pub hidden_units: usize,
    pub out_dir: PathBuf,
    pub literal_theta: bool,
    /// Train on raw Levy values instead of targets min-max scaled to [0, 1].
    pub raw_targets: bool,
    pub export_data: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerChoice::All,
            m: 16,
            k_max: 10_000,
            epsilon: 1e-6,
            trials: 50,
            base_seed: 0,
            n_samples: 1000,
            hidden_units: 50,
            out_dir: PathBuf::from("results"),
            literal_theta: false,
            raw_targets: false,
            export_data: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials == 0 {
            return Err(BenchError::InvalidConfig("trials must be at least 1".into()));
        }
        if self.hidden_units == 0 || self.n_samples == 0 {
            return Err(BenchError::InvalidConfig("hidden units and samples must be positive".into()));
        }
        self.optim_config().validate()?;
        Ok(())
    }

    pub fn optim_config(&self) -> OptimConfig {
        OptimConfig {
            memory: self.m,
            k_max: self.k_max,
            epsilon: self.epsilon,
            recurrence: if self.literal_theta { ThetaRecurrence::Literal } else { ThetaRecurrence::Corrected },
            ..OptimConfig::default()
        }
    }

    pub fn seed_for_trial(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}
