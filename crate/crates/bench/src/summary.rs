//! Aggregate JSON summary, one row per optimizer in Table-1 column order.

use std::fs;
use std::path::{Path, PathBuf};

use lmoq_core::{theoretical_cost, CostModel, LineSearchConfig, OptimizerKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub run_id: String,
    pub config: RunConfig,
    pub protocol: Protocol,
    pub methods: Vec<MethodSummary>,
    pub trials: Vec<TrialSummary>,
}

/// Fixed modelling choices recorded alongside the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub layer_sizes: Vec<usize>,
    pub parameters: usize,
    pub hidden_activation: String,
    pub output_activation: String,
    pub loss: String,
    pub init: String,
    pub data: String,
    pub normalization: String,
    pub line_search: String,
    pub gamma: f64,
    pub mu_cap: f64,
    pub theta_recurrence: String,
}

impl Protocol {
    pub fn new(config: &RunConfig) -> Self {
        let oc = config.optim_config();
        let LineSearchConfig { armijo_c, backtrack_factor, alpha_init, max_backtracks } = oc.line_search;
        let layer_sizes = vec![5, config.hidden_units, 1];
        Self {
            parameters: parameter_count(config),
            layer_sizes,
            hidden_activation: "sigmoid".into(),
            output_activation: "linear".into(),
            loss: "E = 1/(2n) sum_p (o_p - t_p)^2, full batch".into(),
            init: "uniform [-0.5, 0.5], ChaCha8 stream 1 seeded per trial".into(),
            data: format!(
                "{} samples uniform on [-4, 4]^5, Levy targets, ChaCha8 stream 0 seeded per trial",
                config.n_samples
            ),
            normalization: if config.raw_targets {
                "none (raw inputs and raw Levy targets)"
            } else {
                "raw inputs; targets min-max scaled to [0, 1] per training set"
            }
            .into(),
            line_search: format!(
                "backtracking Armijo c={armijo_c}, factor={backtrack_factor}, alpha0={alpha_init}, max_trials={max_backtracks}"
            ),
            gamma: oc.gamma,
            mu_cap: oc.mu_cap,
            theta_recurrence: if config.literal_theta { "literal" } else { "corrected" }.into(),
        }
    }
}

/// Means over all trials of one optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    #[serde(rename = "E")]
    pub e: f64,
    pub iters: f64,
    pub fev: f64,
    pub gev: f64,
    pub time_s: f64,
    pub trials: usize,
    pub diverged: usize,
    /// Mean function evaluations per iteration beyond the initial one.
    pub zeta: f64,
    pub cost_per_iter: f64,
    pub storage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub method: String,
    pub trial: usize,
    pub seed: u64,
    pub input_hash: String,
    pub status: String,
    #[serde(rename = "E")]
    pub e: f64,
    pub iters: usize,
    pub fev: u64,
    pub gev: u64,
    pub time_s: f64,
    pub line_search_exhaustions: usize,
}

fn parameter_count(config: &RunConfig) -> usize {
    crate::network(config).map_or(0, |n| n.parameter_count())
}

/// Deterministic 40-hex-digit identifier of a configuration. The output
/// directory is not part of the experiment and is left out.
pub fn run_id(config: &RunConfig) -> Result<String, BenchError> {
    let canonical = serde_json::to_string(&RunConfig { out_dir: PathBuf::new(), ..config.clone() })?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(hex::encode(digest)[..40].to_string())
}

pub fn method_summary(kind: OptimizerKind, trials: &[&TrialSummary], config: &RunConfig) -> MethodSummary {
    let n = trials.len() as f64;
    let mean = |f: &dyn Fn(&TrialSummary) -> f64| trials.iter().map(|t| f(t)).sum::<f64>() / n;
    let iters = mean(&|t| t.iters as f64);
    let fev = mean(&|t| t.fev as f64);
    let zeta = if iters > 0.0 { (fev - 1.0) / iters } else { 0.0 };
    let parameters = parameter_count(config);
    let (cost_per_iter, storage) = theoretical_cost(&CostModel {
        n: config.n_samples,
        d: parameters,
        m: config.m,
        zeta: zeta.max(f64::MIN_POSITIVE),
    })
    .unwrap_or((f64::NAN, f64::NAN));
    MethodSummary {
        method: kind.label().into(),
        e: mean(&|t| t.e),
        iters,
        fev,
        gev: mean(&|t| t.gev as f64),
        time_s: mean(&|t| t.time_s),
        trials: trials.len(),
        diverged: trials.iter().filter(|t| t.status == "diverged").count(),
        zeta,
        cost_per_iter,
        storage,
    }
}

impl Summary {
    pub fn to_json(&self) -> Result<String, BenchError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), BenchError> {
        fs::write(path, self.to_json()? + "\n").map_err(BenchError::io(path))
    }

    /// Plain-text table with the columns `method E iters fev gev time(s)`.
    pub fn table(&self) -> String {
        let mut out =
            format!("{:<8} {:>14} {:>10} {:>10} {:>10} {:>9}\n", "method", "E(w)", "iters", "fev", "gev", "time(s)");
        for m in &self.methods {
            out += &format!(
                "{:<8} {:>14.6e} {:>10.1} {:>10.1} {:>10.1} {:>9.2}\n",
                m.method, m.e, m.iters, m.fev, m.gev, m.time_s
            );
        }
        out
    }
}
