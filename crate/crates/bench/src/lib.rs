//! Multi-trial benchmark harness: Levy regression with a 5–H–1 network,
//! trained by each optimizer on paired seeds.
//!
//! Output layout under `out_dir`:
//!
//! ```text
//! traces/<optimizer>_trial<NNN>.csv   k,E,grad_norm,fev,gev,elapsed_ms
//! curves/<optimizer>.txt              iteration, mean E over running trials
//! data/trial<NNN>.csv                 training set (with --export-data)
//! summary.json                        per-optimizer means + per-trial rows
//! ```

pub mod config;
pub mod curve;
pub mod error;
pub mod smoke;
pub mod summary;
pub mod trace;

use std::fs;
use std::path::{Path, PathBuf};

use lmoq_core::levy::generate_dataset;
use lmoq_core::{Dataset, Error as CoreError, LevySpec, MlpObjective, Network, OptimizerKind, RunRecord};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub use config::{OptimizerChoice, RunConfig};
pub use error::BenchError;
pub use summary::{MethodSummary, Summary, TrialSummary};

/// One optimizer run on one trial's problem.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub input_hash: String,
    pub record: RunRecord,
    pub diverged: bool,
}

impl TrialResult {
    pub fn kind(&self) -> OptimizerKind {
        self.record.kind
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkOutcome {
    pub results: Vec<TrialResult>,
    pub summary: Summary,
}

impl BenchmarkOutcome {
    pub fn records(&self) -> Vec<RunRecord> {
        self.results.iter().map(|r| r.record.clone()).collect()
    }

    pub fn any_diverged(&self) -> bool {
        self.results.iter().any(|r| r.diverged)
    }
}

pub fn network(config: &RunConfig) -> Result<Network, BenchError> {
    Ok(Network::new(vec![5, config.hidden_units, 1])?)
}

/// Training set and initial weights for trial `trial`; every optimizer sees
/// the same pair. Targets are min-max scaled to `[0, 1]` unless
/// `raw_targets` is set.
pub fn trial_problem(config: &RunConfig, trial: usize) -> Result<(Dataset, Vec<f64>), BenchError> {
    let seed = config.seed_for_trial(trial);
    let raw = generate_dataset(&LevySpec { n_samples: config.n_samples, seed, ..LevySpec::default() })?;
    let data = if config.raw_targets { raw } else { raw.with_unit_targets() };
    let w0 = network(config)?.init_params(seed);
    Ok((data, w0))
}

/// SHA-256 over the little-endian bytes of inputs, targets and `w₀`.
pub fn input_hash(data: &Dataset, w0: &[f64]) -> String {
    let mut hasher = Sha256::new();
    for x in data.inputs().iter().chain(data.targets()).chain(w0) {
        hasher.update(x.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

fn run_trial(config: &RunConfig, kind: OptimizerKind, trial: usize) -> Result<TrialResult, BenchError> {
    let (data, w0) = trial_problem(config, trial)?;
    let input_hash = input_hash(&data, &w0);
    let objective = MlpObjective::new(network(config)?, data)?;
    let (record, diverged) = match lmoq_core::run(kind, &objective, w0, &config.optim_config()) {
        Ok(record) => (record, false),
        Err(CoreError::Diverged { record }) => (*record, true),
        Err(e) => return Err(e.into()),
    };
    Ok(TrialResult { trial, seed: config.seed_for_trial(trial), input_hash, record, diverged })
}

pub fn trace_path(out_dir: &Path, kind: OptimizerKind, trial: usize) -> PathBuf {
    out_dir.join("traces").join(format!("{}_trial{trial:03}.csv", kind.id()))
}

pub fn curve_path(out_dir: &Path, kind: OptimizerKind) -> PathBuf {
    out_dir.join("curves").join(format!("{}.txt", kind.id()))
}

fn trial_summary(r: &TrialResult) -> TrialSummary {
    TrialSummary {
        method: r.kind().id().into(),
        trial: r.trial,
        seed: r.seed,
        input_hash: r.input_hash.clone(),
        status: r.record.status.as_str().into(),
        e: r.record.final_loss(),
        iters: r.record.iterations(),
        fev: r.record.fev(),
        gev: r.record.gev(),
        time_s: r.record.wall_seconds,
        line_search_exhaustions: r.record.line_search_exhaustions,
    }
}

/// Runs every (trial, optimizer) pair on the rayon pool, then writes traces,
/// curves and the summary. Diverged trials are kept and flagged.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchmarkOutcome, BenchError> {
    config.validate()?;
    let kinds = config.optimizer.kinds();
    let jobs: Vec<(usize, OptimizerKind)> =
        (0..config.trials).flat_map(|t| kinds.iter().map(move |&k| (t, k))).collect();
    let results: Vec<TrialResult> = jobs.par_iter().map(|&(t, k)| run_trial(config, k, t)).collect::<Result<_, _>>()?;

    let out = &config.out_dir;
    for dir in ["traces", "curves"] {
        fs::create_dir_all(out.join(dir)).map_err(BenchError::io(out.join(dir)))?;
    }
    for r in &results {
        trace::write_trace_file(&r.record, &trace_path(out, r.kind(), r.trial))?;
    }
    let records: Vec<RunRecord> = results.iter().map(|r| r.record.clone()).collect();
    for &kind in &kinds {
        curve::export_curve_file(&records, kind, &curve_path(out, kind))?;
    }
    if config.export_data {
        let dir = out.join("data");
        fs::create_dir_all(&dir).map_err(BenchError::io(&dir))?;
        for t in 0..config.trials {
            let path = dir.join(format!("trial{t:03}.csv"));
            let file = fs::File::create(&path).map_err(BenchError::io(&path))?;
            trial_problem(config, t)?.0.write_csv(std::io::BufWriter::new(file)).map_err(BenchError::io(&path))?;
        }
    }

    let trials: Vec<TrialSummary> = results.iter().map(trial_summary).collect();
    let methods = kinds
        .iter()
        .map(|&k| {
            let rows: Vec<&TrialSummary> = trials.iter().filter(|t| t.method == k.id()).collect();
            summary::method_summary(k, &rows, config)
        })
        .collect();
    let summary = Summary {
        run_id: summary::run_id(config)?,
        config: config.clone(),
        protocol: summary::Protocol::new(config),
        methods,
        trials,
    };
    summary.write(&out.join("summary.json"))?;
    Ok(BenchmarkOutcome { results, summary })
}
