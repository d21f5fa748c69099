use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use lmoq_bench::smoke::quadratic_smoke;
use lmoq_bench::{run_benchmark, OptimizerChoice, RunConfig};

/// Compare L-BFGS, L-NAQ and L-MoQ on MLP regression of the Levy function.
#[derive(Debug, Parser)]
#[command(name = "lmoq-bench", version)]
struct Cli {
    /// lbfgs, lnaq, lmoq or all
    #[arg(long, default_value = "all")]
    optimizer: OptimizerChoice,

    /// Number of stored curvature pairs
    #[arg(long = "memory", default_value_t = 16)]
    memory: usize,

    #[arg(long, default_value_t = 10_000)]
    kmax: usize,

    /// Gradient-norm stopping tolerance
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,

    #[arg(long, default_value_t = 50)]
    trials: usize,

    /// Base seed; trial t uses seed + t for both data and initial weights
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Training samples per trial
    #[arg(long, default_value_t = 1000)]
    samples: usize,

    /// Hidden units of the 5-H-1 network
    #[arg(long, default_value_t = 50)]
    hidden: usize,

    #[arg(long, default_value = "results")]
    out: PathBuf,

    /// Iterate the uncorrected (1 + theta) recurrence
    #[arg(long)]
    literal_theta: bool,

    /// Run the quadratic L-MoQ/L-NAQ equivalence suite instead of Levy
    #[arg(long)]
    quadratic_smoke: bool,

    /// Exit 0 even if some trial diverged
    #[arg(long)]
    allow_diverged: bool,

    /// Train on raw Levy values (default scales targets to [0, 1])
    #[arg(long)]
    raw_targets: bool,

    /// Also write each trial's training set as CSV
    #[arg(long)]
    export_data: bool,

    /// Worker threads (0 = one per core)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    }

    if cli.quadratic_smoke {
        let report = quadratic_smoke(cli.seed, cli.trials, cli.memory)?;
        for case in &report.cases {
            println!(
                "seed {:>4}  max |w_naq - w_moq| = {:.3e}  max loss gap = {:.3e}  {}",
                case.seed,
                case.max_deviation,
                case.max_loss_gap,
                if case.passed { "ok" } else { "FAIL" }
            );
        }
        std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
        let path = cli.out.join("quadratic_smoke.json");
        std::fs::write(&path, serde_json::to_string_pretty(&report)?)
            .with_context(|| format!("writing {}", path.display()))?;
        return Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE });
    }

    let config = RunConfig {
        optimizer: cli.optimizer,
        m: cli.memory,
        k_max: cli.kmax,
        epsilon: cli.eps,
        trials: cli.trials,
        base_seed: cli.seed,
        n_samples: cli.samples,
        hidden_units: cli.hidden,
        out_dir: cli.out,
        literal_theta: cli.literal_theta,
        raw_targets: cli.raw_targets,
        export_data: cli.export_data,
    };
    let outcome = run_benchmark(&config)?;
    print!("{}", outcome.summary.table());
    println!("run {} -> {}", outcome.summary.run_id, config.out_dir.display());

    let diverged: Vec<_> = outcome.results.iter().filter(|r| r.diverged).collect();
    for r in &diverged {
        eprintln!("diverged: {} trial {} at iteration {}", r.kind(), r.trial, r.record.iterations());
    }
    if !diverged.is_empty() && !cli.allow_diverged {
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
