//! L-BFGS, L-NAQ and L-MoQ drivers.
//!
//! All three share the curvature memory, the momentum schedule and the
//! backtracking line search. They differ in the vector fed to the two-loop
//! recursion and in the curvature pair they store:
//!
//! | driver | direction input `r_k`            | `s_k`                  | `y_k`                       | new gradients |
//! |--------|----------------------------------|------------------------|-----------------------------|---------------|
//! | L-BFGS | `∇E(w_k)`                        | `w_{k+1} − w_k`        | `∇E(w_{k+1}) − ∇E(w_k)`     | 1             |
//! | L-NAQ  | `∇E(w_k + μ_k v_k)`              | `w_{k+1} − (w_k+μ_k v_k)` | `∇E(w_{k+1}) − r_k`      | 2             |
//! | L-MoQ  | `(1+μ_k)∇E(w_k) − μ_k∇E(w_{k−1})` | `w_{k+1} − (w_k+μ_k v_k)` | `∇E(w_{k+1}) − r_k`      | 1             |
//!
//! The search direction is `d_k = −H_k r_k`, the step is
//! `v_{k+1} = μ_k v_k + α_k d_k`, `w_{k+1} = w_k + v_{k+1}`, and `α_k` comes
//! from backtracking on `φ(α) = E(w_k + μ_k v_k + α d_k)`.
//!
//! Evaluation counters follow a strict contract: the initial point costs one
//! function and one gradient evaluation; afterwards each driver pays exactly
//! the gradients listed above (L-NAQ reuses `∇E(w_k)` whenever the look-ahead
//! point coincides with `w_k`, which always happens at `k = 0`).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::linesearch::{self, LineSearchConfig};
use crate::lmem::{LmemBuffer, DEFAULT_CURVATURE_FLOOR};
use crate::momentum::{MomentumSchedule, ThetaRecurrence, DEFAULT_GAMMA, DEFAULT_MU_CAP};
use crate::objective::Objective;
use crate::vecops::{add_scaled, all_finite, axpy, dot, norm, sub};
use crate::ParamVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OptimizerKind {
    Lbfgs,
    Lnaq,
    Lmoq,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 3] = [OptimizerKind::Lbfgs, OptimizerKind::Lnaq, OptimizerKind::Lmoq];

    /// Lowercase identifier used on the command line and in file names.
    pub fn id(self) -> &'static str {
        match self {
            OptimizerKind::Lbfgs => "lbfgs",
            OptimizerKind::Lnaq => "lnaq",
            OptimizerKind::Lmoq => "lmoq",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OptimizerKind::Lbfgs => "L-BFGS",
            OptimizerKind::Lnaq => "L-NAQ",
            OptimizerKind::Lmoq => "L-MoQ",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "lbfgs" => Ok(OptimizerKind::Lbfgs),
            "lnaq" => Ok(OptimizerKind::Lnaq),
            "lmoq" => Ok(OptimizerKind::Lmoq),
            _ => Err(Error::InvalidConfig(format!("unknown optimizer '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimConfig {
    /// Number of stored curvature pairs `m`.
    pub memory: usize,
    pub k_max: usize,
    /// Gradient-norm tolerance `ε`.
    pub epsilon: f64,
    pub line_search: LineSearchConfig,
    pub gamma: f64,
    pub mu_cap: f64,
    pub recurrence: ThetaRecurrence,
    pub curvature_floor: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            memory: 16,
            k_max: 10_000,
            epsilon: 1e-6,
            line_search: LineSearchConfig::default(),
            gamma: DEFAULT_GAMMA,
            mu_cap: DEFAULT_MU_CAP,
            recurrence: ThetaRecurrence::Corrected,
            curvature_floor: DEFAULT_CURVATURE_FLOOR,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.memory == 0 {
            return Err(Error::InvalidConfig("memory size m must be at least 1".into()));
        }
        if self.k_max == 0 {
            return Err(Error::InvalidConfig("k_max must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        self.line_search.validate()?;
        MomentumSchedule::new(self.gamma, self.mu_cap, self.recurrence)?;
        Ok(())
    }
}

/// Result of a single [`OptimizerState::step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    /// `‖∇E(w_k)‖ ≤ ε` on entry; nothing was evaluated or moved.
    Converged,
    Stepped {
        alpha: f64,
        mu: f64,
        pair_accepted: bool,
        /// Backtracking ran out of trials and the smallest step was taken.
        line_search_exhausted: bool,
    },
    /// The new loss or a new gradient was non-finite. The iterate is left at
    /// `w_k`; counters include the evaluations spent.
    Diverged,
}

/// Mutable optimizer state for one run.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    kind: OptimizerKind,
    config: OptimConfig,
    w: ParamVector,
    v: ParamVector,
    grad: ParamVector,
    grad_prev: Option<ParamVector>,
    loss: f64,
    k: usize,
    fev: u64,
    gev: u64,
    schedule: MomentumSchedule,
    memory: LmemBuffer,
    converged: bool,
}

struct Proposal {
    w: ParamVector,
    v: ParamVector,
    grad: ParamVector,
    loss: f64,
    s: ParamVector,
    y: ParamVector,
    alpha: f64,
    mu: f64,
    exhausted: bool,
}

impl OptimizerState {
    /// Evaluates `E(w₀)` and `∇E(w₀)` (one fev, one gev).
    pub fn new<O: Objective + ?Sized>(
        kind: OptimizerKind,
        objective: &O,
        w0: ParamVector,
        config: OptimConfig,
    ) -> Result<Self> {
        config.validate()?;
        let dim = objective.dim();
        Error::check_dim(dim, w0.len())?;
        let loss = objective.value(&w0);
        let mut grad = vec![0.0; dim];
        objective.gradient(&w0, &mut grad);
        Ok(Self {
            kind,
            config,
            v: vec![0.0; dim],
            w: w0,
            grad,
            grad_prev: None,
            loss,
            k: 0,
            fev: 1,
            gev: 1,
            schedule: MomentumSchedule::new(config.gamma, config.mu_cap, config.recurrence)?,
            memory: LmemBuffer::with_floor(dim, config.memory, config.curvature_floor)?,
            converged: false,
        })
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn config(&self) -> &OptimConfig {
        &self.config
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn velocity(&self) -> &[f64] {
        &self.v
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    pub fn previous_gradient(&self) -> Option<&[f64]> {
        self.grad_prev.as_deref()
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn grad_norm(&self) -> f64 {
        norm(&self.grad)
    }

    pub fn iteration(&self) -> usize {
        self.k
    }

    pub fn fev(&self) -> u64 {
        self.fev
    }

    pub fn gev(&self) -> u64 {
        self.gev
    }

    pub fn memory(&self) -> &LmemBuffer {
        &self.memory
    }

    pub fn schedule(&self) -> &MomentumSchedule {
        &self.schedule
    }

    pub fn is_converged(&self) -> bool {
        self.converged
    }

    pub fn is_finite(&self) -> bool {
        self.loss.is_finite() && all_finite(&self.grad)
    }

    /// Advances one iteration with the driver selected at construction.
    pub fn step<O: Objective + ?Sized>(&mut self, objective: &O) -> Result<StepOutcome> {
        match self.kind {
            OptimizerKind::Lbfgs => self.step_lbfgs(objective),
            OptimizerKind::Lnaq => self.step_lnaq(objective),
            OptimizerKind::Lmoq => self.step_lmoq(objective),
        }
    }

    fn gate(&mut self) -> bool {
        if self.grad_norm() <= self.config.epsilon {
            self.converged = true;
        }
        self.converged
    }

    pub fn step_lbfgs<O: Objective + ?Sized>(&mut self, objective: &O) -> Result<StepOutcome> {
        if self.gate() {
            return Ok(StepOutcome::Converged);
        }
        let r = self.grad.clone();
        let base = self.w.clone();
        let base_loss = self.loss;
        self.finish_step(objective, 0.0, base, base_loss, r)
    }

    pub fn step_lnaq<O: Objective + ?Sized>(&mut self, objective: &O) -> Result<StepOutcome> {
        if self.gate() {
            return Ok(StepOutcome::Converged);
        }
        let mu = self.schedule.next_mu();
        let (base, base_loss, r) = if self.lookahead_is_current(mu) {
            (self.w.clone(), self.loss, self.grad.clone())
        } else {
            let base = add_scaled(&self.w, mu, &self.v);
            let base_loss = objective.value(&base);
            self.fev += 1;
            let mut g = vec![0.0; base.len()];
            objective.gradient(&base, &mut g);
            self.gev += 1;
            if !base_loss.is_finite() || !all_finite(&g) {
                return Ok(StepOutcome::Diverged);
            }
            (base, base_loss, g)
        };
        self.finish_step(objective, mu, base, base_loss, r)
    }

    pub fn step_lmoq<O: Objective + ?Sized>(&mut self, objective: &O) -> Result<StepOutcome> {
        if self.gate() {
            return Ok(StepOutcome::Converged);
        }
        let mu = self.schedule.next_mu();
        let r = match (&self.grad_prev, mu) {
            (Some(prev), mu) if mu != 0.0 => {
                self.grad.iter().zip(prev).map(|(g, gp)| (1.0 + mu) * g - mu * gp).collect()
            }
            _ => self.grad.clone(),
        };
        let (base, base_loss) = if self.lookahead_is_current(mu) {
            (self.w.clone(), self.loss)
        } else {
            let base = add_scaled(&self.w, mu, &self.v);
            let base_loss = objective.value(&base);
            self.fev += 1;
            if !base_loss.is_finite() {
                return Ok(StepOutcome::Diverged);
            }
            (base, base_loss)
        };
        self.finish_step(objective, mu, base, base_loss, r)
    }

    fn lookahead_is_current(&self, mu: f64) -> bool {
        mu == 0.0 || self.v.iter().all(|x| *x == 0.0)
    }

    /// Shared tail: direction `−H r`, line search from `base`, gradient at
    /// the new point, curvature pair `(w_{k+1} − base, ∇E(w_{k+1}) − r)`.
    fn finish_step<O: Objective + ?Sized>(
        &mut self,
        objective: &O,
        mu: f64,
        base: ParamVector,
        base_loss: f64,
        r: ParamVector,
    ) -> Result<StepOutcome> {
        let mut d = self.memory.two_loop(&r)?;
        d.iter_mut().for_each(|x| *x = -*x);
        let mut slope = dot(&r, &d);
        if !(slope < 0.0) || !slope.is_finite() {
            // The implicit H lost positive definiteness numerically; restart
            // from steepest descent.
            self.memory.clear();
            d = r.iter().map(|x| -x).collect();
            slope = dot(&r, &d);
        }

        let mut trial = vec![0.0; base.len()];
        let mut phi = |alpha: f64| {
            for ((t, b), di) in trial.iter_mut().zip(&base).zip(&d) {
                *t = b + alpha * di;
            }
            objective.value(&trial)
        };
        let (alpha, loss, exhausted) = match linesearch::search(&mut phi, base_loss, slope, &self.config.line_search) {
            Ok(out) => {
                self.fev += out.fev_used as u64;
                (out.alpha, out.value, false)
            }
            Err(Error::LineSearchExhausted { alpha, value, fev_used }) => {
                self.fev += fev_used as u64;
                (alpha, value, true)
            }
            Err(e) => return Err(e),
        };
        if !loss.is_finite() {
            return Ok(StepOutcome::Diverged);
        }

        let w_new = add_scaled(&base, alpha, &d);
        let mut v_new: ParamVector = self.v.iter().map(|x| mu * x).collect();
        axpy(alpha, &d, &mut v_new);
        let mut g_new = vec![0.0; w_new.len()];
        objective.gradient(&w_new, &mut g_new);
        self.gev += 1;
        if !all_finite(&g_new) {
            return Ok(StepOutcome::Diverged);
        }

        let s = sub(&w_new, &base);
        let y = sub(&g_new, &r);
        let proposal = Proposal { w: w_new, v: v_new, grad: g_new, loss, s, y, alpha, mu, exhausted };
        self.commit(proposal)
    }

    fn commit(&mut self, p: Proposal) -> Result<StepOutcome> {
        let pair_accepted = self.memory.push_pair(p.s, p.y)?;
        self.w = p.w;
        self.v = p.v;
        self.grad_prev = Some(std::mem::replace(&mut self.grad, p.grad));
        self.loss = p.loss;
        self.k += 1;
        Ok(StepOutcome::Stepped { alpha: p.alpha, mu: p.mu, pair_accepted, line_search_exhausted: p.exhausted })
    }
}

/// One row of a run trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub loss: f64,
    pub grad_norm: f64,
    pub fev: u64,
    pub gev: u64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIterations,
    Diverged,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxIterations => "max_iterations",
            RunStatus::Diverged => "diverged",
        }
    }
}

/// Per-iteration trace plus final summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub kind: OptimizerKind,
    pub status: RunStatus,
    /// One row per completed iteration, plus the `k = 0` row.
    pub trace: Vec<TraceRow>,
    pub final_w: ParamVector,
    pub line_search_exhaustions: usize,
    pub wall_seconds: f64,
}

impl RunRecord {
    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.k)
    }

    pub fn final_loss(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.loss)
    }

    pub fn fev(&self) -> u64 {
        self.trace.last().map_or(0, |r| r.fev)
    }

    pub fn gev(&self) -> u64 {
        self.trace.last().map_or(0, |r| r.gev)
    }
}

/// Iterates `kind` from `w0` until `‖∇E(w_k)‖ ≤ ε` or `k = k_max`.
///
/// A non-finite loss or gradient ends the run with [`Error::Diverged`],
/// which carries the trace up to the last finite iterate.
pub fn run<O: Objective + ?Sized>(
    kind: OptimizerKind,
    objective: &O,
    w0: ParamVector,
    config: &OptimConfig,
) -> Result<RunRecord> {
    let start = Instant::now();
    let mut state = OptimizerState::new(kind, objective, w0, *config)?;
    let row = |state: &OptimizerState| TraceRow {
        k: state.iteration(),
        loss: state.loss(),
        grad_norm: state.grad_norm(),
        fev: state.fev(),
        gev: state.gev(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let mut trace = vec![row(&state)];
    let mut exhaustions = 0;
    let finish = |state: OptimizerState, trace, status, exhaustions| RunRecord {
        kind,
        status,
        trace,
        final_w: state.w,
        line_search_exhaustions: exhaustions,
        wall_seconds: start.elapsed().as_secs_f64(),
    };

    if !state.is_finite() {
        let record = finish(state, trace, RunStatus::Diverged, 0);
        return Err(Error::Diverged { record: Box::new(record) });
    }
    let mut status = RunStatus::MaxIterations;
    while state.iteration() < config.k_max {
        match state.step(objective)? {
            StepOutcome::Converged => {
                status = RunStatus::Converged;
                break;
            }
            StepOutcome::Stepped { line_search_exhausted, .. } => {
                exhaustions += usize::from(line_search_exhausted);
                trace.push(row(&state));
            }
            StepOutcome::Diverged => {
                let record = finish(state, trace, RunStatus::Diverged, exhaustions);
                return Err(Error::Diverged { record: Box::new(record) });
            }
        }
    }
    if status == RunStatus::MaxIterations && state.grad_norm() <= config.epsilon {
        status = RunStatus::Converged;
    }
    Ok(finish(state, trace, status, exhaustions))
}

/// Sizes entering the per-iteration cost and storage estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    /// Training samples.
    pub n: usize,
    /// Parameters.
    pub d: usize,
    /// Memory size.
    pub m: usize,
    /// Mean line-search function evaluations per iteration.
    pub zeta: f64,
}

/// `(n·d + 4·m·d + 2·d + ζ·n·d, (2m + 1)·d)`.
///
/// The storage figure covers the pair memory and one gradient; L-MoQ keeps
/// one more `d`-vector for `∇E(w_{k−1})`.
pub fn theoretical_cost(model: &CostModel) -> Result<(f64, f64)> {
    if model.n == 0 || model.d == 0 || model.m == 0 || !(model.zeta > 0.0) {
        return Err(Error::InvalidConfig(format!("cost model fields must be positive: {model:?}")));
    }
    let (n, d, m) = (model.n as f64, model.d as f64, model.m as f64);
    let flops = n * d + 4.0 * m * d + 2.0 * d + model.zeta * n * d;
    let storage = (2.0 * m + 1.0) * d;
    Ok((flops, storage))
}
