//! Limited-memory quasi-Newton optimizers for smooth unconstrained problems.
//!
//! Three drivers share the same building blocks:
//!
//! - **L-BFGS**: the classic two-loop recursion on `(s, y)` pairs.
//! - **L-NAQ**: L-BFGS driven by the Nesterov look-ahead gradient
//!   `∇E(w + μv)`, costing two gradient evaluations per iteration.
//! - **L-MoQ**: L-NAQ with the look-ahead gradient replaced by the momentum
//!   extrapolation `(1 + μ)∇E(w_k) − μ∇E(w_{k−1})`, which needs only one new
//!   gradient per iteration.
//!
//! The [`mlp`] and [`levy`] modules provide the function-approximation
//! benchmark (a small sigmoid network regressing the Levy function) used to
//! compare the drivers.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod levy;
pub mod linesearch;
pub mod lmem;
pub mod mlp;
pub mod momentum;
pub mod objective;
pub mod optim;
pub(crate) mod vecops;

pub use error::{Error, Result};
pub use levy::LevySpec;
pub use linesearch::LineSearchConfig;
pub use lmem::{CurvaturePair, LmemBuffer};
pub use mlp::{Dataset, MlpObjective, Network};
pub use momentum::{MomentumSchedule, ThetaRecurrence};
pub use objective::{Objective, Quadratic};
pub use optim::{
    run, theoretical_cost, CostModel, OptimConfig, OptimizerKind, OptimizerState, RunRecord, RunStatus, StepOutcome,
    TraceRow,
};

/// Flat vector of optimization variables.
pub type ParamVector = Vec<f64>;
