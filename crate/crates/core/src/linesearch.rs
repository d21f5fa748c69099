//! Backtracking line search on the Armijo sufficient-decrease condition.
//!
//! Only function values are requested; the slope at `α = 0` is supplied by
//! the caller, so a search never costs a gradient evaluation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchConfig {
    /// Sufficient-decrease constant `c` in `φ(α) ≤ φ(0) + c·α·φ'(0)`.
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub alpha_init: f64,
    /// Maximum number of trial steps (and therefore `φ` evaluations).
    pub max_backtracks: usize,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        Self { armijo_c: 1e-3, backtrack_factor: 0.5, alpha_init: 1.0, max_backtracks: 30 }
    }
}

impl LineSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(Error::InvalidConfig(format!("armijo_c must lie in (0, 1), got {}", self.armijo_c)));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "backtrack_factor must lie in (0, 1), got {}",
                self.backtrack_factor
            )));
        }
        if !(self.alpha_init > 0.0) || !self.alpha_init.is_finite() {
            return Err(Error::InvalidConfig(format!("alpha_init must be positive, got {}", self.alpha_init)));
        }
        if self.max_backtracks == 0 {
            return Err(Error::InvalidConfig("max_backtracks must be at least 1".into()));
        }
        Ok(())
    }
}

/// Accepted step from [`search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchOutcome {
    pub alpha: f64,
    /// `φ(alpha)`, so the caller does not need to re-evaluate.
    pub value: f64,
    pub fev_used: usize,
}

/// Tries `α = alpha_init · factor^j` for `j = 0, 1, …` and returns the first
/// step satisfying the Armijo condition.
///
/// Fails with [`Error::NonDescent`] when `dphi0 >= 0` (no evaluations made)
/// and with [`Error::LineSearchExhausted`] once `max_backtracks` trials have
/// failed; the latter carries the last trial step and its value.
pub fn search<F>(mut phi: F, phi0: f64, dphi0: f64, config: &LineSearchConfig) -> Result<LineSearchOutcome>
where
    F: FnMut(f64) -> f64,
{
    config.validate()?;
    if !(dphi0 < 0.0) {
        return Err(Error::NonDescent { slope: dphi0 });
    }
    let mut alpha = config.alpha_init;
    let mut value = f64::NAN;
    for trial in 1..=config.max_backtracks {
        value = phi(alpha);
        // NaN and inf fail the comparison and keep backtracking.
        if value <= phi0 + config.armijo_c * alpha * dphi0 {
            return Ok(LineSearchOutcome { alpha, value, fev_used: trial });
        }
        if trial < config.max_backtracks {
            alpha *= config.backtrack_factor;
        }
    }
    Err(Error::LineSearchExhausted { alpha, value, fev_used: config.max_backtracks })
}
