//! Nesterov momentum coefficients from the θ-recurrence.
//!
//! The schedule starts at `θ₀ = 1` and advances with
//!
//! ```text
//! θ_{k+1}² = (1 − θ_{k+1}) θ_k² + γ θ_{k+1}
//! μ_k      = θ_k (1 − θ_k) / (θ_k² + θ_{k+1})
//! ```
//!
//! With `γ > 0` the sequence θ decreases towards `√γ` and μ increases
//! towards `(1 − √γ)/(1 + √γ)`. The `(1 + θ_{k+1})` variant of the
//! recurrence is available as [`ThetaRecurrence::Literal`]; it drives θ above
//! one, so every μ it produces clamps to zero.

use crate::error::{Error, Result};

pub const DEFAULT_GAMMA: f64 = 1e-5;
pub const DEFAULT_MU_CAP: f64 = 0.99999;

/// Which form of the θ-recurrence to iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaRecurrence {
    /// `θ_{k+1}² = (1 − θ_{k+1}) θ_k² + γ θ_{k+1}`
    #[default]
    Corrected,
    /// `θ_{k+1}² = (1 + θ_{k+1}) θ_k² + γ θ_{k+1}`
    Literal,
}

/// Positive root of `θ² + bθ − c = 0` for `c > 0`, without cancellation.
fn positive_root(b: f64, c: f64) -> f64 {
    let disc = (b * b + 4.0 * c).sqrt();
    if b >= 0.0 {
        2.0 * c / (b + disc)
    } else {
        (disc - b) / 2.0
    }
}

/// Solves the corrected recurrence for `θ_{k+1}`.
pub fn advance_theta(theta_k: f64, gamma: f64) -> Result<f64> {
    if !(theta_k > 0.0 && theta_k <= 1.0) {
        return Err(Error::Domain(format!("theta_k must lie in (0, 1], got {theta_k}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    let t2 = theta_k * theta_k;
    Ok(positive_root(t2 - gamma, t2))
}

/// Solves the literal `(1 + θ_{k+1})` recurrence for `θ_{k+1}`.
pub fn advance_theta_literal(theta_k: f64, gamma: f64) -> Result<f64> {
    if !(theta_k > 0.0) || !theta_k.is_finite() {
        return Err(Error::Domain(format!("theta_k must be positive, got {theta_k}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    let t2 = theta_k * theta_k;
    Ok(positive_root(-(t2 + gamma), t2))
}

/// `θ_k (1 − θ_k) / (θ_k² + θ_{k+1})` clamped into `[0, mu_cap]`.
pub fn compute_mu(theta_k: f64, theta_k1: f64, mu_cap: f64) -> Result<f64> {
    if !(theta_k > 0.0) || !(theta_k1 > 0.0) {
        return Err(Error::Domain(format!("theta values must be positive, got ({theta_k}, {theta_k1})")));
    }
    let mu = theta_k * (1.0 - theta_k) / (theta_k * theta_k + theta_k1);
    if mu.is_nan() {
        return Err(Error::Domain(format!("momentum undefined for theta ({theta_k}, {theta_k1})")));
    }
    Ok(mu.clamp(0.0, mu_cap))
}

/// Stateful momentum schedule; each [`next_mu`](Self::next_mu) emits `μ_k`
/// and advances `θ_k → θ_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumSchedule {
    theta_k: f64,
    gamma: f64,
    mu_cap: f64,
    recurrence: ThetaRecurrence,
    // largest μ emitted so far
    mu_floor: f64,
}

impl Default for MomentumSchedule {
    fn default() -> Self {
        Self {
            theta_k: 1.0,
            gamma: DEFAULT_GAMMA,
            mu_cap: DEFAULT_MU_CAP,
            recurrence: ThetaRecurrence::Corrected,
            mu_floor: 0.0,
        }
    }
}

impl MomentumSchedule {
    pub fn new(gamma: f64, mu_cap: f64, recurrence: ThetaRecurrence) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidConfig(format!("gamma must be positive, got {gamma}")));
        }
        if !(0.0..1.0).contains(&mu_cap) {
            return Err(Error::InvalidConfig(format!("mu_cap must lie in [0, 1), got {mu_cap}")));
        }
        Ok(Self { theta_k: 1.0, gamma, mu_cap, recurrence, mu_floor: 0.0 })
    }

    pub fn theta(&self) -> f64 {
        self.theta_k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu_cap(&self) -> f64 {
        self.mu_cap
    }

    pub fn recurrence(&self) -> ThetaRecurrence {
        self.recurrence
    }

    /// Next `θ` without mutating the schedule.
    pub fn peek_theta(&self) -> f64 {
        // Inputs are validated at construction and θ stays in range, so
        // neither solver can fail here.
        let next = match self.recurrence {
            ThetaRecurrence::Corrected => advance_theta(self.theta_k, self.gamma),
            ThetaRecurrence::Literal => advance_theta_literal(self.theta_k, self.gamma),
        }
        .expect("theta stays in the solver's domain");
        // The literal form grows without bound; once it leaves f64 range
        // θ is held, and μ is already pinned at zero.
        if next.is_finite() {
            next
        } else {
            self.theta_k
        }
    }

    /// Emits `μ_k`. Once θ stalls at `√γ` the formula can wobble by an ulp,
    /// so the result is held at the running maximum.
    pub fn next_mu(&mut self) -> f64 {
        let next = self.peek_theta();
        let mu = compute_mu(self.theta_k, next, self.mu_cap).unwrap_or(0.0).max(self.mu_floor);
        self.theta_k = next;
        self.mu_floor = mu;
        mu
    }
}

impl Iterator for MomentumSchedule {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_mu())
    }
}
