//! Curvature-pair memory and the two-loop recursion.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::vecops::{axpy, dot, norm};
use crate::ParamVector;

pub const DEFAULT_CURVATURE_FLOOR: f64 = 1e-10;

/// One `(s, y)` pair with its cached `ρ = 1/(yᵀs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePair {
    pub s: ParamVector,
    pub y: ParamVector,
    pub rho: f64,
}

/// FIFO of at most `m` accepted curvature pairs, oldest first.
///
/// The initial inverse Hessian is `h0_scale · I` with the Shanno scaling
/// `sᵀy / yᵀy` taken from the most recently accepted pair.
#[derive(Debug, Clone)]
pub struct LmemBuffer {
    pairs: VecDeque<CurvaturePair>,
    capacity: usize,
    dim: usize,
    h0_scale: f64,
    curvature_floor: f64,
}

impl LmemBuffer {
    pub fn new(dim: usize, capacity: usize) -> Result<Self> {
        Self::with_floor(dim, capacity, DEFAULT_CURVATURE_FLOOR)
    }

    pub fn with_floor(dim: usize, capacity: usize, curvature_floor: f64) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidConfig("memory size m must be at least 1".into()));
        }
        if !(curvature_floor >= 0.0) {
            return Err(Error::InvalidConfig(format!("curvature floor must be nonnegative, got {curvature_floor}")));
        }
        Ok(Self { pairs: VecDeque::with_capacity(capacity), capacity, dim, h0_scale: 1.0, curvature_floor })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h0_scale(&self) -> f64 {
        self.h0_scale
    }

    /// Stored pairs, oldest first.
    pub fn pairs(&self) -> impl ExactSizeIterator<Item = &CurvaturePair> + DoubleEndedIterator {
        self.pairs.iter()
    }

    /// Drops every pair and resets the initial scaling to identity.
    pub fn clear(&mut self) {
        self.pairs.clear();
        self.h0_scale = 1.0;
    }

    /// Stores `(s, y)` if `yᵀs > floor·‖s‖‖y‖`, evicting the oldest pair when
    /// full. Returns whether the pair was accepted.
    pub fn push_pair(&mut self, s: ParamVector, y: ParamVector) -> Result<bool> {
        Error::check_dim(self.dim, s.len())?;
        Error::check_dim(self.dim, y.len())?;
        let ys = dot(&y, &s);
        let yy = dot(&y, &y);
        let threshold = self.curvature_floor * norm(&s) * norm(&y);
        if !(ys > threshold) || !ys.is_finite() || !(yy > 0.0) || !yy.is_finite() {
            return Ok(false);
        }
        if self.pairs.len() == self.capacity {
            self.pairs.pop_front();
        }
        self.h0_scale = ys / yy;
        self.pairs.push_back(CurvaturePair { s, y, rho: 1.0 / ys });
        Ok(true)
    }

    /// Computes `H·r` for the implicit inverse-Hessian approximation.
    pub fn two_loop(&self, r: &[f64]) -> Result<ParamVector> {
        Error::check_dim(self.dim, r.len())?;
        let mut q = r.to_vec();
        let mut sigma = vec![0.0; self.pairs.len()];
        for (pair, sig) in self.pairs.iter().zip(sigma.iter_mut()).rev() {
            *sig = pair.rho * dot(&pair.s, &q);
            axpy(-*sig, &pair.y, &mut q);
        }
        q.iter_mut().for_each(|x| *x *= self.h0_scale);
        for (pair, sig) in self.pairs.iter().zip(&sigma) {
            let beta = pair.rho * dot(&pair.y, &q);
            axpy(sig - beta, &pair.s, &mut q);
        }
        Ok(q)
    }
}
