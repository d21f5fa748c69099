use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vecops::dot;

/// A smooth objective `E(w)` with its gradient.
///
/// Implementations may assume `w.len() == self.dim()`; the drivers check
/// dimensions once before iterating.
pub trait Objective {
    fn dim(&self) -> usize;

    fn value(&self, w: &[f64]) -> f64;

    fn gradient(&self, w: &[f64], out: &mut [f64]);
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn value(&self, w: &[f64]) -> f64 {
        (**self).value(w)
    }

    fn gradient(&self, w: &[f64], out: &mut [f64]) {
        (**self).gradient(w, out)
    }
}

/// `E(w) = ½ wᵀAw − bᵀw` with `A` symmetric positive definite (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    dim: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Quadratic {
    pub fn new(dim: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Error::check_dim(dim * dim, a.len())?;
        Error::check_dim(dim, b.len())?;
        Ok(Self { dim, a, b })
    }

    /// `½‖w‖²`.
    pub fn identity(dim: usize) -> Self {
        let mut a = vec![0.0; dim * dim];
        for i in 0..dim {
            a[i * dim + i] = 1.0;
        }
        Self { dim, a, b: vec![0.0; dim] }
    }

    /// Random SPD quadratic `A = 3BᵀB + 0.1·I`, with `B` and `b` uniform in
    /// `[−1, 1]`, deterministic for a given seed.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bmat: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut a = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let col: f64 = (0..dim).map(|k| bmat[k * dim + i] * bmat[k * dim + j]).sum();
                a[i * dim + j] = 3.0 * col;
            }
            a[i * dim + i] += 0.1;
        }
        let b = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        Self { dim, a, b }
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn linear_term(&self) -> &[f64] {
        &self.b
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.dim..(i + 1) * self.dim]
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &[f64]) -> f64 {
        let aw: f64 = (0..self.dim).map(|i| w[i] * dot(self.row(i), w)).sum();
        0.5 * aw - dot(&self.b, w)
    }

    fn gradient(&self, w: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), w) - self.b[i];
        }
    }
}
