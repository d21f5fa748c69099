//! Fully connected feed-forward network over a flat parameter vector.
//!
//! Parameters are laid out layer by layer; within a layer, each output unit
//! owns a contiguous row of `n_in` incoming weights followed by its bias.
//! Hidden layers use the logistic sigmoid and the output layer is linear.
//! The training loss is the half mean squared error
//! `E(w) = 1/(2n) Σ_p ‖o_p − t_p‖²` over the full batch.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::ParamVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HiddenActivation {
    #[default]
    Sigmoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputActivation {
    #[default]
    Linear,
}

/// Row-major regression data: `inputs` is `n × n_in`, `targets` is `n × n_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_in: usize,
    n_out: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(n_in: usize, n_out: usize, inputs: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::InvalidConfig("dataset widths must be positive".into()));
        }
        if !inputs.len().is_multiple_of(n_in) || !targets.len().is_multiple_of(n_out) {
            return Err(Error::InvalidConfig("dataset buffers are not whole rows".into()));
        }
        Error::check_dim(inputs.len() / n_in, targets.len() / n_out)?;
        Ok(Self { n_in, n_out, inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.len() / self.n_in
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn input(&self, p: usize) -> &[f64] {
        &self.inputs[p * self.n_in..(p + 1) * self.n_in]
    }

    pub fn target(&self, p: usize) -> &[f64] {
        &self.targets[p * self.n_out..(p + 1) * self.n_out]
    }

    /// Copy with every target column mapped affinely onto `[0, 1]` by its
    /// own min and max. Constant columns become zero.
    pub fn with_unit_targets(&self) -> Dataset {
        let mut targets = self.targets.clone();
        for c in 0..self.n_out {
            let column = || self.targets.iter().skip(c).step_by(self.n_out);
            let lo = column().copied().fold(f64::INFINITY, f64::min);
            let hi = column().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = if hi > lo { hi - lo } else { 1.0 };
            for t in targets.iter_mut().skip(c).step_by(self.n_out) {
                *t = (*t - lo) / span;
            }
        }
        Dataset { targets, ..self.clone() }
    }

    /// One row per sample: `x1,…,xN,target` (or `target1,…` for
    /// multi-output data). Values use the shortest round-trip representation.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header: Vec<String> = (1..=self.n_in).map(|i| format!("x{i}")).collect();
        if self.n_out == 1 {
            header.push("target".into());
        } else {
            header.extend((1..=self.n_out).map(|i| format!("target{i}")));
        }
        writeln!(out, "{}", header.join(","))?;
        for p in 0..self.len() {
            let row: Vec<String> = self.input(p).iter().chain(self.target(p)).map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    layer_sizes: Vec<usize>,
    pub hidden_activation: HiddenActivation,
    pub output_activation: OutputActivation,
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl Network {
    pub fn new(layer_sizes: Vec<usize>) -> Result<Self> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(Error::InvalidConfig(format!("invalid layer sizes {layer_sizes:?}")));
        }
        Ok(Self {
            layer_sizes,
            hidden_activation: HiddenActivation::Sigmoid,
            output_activation: OutputActivation::Linear,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn n_in(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn n_out(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    /// `Σ (n_in + 1)·n_out` over consecutive layers.
    pub fn parameter_count(&self) -> usize {
        self.layer_sizes.windows(2).map(|p| (p[0] + 1) * p[1]).sum()
    }

    /// Uniform `[−0.5, 0.5]` weights and biases from stream 1 of the seeded
    /// generator (stream 0 is used for data sampling).
    pub fn init_params(&self, seed: u64) -> ParamVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        (0..self.parameter_count()).map(|_| rng.random_range(-0.5..=0.5)).collect()
    }

    fn check(&self, w: &[f64], data: &Dataset) -> Result<()> {
        Error::check_dim(self.parameter_count(), w.len())?;
        Error::check_dim(self.n_in(), data.n_in())?;
        Error::check_dim(self.n_out(), data.n_out())
    }

    /// Network output for one input row.
    pub fn predict(&self, w: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(self.parameter_count(), w.len())?;
        Error::check_dim(self.n_in(), x.len())?;
        let mut acts = self.activation_buffers();
        self.forward(w, x, &mut acts);
        Ok(acts.pop().unwrap())
    }

    pub fn loss(&self, w: &[f64], data: &Dataset) -> Result<f64> {
        self.check(w, data)?;
        Ok(self.loss_unchecked(w, data))
    }

    pub fn grad(&self, w: &[f64], data: &Dataset) -> Result<ParamVector> {
        self.check(w, data)?;
        let mut g = vec![0.0; w.len()];
        self.grad_unchecked(w, data, &mut g);
        Ok(g)
    }

    fn activation_buffers(&self) -> Vec<Vec<f64>> {
        self.layer_sizes.iter().map(|&n| vec![0.0; n]).collect()
    }

    // acts[0] receives the input; acts[l] the output of layer l.
    fn forward(&self, w: &[f64], x: &[f64], acts: &mut [Vec<f64>]) {
        acts[0].copy_from_slice(x);
        let last = self.layer_sizes.len() - 1;
        let mut offset = 0;
        for l in 1..=last {
            let n_in = self.layer_sizes[l - 1];
            let (prev, rest) = acts.split_at_mut(l);
            let input = &prev[l - 1];
            for (j, out) in rest[0].iter_mut().enumerate() {
                let row = &w[offset + j * (n_in + 1)..offset + (j + 1) * (n_in + 1)];
                let z = row[..n_in].iter().zip(input).map(|(a, b)| a * b).sum::<f64>() + row[n_in];
                *out = if l == last { z } else { sigmoid(z) };
            }
            offset += (n_in + 1) * self.layer_sizes[l];
        }
    }

    fn loss_unchecked(&self, w: &[f64], data: &Dataset) -> f64 {
        let n = data.len();
        if n == 0 {
            return 0.0;
        }
        let mut acts = self.activation_buffers();
        let mut sse = 0.0;
        for p in 0..n {
            self.forward(w, data.input(p), &mut acts);
            sse += acts.last().unwrap().iter().zip(data.target(p)).map(|(o, t)| (o - t).powi(2)).sum::<f64>();
        }
        sse / (2.0 * n as f64)
    }

    fn grad_unchecked(&self, w: &[f64], data: &Dataset, g: &mut [f64]) {
        g.iter_mut().for_each(|x| *x = 0.0);
        let n = data.len();
        if n == 0 {
            return;
        }
        let inv_n = 1.0 / n as f64;
        let n_layers = self.layer_sizes.len();
        let offsets: Vec<usize> = std::iter::once(0)
            .chain(self.layer_sizes.windows(2).scan(0, |acc, p| {
                *acc += (p[0] + 1) * p[1];
                Some(*acc)
            }))
            .collect();
        let mut acts = self.activation_buffers();
        let mut deltas = self.activation_buffers();
        for p in 0..n {
            self.forward(w, data.input(p), &mut acts);
            for ((d, o), t) in deltas[n_layers - 1].iter_mut().zip(&acts[n_layers - 1]).zip(data.target(p)) {
                *d = (o - t) * inv_n;
            }
            for l in (1..n_layers).rev() {
                let n_in = self.layer_sizes[l - 1];
                let offset = offsets[l - 1];
                let (lower, upper) = deltas.split_at_mut(l);
                let delta = &upper[0];
                let back = &mut lower[l - 1];
                back.iter_mut().for_each(|x| *x = 0.0);
                for (j, &dj) in delta.iter().enumerate() {
                    let base = offset + j * (n_in + 1);
                    for i in 0..n_in {
                        g[base + i] += dj * acts[l - 1][i];
                        back[i] += dj * w[base + i];
                    }
                    g[base + n_in] += dj;
                }
                if l > 1 {
                    for (b, a) in back.iter_mut().zip(&acts[l - 1]) {
                        *b *= a * (1.0 - a);
                    }
                }
            }
        }
    }
}

/// Network plus training data as an [`Objective`].
#[derive(Debug, Clone)]
pub struct MlpObjective {
    net: Network,
    data: Dataset,
}

impl MlpObjective {
    pub fn new(net: Network, data: Dataset) -> Result<Self> {
        Error::check_dim(net.n_in(), data.n_in())?;
        Error::check_dim(net.n_out(), data.n_out())?;
        Ok(Self { net, data })
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }
}

impl Objective for MlpObjective {
    fn dim(&self) -> usize {
        self.net.parameter_count()
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.net.loss_unchecked(w, &self.data)
    }

    fn gradient(&self, w: &[f64], out: &mut [f64]) {
        self.net.grad_unchecked(w, &self.data, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_sample(x: Vec<f64>, t: f64) -> Dataset {
        let n = x.len();
        Dataset::new(n, 1, x, vec![t]).unwrap()
    }

    #[test]
    fn benchmark_network_has_351_parameters() {
        let net = Network::new(vec![5, 50, 1]).unwrap();
        assert_eq!(net.parameter_count(), 351);
        assert_eq!(net.init_params(7).len(), 351);
    }

    #[test]
    fn init_is_seeded() {
        let net = Network::new(vec![5, 50, 1]).unwrap();
        let a = net.init_params(3);
        assert_eq!(a, net.init_params(3));
        assert_ne!(a, net.init_params(4));
        assert!(a.iter().all(|v| (-0.5..=0.5).contains(v)));
    }

    #[test]
    fn zero_weights_zero_targets() {
        let net = Network::new(vec![2, 3, 1]).unwrap();
        let data = Dataset::new(2, 1, vec![0.3, -1.0, 2.0, 0.5], vec![0.0, 0.0]).unwrap();
        assert_eq!(net.loss(&vec![0.0; net.parameter_count()], &data).unwrap(), 0.0);
    }

    #[test]
    fn half_squared_residual() {
        let net = Network::new(vec![1, 1, 1]).unwrap();
        // output = 0·h + 2.0 bias; target 0 → ½·4
        let w = vec![0.7, -0.1, 0.0, 2.0];
        assert_eq!(net.loss(&w, &one_sample(vec![0.4], 0.0)).unwrap(), 2.0);
        assert_eq!(net.loss(&w, &one_sample(vec![0.4], 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn perfect_fit_is_stationary() {
        let net = Network::new(vec![2, 4, 1]).unwrap();
        let mut w = net.init_params(1);
        let x = vec![0.2, -0.7];
        let data = one_sample(x.clone(), 3.5);
        let o = net.predict(&w, &x).unwrap()[0];
        let last = w.len() - 1;
        w[last] += 3.5 - o;
        assert!(net.loss(&w, &data).unwrap() < 1e-20);
        let g = net.grad(&w, &data).unwrap();
        assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-8);
    }

    #[test]
    fn output_bias_gradient_is_mean_residual() {
        let net = Network::new(vec![2, 3, 1]).unwrap();
        let mut w = net.init_params(5);
        // zero the hidden→output weights, keep output bias at 0.25
        let out_start = 3 * 3;
        w[out_start..out_start + 3].iter_mut().for_each(|v| *v = 0.0);
        w[out_start + 3] = 0.25;
        let targets = vec![1.0, -2.0, 0.5];
        let data = Dataset::new(2, 1, vec![0.1, 0.2, -0.3, 0.4, 1.0, -1.0], targets.clone()).unwrap();
        let g = net.grad(&w, &data).unwrap();
        let mean_residual = targets.iter().map(|t| 0.25 - t).sum::<f64>() / 3.0;
        assert!((g[out_start + 3] - mean_residual).abs() < 1e-15);
        // hidden-layer weights get no signal through zero output weights
        assert!(g[..out_start].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let net = Network::new(vec![2, 3, 1]).unwrap();
        let data = one_sample(vec![0.0, 0.0], 1.0);
        assert!(matches!(net.loss(&[0.0; 3], &data), Err(Error::DimensionMismatch { .. })));
        assert!(net.grad(&[0.0; 3], &data).is_err());
        let wide = one_sample(vec![0.0; 3], 1.0);
        assert!(net.loss(&[0.0; 13], &wide).is_err());
        assert!(Network::new(vec![3]).is_err());
        assert!(Network::new(vec![3, 0, 1]).is_err());
    }

    #[test]
    fn unit_targets() {
        let data = Dataset::new(1, 2, vec![0.0, 1.0, 2.0], vec![2.0, 5.0, 4.0, 5.0, 6.0, 5.0]).unwrap();
        let scaled = data.with_unit_targets();
        assert_eq!(scaled.targets(), &[0.0, 0.0, 0.5, 0.0, 1.0, 0.0]);
        assert_eq!(scaled.inputs(), data.inputs());
    }

    #[test]
    fn csv_export() {
        let data = Dataset::new(2, 1, vec![0.5, -1.0, 2.0, 0.25], vec![3.0, 0.1]).unwrap();
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x1,x2,target\n0.5,-1,3\n2,0.25,0.1\n");
    }
}
