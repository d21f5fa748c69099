//! Driver behaviour: evaluation accounting, Armijo decrease, and the
//! L-MoQ/L-NAQ equivalence on quadratics.

use std::cell::Cell;

use lmoq_core::levy::generate_dataset;
use lmoq_core::{
    run, LevySpec, MlpObjective, Network, Objective, OptimConfig, OptimizerKind, OptimizerState, Quadratic, StepOutcome,
};

/// Counts every call independently of the driver's own counters.
struct Counted<O> {
    inner: O,
    values: Cell<u64>,
    grads: Cell<u64>,
}

impl<O> Counted<O> {
    fn new(inner: O) -> Self {
        Self { inner, values: Cell::new(0), grads: Cell::new(0) }
    }
}

impl<O: Objective> Objective for Counted<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.values.set(self.values.get() + 1);
        self.inner.value(w)
    }

    fn gradient(&self, w: &[f64], out: &mut [f64]) {
        self.grads.set(self.grads.get() + 1);
        self.inner.gradient(w, out)
    }
}

fn small_levy(seed: u64) -> (MlpObjective, Vec<f64>) {
    let net = Network::new(vec![5, 10, 1]).unwrap();
    let data = generate_dataset(&LevySpec { n_samples: 60, seed, ..Default::default() }).unwrap();
    let w0 = net.init_params(seed);
    (MlpObjective::new(net, data).unwrap(), w0)
}

fn no_stop(k_max: usize) -> OptimConfig {
    OptimConfig { k_max, epsilon: 1e-300, ..Default::default() }
}

#[test]
fn gradient_accounting_per_driver() {
    for seed in 0..3 {
        let (obj, w0) = small_levy(seed);
        for kind in OptimizerKind::ALL {
            let counted = Counted::new(&obj);
            let k = 40;
            let rec = run(kind, &counted, w0.clone(), &no_stop(k)).unwrap();
            assert_eq!(rec.iterations(), k);
            let expected = match kind {
                OptimizerKind::Lbfgs | OptimizerKind::Lmoq => k as u64 + 1,
                OptimizerKind::Lnaq => 2 * k as u64,
            };
            assert_eq!(rec.gev(), expected, "{kind}");
            assert_eq!(counted.grads.get(), expected, "{kind}");
            assert_eq!(rec.fev(), counted.values.get(), "{kind}");
            assert_eq!(rec.trace.len(), k + 1);
        }
    }
}

#[test]
fn counters_are_monotone_and_fev_decomposes() {
    let (obj, w0) = small_levy(4);
    for kind in OptimizerKind::ALL {
        let counted = Counted::new(&obj);
        let mut st = OptimizerState::new(kind, &counted, w0.clone(), no_stop(30)).unwrap();
        assert_eq!((st.fev(), st.gev()), (1, 1));
        let mut last = (st.fev(), st.gev());
        for _ in 0..30 {
            let before_values = counted.values.get();
            st.step(&counted).unwrap();
            let now = (st.fev(), st.gev());
            assert!(now.0 > last.0 && now.1 > last.1);
            // every driver-side fev corresponds to exactly one objective call
            assert_eq!(now.0 - last.0, counted.values.get() - before_values);
            last = now;
        }
        assert!(st.previous_gradient().is_some());
    }
}

#[test]
fn lbfgs_steps_satisfy_armijo() {
    let (obj, w0) = small_levy(1);
    let cfg = no_stop(60);
    let mut st = OptimizerState::new(OptimizerKind::Lbfgs, &obj, w0, cfg).unwrap();
    for _ in 0..60 {
        let (e0, g0, w_prev) = (st.loss(), st.gradient().to_vec(), st.w().to_vec());
        let out = st.step(&obj).unwrap();
        let StepOutcome::Stepped { alpha, line_search_exhausted, .. } = out else { panic!("{out:?}") };
        assert!(!line_search_exhausted);
        let step: Vec<f64> = st.w().iter().zip(&w_prev).map(|(a, b)| a - b).collect();
        // α·gᵀd = gᵀ(w_{k+1} − w_k)
        let directional: f64 = g0.iter().zip(&step).map(|(a, b)| a * b).sum();
        assert!(alpha > 0.0);
        assert!(st.loss() <= e0 + cfg.line_search.armijo_c * directional + 1e-12 * e0.abs());
        assert_eq!(st.loss(), obj.value(st.w()));
    }
}

#[test]
fn first_step_identical_across_drivers() {
    let (obj, w0) = small_levy(2);
    let cfg = no_stop(1);
    let mut states: Vec<_> =
        OptimizerKind::ALL.iter().map(|&k| OptimizerState::new(k, &obj, w0.clone(), cfg).unwrap()).collect();
    for st in &mut states {
        let out = st.step(&obj).unwrap();
        assert!(matches!(out, StepOutcome::Stepped { mu, .. } if mu == 0.0));
    }
    assert_eq!(states[0].w(), states[1].w());
    assert_eq!(states[0].w(), states[2].w());
    assert_eq!(states[0].memory().h0_scale(), states[2].memory().h0_scale());
}

#[test]
fn lookahead_gradient_equals_momentum_extrapolation_on_quadratic() {
    let q = Quadratic::random(12, 3);
    let mut st = OptimizerState::new(OptimizerKind::Lnaq, &q, vec![1.0; 12], no_stop(10)).unwrap();
    for _ in 0..6 {
        st.step(&q).unwrap();
    }
    // w_k = w_{k−1} + v_k, so ∇E(w_k + μv_k) = (1+μ)∇E(w_k) − μ∇E(w_{k−1}) for affine ∇E.
    let mu = st.schedule().peek_theta();
    let mu = lmoq_core::momentum::compute_mu(st.schedule().theta(), mu, st.schedule().mu_cap()).unwrap();
    let shifted: Vec<f64> = st.w().iter().zip(st.velocity()).map(|(w, v)| w + mu * v).collect();
    let mut direct = vec![0.0; 12];
    q.gradient(&shifted, &mut direct);
    let prev = st.previous_gradient().unwrap();
    for i in 0..12 {
        let approx = (1.0 + mu) * st.gradient()[i] - mu * prev[i];
        assert!((approx - direct[i]).abs() <= 1e-12 * direct[i].abs().max(1.0), "{i}");
    }
}

#[test]
fn lmoq_tracks_lnaq_on_quadratic() {
    for seed in 0..5 {
        let q = Quadratic::random(20, seed);
        let cfg = no_stop(20);
        let naq = run(OptimizerKind::Lnaq, &q, vec![1.0; 20], &cfg).unwrap();
        let moq = run(OptimizerKind::Lmoq, &q, vec![1.0; 20], &cfg).unwrap();
        assert_eq!(naq.iterations(), 20);
        assert_eq!(moq.iterations(), 20);
        let diff = naq.final_w.iter().zip(&moq.final_w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-10, "seed {seed}: {diff:e}");
        for (a, b) in naq.trace.iter().zip(&moq.trace) {
            assert!((a.loss - b.loss).abs() <= 1e-10 * a.loss.abs().max(1.0));
        }
    }
}

#[test]
fn literal_recurrence_disables_momentum() {
    let (obj, w0) = small_levy(3);
    let literal = OptimConfig { recurrence: lmoq_core::ThetaRecurrence::Literal, ..no_stop(15) };
    let lbfgs = run(OptimizerKind::Lbfgs, &obj, w0.clone(), &literal).unwrap();
    let lmoq = run(OptimizerKind::Lmoq, &obj, w0, &literal).unwrap();
    // μ ≡ 0, so L-MoQ follows L-BFGS exactly
    assert_eq!(lbfgs.final_w, lmoq.final_w);
    assert_eq!(lbfgs.gev(), lmoq.gev());
}
