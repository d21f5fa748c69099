use lmoq_core::momentum::{advance_theta, compute_mu, DEFAULT_GAMMA, DEFAULT_MU_CAP};
use lmoq_core::MomentumSchedule;

#[test]
fn long_run_theta_and_mu() {
    let gamma = DEFAULT_GAMMA;
    let mut schedule = MomentumSchedule::default();
    let mut theta = schedule.theta();
    let mut prev_mu = schedule.next_mu();
    assert_eq!(prev_mu, 0.0);
    for k in 1..100_000 {
        let before = schedule.theta();
        let mu = schedule.next_mu();
        let after = schedule.theta();
        assert!(after > 0.0);
        // Strict decrease holds until θ² − γ is lost to rounding next to the
        // fixed point √γ; after that θ may only stall.
        let resolvable = before * before - gamma > 1e-12;
        if resolvable {
            assert!(after < before, "k={k}: {after} !< {before}");
        } else {
            assert!(after <= before * (1.0 + 1e-15), "k={k}");
        }
        assert!(mu >= prev_mu, "k={k}: mu {mu} < {prev_mu}");
        assert!((0.0..=DEFAULT_MU_CAP).contains(&mu));
        prev_mu = mu;
        theta = after;
    }
    assert!((theta - gamma.sqrt()).abs() < 1e-12);
}

#[test]
fn schedule_agrees_with_free_functions() {
    let mut schedule = MomentumSchedule::default();
    let mut theta = 1.0;
    for _ in 0..500 {
        let next = advance_theta(theta, DEFAULT_GAMMA).unwrap();
        let mu = compute_mu(theta, next, DEFAULT_MU_CAP).unwrap();
        assert_eq!(schedule.next_mu(), mu);
        theta = next;
    }
}
