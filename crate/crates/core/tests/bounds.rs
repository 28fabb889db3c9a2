use snapcs::bounds::formulas::{
    bernstein_tail, rate_error_bound, rate_failure, rate_max_frames, unrolled_error_bound,
    csp_failure, noisy_csp_error_bound, gap_step_failure,
};
use snapcs::bounds::{
    corollary_b_sweep, csp_expectation_check, run_noisy_csp_experiment, simulate_csp_events, verify_psi2_gaussian,
    CorollaryBSpec, NoisyCspSpec, K_SUBEXP,
};
use snapcs::codecs::random_grid_codebook;
use snapcs::rng::streams;
use snapcs::{MaskDistribution, MultiFrameSignal, RngSpec};

#[test]
fn gaussian_psi2_norm() {
    let c = verify_psi2_gaussian(1.0).unwrap();
    assert!((c.psi2 - 1.632_993_161_855_452).abs() <= 1e-6);
    assert!((c.check_at_bound - 2.0).abs() <= 1e-9);
    let c3 = verify_psi2_gaussian(3.0).unwrap();
    assert!((c3.psi2 - 3.0 * (8.0f64 / 3.0).sqrt()).abs() <= 3e-6);
}

#[test]
fn closed_forms() {
    // 2·16·e^{−640/(16K²)} with K = 8/3.
    let want = 32.0 * (-640.0 / (16.0 * 64.0 / 9.0f64)).exp();
    assert!(want < 1.0);
    assert!((csp_failure(16f64.ln(), 640, 1.0) - want).abs() <= 1e-12);
    assert_eq!(csp_failure(1e3, 4, 0.1), 1.0);

    assert!((noisy_csp_error_bound(16, 4, 0.64, 2.0, 0.25, 0.2) - (0.1 + 0.5 + 0.2)).abs() <= 1e-15);

    // e^{−min(t²/(4K²·0.01), t/(2K·0.1))} at t = 0.5: the quadratic branch.
    let k = K_SUBEXP;
    let want = (-(0.25 / (4.0 * k * k * 0.01)).min(0.5 / (2.0 * k * 0.1))).exp();
    assert!((bernstein_tail(0.5, 0.01, 0.1, k) - want).abs() <= 1e-15);
    assert_eq!(bernstein_tail(0.0, 0.01, 0.1, k), 1.0);

    assert_eq!(rate_max_frames(0.5, 2f64.powi(-8), 4.0), Some(2));
    assert_eq!(rate_max_frames(0.5, 0.5, 4.0), None);
    assert!((rate_error_bound(0.25, 2.0, 2.0) - (0.25 + 32.0)).abs() <= 1e-12);
    assert!((rate_failure(2f64.powi(-10), 5, 2.0) - 2.0 * (-5.0f64).exp()).abs() <= 1e-15);

    assert!((unrolled_error_bound(1, 2.0, 0.25, 0.01) - (0.25 * 2.0 + 0.8)).abs() <= 1e-15);

    // Both exponents hugely negative: no failure mass.
    assert!(gap_step_failure(1.0, 1_000_000, 2, 0.5, 2.0, 0.25) < 1e-100);
}

#[test]
fn csp_events_at_n64() {
    let cb = random_grid_codebook((8, 8, 2), 16, 4, 2.0, RngSpec::new(12, streams::CODEBOOK)).unwrap();
    let x = cb.codewords()[3].clone();
    let rep = simulate_csp_events(&cb, &x, MaskDistribution::Gaussian, &[1.0], 10_000, RngSpec::new(12, 0)).unwrap();
    assert_eq!(rep.records.len(), 1);
    let r = &rep.records[0];
    assert!((0.0..=1.0).contains(&r.empirical_freq));
    assert!(r.pass, "{r:?}");
}

#[test]
fn sensed_energy_expectation() {
    let x = MultiFrameSignal::from_fn(4, 4, 3, |x, y, t| ((x + 2 * y + 3 * t) % 5) as f64 / 5.0).unwrap();
    let c = MultiFrameSignal::constant(4, 4, 3, 0.3);
    let (mean, want) = csp_expectation_check(&x, &c, 100_000, RngSpec::new(2, 0)).unwrap();
    assert!((mean - want).abs() <= 1e-2 * want, "{mean} vs {want}");
}

#[test]
fn noise_free_noisy_csp_passes() {
    let cb = random_grid_codebook((4, 3, 2), 64, 4, 2.0, RngSpec::new(1, streams::CODEBOOK)).unwrap();
    let spec = NoisyCspSpec {
        sigma_z: 0.0,
        delta: 0.0,
        epsilons: vec![0.25, 1.0, 3.0],
        trials: 500,
        distribution: MaskDistribution::Gaussian,
        rng: RngSpec::new(1, 0),
    };
    let rep = run_noisy_csp_experiment(&cb, &spec).unwrap();
    assert!(rep.all_pass());
    // Codeword inputs without noise are recovered exactly, so nothing exceeds
    // even the smallest error bound.
    assert!(rep.records.iter().all(|r| r.empirical_freq == 0.0));
}

#[test]
fn corollary_b_sweep_passes() {
    let spec = CorollaryBSpec {
        rate: 0.5,
        deltas: vec![0.5, 2f64.powi(-4), 2f64.powi(-8)],
        eta: 4.0,
        rho: 2.0,
        n: 4,
        trials: 300,
        rng: RngSpec::new(4, 0),
    };
    let (points, rep) = corollary_b_sweep(&spec).unwrap();
    assert_eq!(points[0].frames, None);
    assert_eq!(points[2].frames, Some(2));
    assert!(rep.all_pass());
}
