mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, RngCore};
use snapcs::codecs::{build_quantized_sparse_codec, EnumerableCodebook, IdentityCodec};
use snapcs::sensing::{forward, generate_masks};
use snapcs::solvers::{
    adaptive_step_search, cbgap_recover, cbpgd_recover, compute_metrics, csp_recover, InitMode, SolverConfig,
};
use snapcs::{MaskDistribution, MaskStack, Measurement, MultiFrameSignal, RngSpec};

fn toy_case(seed: u64) -> (EnumerableCodebook, MaskStack, Measurement, MultiFrameSignal) {
    let cb = build_quantized_sparse_codec((3, 2, 2), 1, 2, 2.0, RngSpec::new(seed, 4)).unwrap();
    let mut r = RngSpec::new(seed, 7).rng();
    let masks = generate_masks((3, 2, 2), MaskDistribution::Gaussian, RngSpec::new(r.next_u64(), 1)).unwrap();
    let truth = &cb.codewords()[r.random_range(0..cb.len())];
    let y = Measurement::new(
        3,
        2,
        forward(&masks, truth).unwrap().data().iter().map(|v| v + 0.05 * r.random_range(-1.0..1.0)).collect(),
    )
    .unwrap();
    let x = MultiFrameSignal::from_fn(3, 2, 2, |_, _, _| r.random_range(-1.0..1.0)).unwrap();
    (cb, masks, y, x)
}

/// `‖y − H·P(x + μHᵀ(y − Hx))‖` with `P` a brute-force nearest-codeword scan.
fn oracle_objective(cb: &EnumerableCodebook, masks: &MaskStack, y: &Measurement, x: &MultiFrameSignal, mu: f64) -> f64 {
    let h = dense_h(masks);
    let xs = stack_frames(x);
    let r: Vec<f64> = y.data().iter().zip(matvec(&h, &xs)).map(|(a, b)| a - b).collect();
    let g = matvec_t(&h, &r);
    let s: Vec<f64> = xs.iter().zip(&g).map(|(a, b)| a + mu * b).collect();
    let words: Vec<Vec<f64>> = cb.codewords().iter().map(stack_frames).collect();
    let mut best = &words[0];
    for w in &words {
        if dist(w, &s) < dist(best, &s) {
            best = w;
        }
    }
    dist(&matvec(&h, best), y.data())
}

#[test]
fn adaptive_step_beats_a_dense_grid() {
    for seed in 0..20 {
        let (cb, masks, y, x) = toy_case(seed);
        let bracket = (0.0, 2.0);
        let found = adaptive_step_search(&cb, &masks, &y, &x, bracket).unwrap();
        let grid_min = (0..1000)
            .map(|i| oracle_objective(&cb, &masks, &y, &x, 2.0 * i as f64 / 999.0))
            .fold(f64::INFINITY, f64::min);
        assert!(found.objective <= grid_min + 1e-6, "seed {seed}: {} vs grid {grid_min}", found.objective);
        assert!((0.0..=2.0).contains(&found.mu));
        let at_mu = oracle_objective(&cb, &masks, &y, &x, found.mu);
        assert!((at_mu - found.objective).abs() <= 1e-9);
    }
}

fn small_problem() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (1usize..=4, 1usize..=4, 1usize..=4, any::<u64>())
}

fn random_setup(nx: usize, ny: usize, b: usize, seed: u64) -> (MaskStack, Measurement, MultiFrameSignal) {
    let masks = generate_masks((nx, ny, b), MaskDistribution::Gaussian, RngSpec::new(seed, 1)).unwrap();
    let mut r = RngSpec::new(seed, 8).rng();
    let y = Measurement::new(nx, ny, (0..nx * ny).map(|_| r.random_range(-1.0..1.0)).collect()).unwrap();
    let x0 = MultiFrameSignal::from_fn(nx, ny, b, |_, _, _| r.random_range(-1.0..1.0)).unwrap();
    (masks, y, x0)
}

fn one_step(mu: f64, x0: &MultiFrameSignal) -> SolverConfig {
    let mut cfg = SolverConfig::gap_default();
    cfg.step_mu = mu;
    cfg.max_iters = 1;
    cfg.residual_tol = 0.0;
    cfg.init_mode = InitMode::Signal(x0.clone());
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pgd_step_matches_dense_gradient((nx, ny, b, seed) in small_problem(), mu in 0.05f64..2.0) {
        let (masks, y, x0) = random_setup(nx, ny, b, seed);
        let out = cbpgd_recover(&IdentityCodec, &masks, &y, &one_step(mu, &x0), None).unwrap();
        let h = dense_h(&masks);
        let xs = stack_frames(&x0);
        let r: Vec<f64> = y.data().iter().zip(matvec(&h, &xs)).map(|(a, b)| a - b).collect();
        let want: Vec<f64> = xs.iter().zip(matvec_t(&h, &r)).map(|(a, g)| a + mu * g).collect();
        prop_assert!(dist(&stack_frames(&out.xhat), &want) <= 1e-12 * norm(&want).max(1.0));
    }

    #[test]
    fn gap_step_matches_dense_projection((nx, ny, b, seed) in small_problem(), mu in 0.05f64..2.0) {
        let (masks, y, x0) = random_setup(nx, ny, b, seed);
        let out = cbgap_recover(&IdentityCodec, &masks, &y, &one_step(mu, &x0), None).unwrap();
        let h = dense_h(&masks);
        let xs = stack_frames(&x0);
        let r: Vec<f64> = y.data().iter().zip(matvec(&h, &xs)).map(|(a, b)| a - b).collect();
        let w = solve_dense(&gram(&h), &r);
        let want: Vec<f64> = xs.iter().zip(matvec_t(&h, &w)).map(|(a, g)| a + mu * g).collect();
        prop_assert!(dist(&stack_frames(&out.xhat), &want) <= 1e-9 * norm(&want).max(1.0));
    }

    #[test]
    fn traces_are_bounded_and_consistent((nx, ny, b, seed) in small_problem(), iters in 1usize..12, gap in any::<bool>()) {
        let (masks, y, _) = random_setup(nx, ny, b, seed);
        let codec = snapcs::codecs::TopKCodec { k: nx * ny };
        let mut cfg = if gap { SolverConfig::gap_default() } else { SolverConfig::pgd_default(b) };
        cfg.max_iters = iters;
        let out = if gap {
            cbgap_recover(&codec, &masks, &y, &cfg, None).unwrap()
        } else {
            cbpgd_recover(&codec, &masks, &y, &cfg, None).unwrap()
        };
        prop_assert!(!out.trace.is_empty() && out.trace.len() <= iters);
        prop_assert!(out.trace.residuals().iter().all(|r| *r >= 0.0 && r.is_finite()));
        let want = dist(&matvec(&dense_h(&masks), &stack_frames(&out.xhat)), y.data());
        prop_assert!((out.final_residual - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn codeword_start_is_a_fixed_point(seed in any::<u64>(), mu in 0.1f64..4.0, gap in any::<bool>()) {
        let cb = build_quantized_sparse_codec((3, 2, 2), 1, 2, 2.0, RngSpec::new(seed, 4)).unwrap();
        let masks = generate_masks((3, 2, 2), MaskDistribution::Gaussian, RngSpec::new(seed, 1)).unwrap();
        let c = cb.codewords()[(seed % cb.len() as u64) as usize].clone();
        let y = forward(&masks, &c).unwrap();
        let mut cfg = SolverConfig::gap_default();
        cfg.step_mu = mu;
        cfg.init_mode = InitMode::Signal(c.clone());
        let out = if gap {
            cbgap_recover(&cb, &masks, &y, &cfg, Some(&c)).unwrap()
        } else {
            cbpgd_recover(&cb, &masks, &y, &cfg, Some(&c)).unwrap()
        };
        prop_assert_eq!(out.trace.len(), 1);
        prop_assert_eq!(out.trace.records[0].residual_norm, 0.0);
        prop_assert_eq!(out.xhat, c);
        prop_assert_eq!(out.final_error, Some(0.0));
    }

    #[test]
    fn csp_matches_full_scan(seed in any::<u64>()) {
        let cb = build_quantized_sparse_codec((2, 2, 2), 1, 2, 2.0, RngSpec::new(seed, 4)).unwrap();
        let masks = generate_masks((2, 2, 2), MaskDistribution::Gaussian, RngSpec::new(seed, 1)).unwrap();
        let mut r = RngSpec::new(seed, 3).rng();
        let y = Measurement::new(2, 2, (0..4).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap();
        let (xhat, res) = csp_recover(&cb, &masks, &y).unwrap();
        let h = dense_h(&masks);
        let residuals: Vec<f64> = cb.codewords().iter().map(|c| dist(&matvec(&h, &stack_frames(c)), y.data())).collect();
        let min = residuals.iter().copied().fold(f64::INFINITY, f64::min);
        let first = residuals.iter().position(|v| (v - min).abs() <= 1e-12).unwrap();
        prop_assert!((res - min).abs() <= 1e-12);
        prop_assert_eq!(&xhat, &cb.codewords()[first]);
    }
}

#[test]
fn csp_ties_go_to_the_lowest_index() {
    let words = vec![
        MultiFrameSignal::new(1, 1, 2, vec![0.5, 0.0]).unwrap(),
        MultiFrameSignal::new(1, 1, 2, vec![0.0, 0.5]).unwrap(),
    ];
    let cb = EnumerableCodebook::new(words.clone(), 2.0, 0.0).unwrap();
    let masks = MaskStack::from_frames(1, 1, &[vec![1.0], vec![1.0]], MaskDistribution::Gaussian).unwrap();
    let (xhat, res) = csp_recover(&cb, &masks, &Measurement::new(1, 1, vec![0.5]).unwrap()).unwrap();
    assert_eq!(xhat, words[0]);
    assert_eq!(res, 0.0);
}

#[test]
fn psnr_arithmetic() {
    let x = MultiFrameSignal::constant(4, 4, 2, 0.4);
    let off = x.map(|v| v + 0.1);
    let m = compute_metrics(&off, &x).unwrap();
    assert!((m.mse - 0.01).abs() < 1e-15);
    assert!((m.psnr_db - 20.0).abs() < 1e-9);
    let checker = MultiFrameSignal::from_fn(4, 4, 2, |x, y, _| 0.4 + if (x + y) % 2 == 0 { 0.05 } else { -0.05 }).unwrap();
    let m = compute_metrics(&checker, &x).unwrap();
    assert!((m.psnr_db - 10.0 * (1.0f64 / 0.0025).log10()).abs() < 1e-9);
    assert_eq!(m.per_frame_psnr.len(), 2);
}
