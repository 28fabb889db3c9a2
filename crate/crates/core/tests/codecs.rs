use proptest::prelude::*;
use rand::Rng;
use snapcs::codecs::{
    build_quantized_sparse_codec, estimate_rate_distortion, fit_alpha_dimension, nls_decode, nls_encode, Codec,
    Dct3dCodec, EnumerableCodebook, NlsCodec, NlsParams, QuantizedSparseFamily, RateDistortion, TopKCodec,
};
use snapcs::{MultiFrameSignal, RngSpec};

fn random_video(nx: usize, ny: usize, b: usize, seed: u64) -> MultiFrameSignal {
    let mut r = RngSpec::new(seed, 0).rng();
    MultiFrameSignal::from_fn(nx, ny, b, |_, _, _| r.random_range(0.0..1.0)).unwrap()
}

fn max_diff(a: &MultiFrameSignal, b: &MultiFrameSignal) -> f64 {
    a.data().iter().zip(b.data()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// Valid NLS geometry on a frame that the block grid covers.
fn nls_case() -> impl Strategy<Value = (NlsParams, (usize, usize, usize), u64)> {
    (2usize..=4, 2usize..=4, 1usize..=3, 1usize..=4, 1usize..=6, 1usize..=3, 1usize..=3, any::<u64>()).prop_flat_map(
        |(bw, bh, b, g, win, cx, cy, seed)| {
            (1..=bw, 1..=bh).prop_map(move |(sx, sy)| {
                let stride = sx.min(sy);
                let params = NlsParams {
                    block_w: bw,
                    block_h: bh,
                    stride,
                    group_size: g,
                    search_window: win,
                    keep_per_group: None,
                };
                (params, (bw + cx * stride, bh + cy * stride, b), seed)
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nls_full_keep_is_lossless((mut p, (nx, ny, b), seed) in nls_case()) {
        p.keep_per_group = Some(p.block_len(b) * p.group_size);
        let x = random_video(nx, ny, b, seed);
        let y = NlsCodec::new(p).project(&x).unwrap();
        prop_assert!(max_diff(&x, &y) <= 1e-10);
    }

    #[test]
    fn nls_all_ones_is_a_fixed_point((p, (nx, ny, b), _seed) in nls_case(), keep in 1usize..=4) {
        let mut p = p;
        p.keep_per_group = Some(keep);
        let ones = MultiFrameSignal::constant(nx, ny, b, 1.0);
        let y = NlsCodec::new(p).project(&ones).unwrap();
        prop_assert!(max_diff(&ones, &y) <= 1e-12);
    }

    #[test]
    fn nls_code_respects_keep((p, (nx, ny, b), seed) in nls_case(), keep in 1usize..=6) {
        let mut p = p;
        p.keep_per_group = Some(keep);
        let x = random_video(nx, ny, b, seed);
        let code = nls_encode(&p, &x).unwrap();
        for g in &code.groups {
            prop_assert!(g.coeffs.len() <= keep);
            prop_assert!(!g.members.is_empty() && g.members.len() <= p.group_size);
            prop_assert!(g.coeffs.windows(2).all(|w| w[0].0 < w[1].0));
        }
        let decoded = nls_decode(&p, &code, (nx, ny, b)).unwrap();
        prop_assert_eq!(decoded, NlsCodec::new(p).project(&x).unwrap());
    }

    #[test]
    fn top_k_projection_is_idempotent(seed in any::<u64>(), k in 0usize..40) {
        let x = random_video(4, 3, 3, seed).map(|v| v - 0.5);
        let c = TopKCodec { k };
        let once = c.project(&x).unwrap();
        prop_assert_eq!(c.project(&once).unwrap(), once);
    }

    #[test]
    fn toy_projection_is_nearest_codeword(seed in any::<u64>()) {
        let cb = build_quantized_sparse_codec((3, 1, 2), 1, 2, 2.0, RngSpec::new(1, 4)).unwrap();
        let x = random_video(3, 1, 2, seed).map(|v| 2.0 * v - 1.0);
        let p = cb.project(&x).unwrap();
        let best = cb.codewords().iter().map(|c| c.distance(&x)).fold(f64::INFINITY, f64::min);
        prop_assert!((p.distance(&x) - best).abs() <= 1e-15);
    }
}

#[test]
fn single_pixel_lights_one_disjoint_group() {
    let p = NlsParams {
        block_w: 4,
        block_h: 4,
        stride: 4,
        group_size: 1,
        search_window: 8,
        keep_per_group: None,
    };
    let x = MultiFrameSignal::from_fn(12, 8, 2, |x, y, t| if (x, y, t) == (5, 6, 1) { 1.0 } else { 0.0 }).unwrap();
    let code = nls_encode(&p, &x).unwrap();
    assert_eq!(code.groups.len(), 6);
    let lit: Vec<_> = code.groups.iter().filter(|g| !g.coeffs.is_empty()).collect();
    assert_eq!(lit.len(), 1);
    assert_eq!(lit[0].members, vec![(4, 4)]);
}

#[test]
fn identical_blocks_group_and_concentrate_on_the_group_axis() {
    let p = NlsParams {
        block_w: 4,
        block_h: 4,
        stride: 4,
        group_size: 2,
        search_window: 12,
        keep_per_group: None,
    };
    // Two copies of one random pattern in an otherwise constant frame.
    let pattern = random_video(4, 4, 2, 3);
    let x = MultiFrameSignal::from_fn(12, 4, 2, |x, y, t| match x {
        0..=3 => pattern.get(x, y, t),
        8..=11 => pattern.get(x - 8, y, t),
        _ => 0.5,
    })
    .unwrap();
    let code = nls_encode(&p, &x).unwrap();
    let g = &code.groups[0];
    assert_eq!(g.members, vec![(0, 0), (8, 0)]);
    // Flat index is element * G + member; the DCT of two equal members has
    // no energy at member frequency 1.
    let along_group: f64 = g.coeffs.iter().filter(|(i, _)| i % 2 == 1).map(|(_, v)| v * v).sum();
    let total: f64 = g.coeffs.iter().map(|(_, v)| v * v).sum();
    assert!(along_group <= 1e-24 * total, "{along_group} of {total}");
}

#[test]
fn single_group_full_keep_reproduces_its_pixels() {
    let p = NlsParams {
        block_w: 4,
        block_h: 4,
        stride: 4,
        group_size: 1,
        search_window: 0,
        keep_per_group: Some(4 * 4 * 3),
    };
    let x = random_video(4, 4, 3, 11);
    assert!(max_diff(&x, &NlsCodec::new(p).project(&x).unwrap()) <= 1e-10);
}

#[test]
fn constant_video_survives_default_nls() {
    let x = MultiFrameSignal::constant(24, 20, 4, 0.731);
    let y = NlsCodec::new(NlsParams::default()).project(&x).unwrap();
    assert!(max_diff(&x, &y) <= 1e-12);
}

#[test]
fn dct3d_code_is_idempotent_on_its_range() {
    let c = Dct3dCodec::default();
    let once = c.project(&random_video(16, 16, 4, 2)).unwrap();
    assert!(max_diff(&once, &c.project(&once).unwrap()) <= 1e-12);
}

#[test]
fn rate_distortion_endpoints() {
    let corpus: Vec<_> = (0..3).map(|s| random_video(3, 2, 2, s)).collect();
    let all = EnumerableCodebook::new(corpus.clone(), 2.0, 0.0).unwrap();
    assert_eq!(estimate_rate_distortion(&all, &corpus).unwrap().distortion, 0.0);
    let zero = EnumerableCodebook::new(vec![MultiFrameSignal::zeros(3, 2, 2)], 2.0, 0.0).unwrap();
    let rd = estimate_rate_distortion(&zero, &corpus[..1]).unwrap();
    let want = corpus[0].data().iter().map(|v| v * v).sum::<f64>() / 12.0;
    assert!((rd.distortion - want).abs() <= 1e-15);
    assert_eq!(rd.rate, 0.0);
}

#[test]
fn smallest_quantized_sparse_code() {
    let cb = build_quantized_sparse_codec((2, 1, 1), 1, 1, 2.0, RngSpec::new(0, 4)).unwrap();
    assert_eq!(cb.len(), 4);
    assert_eq!(cb.descriptor().rate_bits_per_sample, 1.0);
    assert!(cb.codewords().iter().all(|c| c.max_abs() <= 1.0));
}

#[test]
fn alpha_dimension_of_sparse_family_is_k_over_nb() {
    // n = 4 pixels, B = 2 frames, k = 1: the class has dimension 1 out of 8.
    let fam = QuantizedSparseFamily::new((2, 2, 2), 1, 2.0, RngSpec::new(5, 4)).unwrap();
    let mut r = RngSpec::new(5, 5).rng();
    let corpus: Vec<_> = (0..400).map(|_| fam.sample(&mut r)).collect();
    let points: Vec<RateDistortion> = (3..=9)
        .map(|bits| estimate_rate_distortion(&fam.codebook(bits).unwrap(), &corpus).unwrap())
        .collect();
    let alpha = fit_alpha_dimension(&points).unwrap();
    let want = 1.0 / 8.0;
    assert!((alpha - want).abs() <= 0.2 * want, "alpha {alpha}");
}
