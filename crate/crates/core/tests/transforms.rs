use std::f64::consts::PI;

use ndarray::{ArrayD, IxDyn};
use proptest::prelude::*;
use snapcs::transforms::{dct_forward, dct_inverse, dct_matrix, keep_top_k, top_k_indices, Basis, CoeffTensor};

fn tensor() -> impl Strategy<Value = CoeffTensor> {
    prop::collection::vec(1usize..=5, 1..=4).prop_flat_map(|shape| {
        let len: usize = shape.iter().product();
        prop::collection::vec(-10.0f64..10.0, len)
            .prop_map(move |v| CoeffTensor::from_shape_vec(&shape, v, Basis::Spatial).unwrap())
    })
}

/// Textbook separable DCT-II evaluated entry by entry.
fn naive_dct(x: &ArrayD<f64>) -> ArrayD<f64> {
    let shape = x.shape().to_vec();
    ArrayD::from_shape_fn(IxDyn(&shape), |k| {
        let mut s = 0.0;
        for (n, v) in x.indexed_iter() {
            let mut w = 1.0;
            for (ax, &len) in shape.iter().enumerate() {
                let l = len as f64;
                let c = if k[ax] == 0 { (1.0 / l).sqrt() } else { (2.0 / l).sqrt() };
                w *= c * (PI * (2.0 * n[ax] as f64 + 1.0) * k[ax] as f64 / (2.0 * l)).cos();
            }
            s += w * v;
        }
        s
    })
}

proptest! {
    #[test]
    fn parseval(t in tensor()) {
        let c = dct_forward(&t).unwrap();
        prop_assert_eq!(c.basis, Basis::Dct);
        prop_assert!((c.norm2() - t.norm2()).abs() <= 1e-12 * t.norm2().max(1.0));
    }

    #[test]
    fn round_trip(t in tensor()) {
        let back = dct_inverse(&dct_forward(&t).unwrap()).unwrap();
        for (a, b) in t.data.iter().zip(back.data.iter()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn matches_textbook_formula(t in tensor()) {
        let want = naive_dct(&t.data);
        let got = dct_forward(&t).unwrap();
        for (a, b) in want.iter().zip(got.data.iter()) {
            prop_assert!((a - b).abs() <= 1e-11);
        }
    }

    #[test]
    fn top_k_is_optimal(v in prop::collection::vec(-1.0f64..1.0, 1..=12), k in 0usize..=4) {
        let t = CoeffTensor::from_shape_vec(&[v.len()], v.clone(), Basis::Dct).unwrap();
        let kept: Vec<f64> = keep_top_k(&t, k).data.iter().copied().collect();
        let want = k.min(v.len());
        let best = (0u32..1 << v.len())
            .filter(|m| m.count_ones() as usize == want)
            .map(|m| (0..v.len()).filter(|i| m >> i & 1 == 1).map(|i| v[i] * v[i]).sum::<f64>())
            .fold(0.0, f64::max);
        let energy: f64 = kept.iter().map(|a| a * a).sum();
        prop_assert!((energy - best).abs() <= 1e-12);
        prop_assert!(kept.iter().filter(|a| **a != 0.0).count() <= want);
        prop_assert!(kept.iter().zip(&v).all(|(a, b)| *a == 0.0 || a == b));
    }

    #[test]
    fn top_k_indices_are_ordered(v in prop::collection::vec(-1.0f64..1.0, 0..=20), k in 0usize..=25) {
        let idx = top_k_indices(&v, k);
        prop_assert_eq!(idx.len(), k.min(v.len()));
        for w in idx.windows(2) {
            let (a, b) = (v[w[0]].abs(), v[w[1]].abs());
            prop_assert!(a > b || (a == b && w[0] < w[1]));
        }
    }
}

#[test]
fn basis_rows_are_orthonormal() {
    for len in 1..=16 {
        let m = dct_matrix(len);
        for i in 0..len {
            for j in 0..len {
                let d: f64 = (0..len).map(|k| m[i * len + k] * m[j * len + k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-13, "len {len} rows {i},{j}: {d}");
            }
        }
    }
}
