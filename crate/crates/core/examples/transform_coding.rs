//! Orthonormal multidimensional DCT and top-k thresholding, then the
//! frame-stack 3D-DCT code applied to a smooth video at several keep rates.
//!
//! ```text
//! cargo run --release --example transform_coding
//! ```

use ndarray::{ArrayD, IxDyn};
use snapcs::codecs::{Codec, Dct3dCodec};
use snapcs::transforms::{dct_forward, dct_inverse, keep_top_k, CoeffTensor};
use snapcs::MultiFrameSignal;

fn main() -> snapcs::Result<()> {
    let block = ArrayD::from_shape_fn(IxDyn(&[8, 8, 4, 4]), |ix| {
        ((ix[0] as f64 * 0.4).sin() + (ix[1] as f64 * 0.3).cos()) * (1.0 + 0.1 * ix[2] as f64) + 0.05 * ix[3] as f64
    });
    let t = CoeffTensor::spatial(block);
    let c = dct_forward(&t)?;
    println!("energy spatial={:.6} dct={:.6}", t.norm2(), c.norm2());
    for k in [1, 8, 32, 128, 1024] {
        let approx = dct_inverse(&keep_top_k(&c, k))?;
        let err = (&approx.data - &t.data).iter().map(|v| v * v).sum::<f64>().sqrt() / t.norm2();
        println!("keep {k:>4} of 1024: relative error {err:.2e}");
    }

    let video = MultiFrameSignal::from_fn(32, 32, 8, |x, y, f| {
        0.5 + 0.4 * ((x as f64 + f as f64) / 6.0).sin() * (y as f64 / 9.0).cos()
    })?;
    for keep_fraction in [0.02, 0.05, 0.125, 0.5] {
        let codec = Dct3dCodec { block: 8, keep_fraction };
        let xhat = codec.project(&video)?;
        println!(
            "dct3d keep {keep_fraction:<5}: distortion {:.2e}, {:.2} bits/entry",
            video.distortion(&xhat),
            codec.rate_bits(&video)? / video.len() as f64
        );
    }
    Ok(())
}
