//! Nonlocal-similarity code on a moving-square video: group statistics,
//! rate-distortion at several keep settings and an empirical α fit for the
//! quantized sparse family.
//!
//! ```text
//! cargo run --release --example nls_codec
//! ```

use snapcs::codecs::{
    estimate_rate_distortion, fit_alpha_dimension, nls_encode, Codec, NlsCodec, NlsParams, QuantizedSparseFamily,
};
use snapcs::io::{make_phantom, PhantomKind};
use snapcs::rng::streams;
use snapcs::RngSpec;

fn main() -> snapcs::Result<()> {
    let x = make_phantom(PhantomKind::moving_square(), (32, 32, 8), RngSpec::new(0, streams::PHANTOM))?;
    let base = NlsParams::default();
    let code = nls_encode(&base, &x)?;
    let full_groups = code.groups.iter().filter(|g| g.members.len() == base.group_size).count();
    println!(
        "{} groups ({full_groups} full), {} coefficients kept",
        code.groups.len(),
        code.kept_coefficients()
    );

    for keep in [8, 32, 128, 512] {
        let codec = NlsCodec::new(NlsParams {
            keep_per_group: Some(keep),
            ..base
        });
        let xhat = codec.project(&x)?;
        let psnr = 10.0 * (1.0 / x.distortion(&xhat)).log10();
        println!(
            "keep {keep:>3}/group: psnr {psnr:6.2} dB, {:.3} bits/entry",
            codec.rate_bits(&x)? / x.len() as f64
        );
    }

    let fam = QuantizedSparseFamily::new((2, 2, 2), 1, 2.0, RngSpec::new(5, streams::CODEBOOK))?;
    let mut r = RngSpec::new(5, streams::CORPUS).rng();
    let corpus: Vec<_> = (0..400).map(|_| fam.sample(&mut r)).collect();
    let points = (3..=9)
        .map(|bits| estimate_rate_distortion(&fam.codebook(bits)?, &corpus))
        .collect::<snapcs::Result<Vec<_>>>()?;
    for (bits, p) in (3..).zip(&points) {
        println!("bits {bits}: rate {:.3} distortion {:.3e}", p.rate, p.distortion);
    }
    println!("fitted alpha {:.4} (k/nB = {:.4})", fit_alpha_dimension(&points)?, 1.0 / 8.0);
    Ok(())
}
