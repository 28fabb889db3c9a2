//! Exhaustive compressible-signal pursuit on an enumerable code, with the
//! exact-recovery rate set against its probability bound.
//!
//! ```text
//! cargo run --release --example csp_toy
//! ```

use snapcs::bounds::simulate_csp_recovery;
use snapcs::codecs::{build_quantized_sparse_codec, random_grid_codebook};
use snapcs::rng::streams;
use snapcs::sensing::{add_noise, forward, generate_masks};
use snapcs::solvers::csp_recover;
use snapcs::{MaskDistribution, RngSpec};

fn main() -> snapcs::Result<()> {
    let cb = build_quantized_sparse_codec((4, 4, 2), 1, 2, 2.0, RngSpec::new(1, streams::CODEBOOK))?;
    println!("sparse code: {} words, rate {:.3}", cb.len(), cb.descriptor().rate_bits_per_sample);
    let x = &cb.codewords()[17];
    let masks = generate_masks(x.shape(), MaskDistribution::Gaussian, RngSpec::new(1, streams::MASKS))?;
    let clean = forward(&masks, x)?;
    for sigma in [0.0, 0.05, 0.2, 0.5] {
        let y = add_noise(&clean, sigma, RngSpec::new(1, streams::NOISE))?;
        let (xhat, residual) = csp_recover(&cb, &masks, &y)?;
        println!(
            "sigma {sigma:<4}: residual {residual:.4}, exact {}, error {:.4}",
            &xhat == x,
            x.normalized_error(&xhat)
        );
    }

    let grid = random_grid_codebook((4, 3, 2), 64, 4, 2.0, RngSpec::new(7, streams::CODEBOOK))?;
    let stats = simulate_csp_recovery(&grid, 2000, RngSpec::new(7, 0))?;
    println!(
        "grid code 64 words: exact {:.4}, min gap {:.4}, failure bound {:.4}",
        stats.exact_rate(),
        stats.min_distortion_gap,
        stats.failure_bound
    );
    Ok(())
}
