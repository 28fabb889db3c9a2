//! The sub-Gaussian norm of a normal variable, the product tail it implies
//! and the Bernstein-type bound for weighted sums of squared normals.
//!
//! ```text
//! cargo run --release --example tail_bounds
//! ```

use snapcs::bounds::{
    corollary_b_sweep, product_tail, simulate_bernstein_tail, verify_psi2_gaussian, CorollaryBSpec,
    TailBoundReport, TailExperimentSpec,
};
use snapcs::RngSpec;

fn show(title: &str, r: &TailBoundReport) {
    println!("{title}");
    for rec in &r.records {
        println!(
            "  t={:<8.4} empirical={:.5} bound={:.5} pass={}",
            rec.threshold, rec.empirical_freq, rec.theoretical_bound, rec.pass
        );
    }
}

fn main() -> snapcs::Result<()> {
    for sigma in [1.0, 3.0] {
        let c = verify_psi2_gaussian(sigma)?;
        println!("sigma {sigma}: psi2 {:.6}, E exp(X²/L²) at L = √(8/3)σ: {:.6}", c.psi2, c.check_at_bound);
    }
    show(
        "|XY| tail",
        &product_tail(1.0, 1.0, &[0.5, 1.0, 2.0, 4.0, 8.0], 100_000, RngSpec::new(1, 0))?,
    );
    let spec = TailExperimentSpec::uniform(100, 100_000, TailExperimentSpec::default_grid(100), RngSpec::new(2, 0));
    show("mean of 100 centred squared normals", &simulate_bernstein_tail(&spec)?);

    let (points, _) = corollary_b_sweep(&CorollaryBSpec {
        rate: 0.5,
        deltas: vec![2f64.powi(-4), 2f64.powi(-8), 2f64.powi(-12)],
        eta: 4.0,
        rho: 2.0,
        n: 4,
        trials: 500,
        rng: RngSpec::new(3, 0),
    })?;
    for p in points {
        println!(
            "delta {:<10} B {:?} |C| {:<6} bound {:.3} exceed {:.4} mean distortion {:.4}",
            p.delta, p.frames, p.codebook_size, p.error_bound, p.exceed_freq, p.mean_distortion
        );
    }
    Ok(())
}
