//! The snapshot operator on a tiny instance: forward model, adjoint,
//! `HHᵀ` inverse and additive noise.
//!
//! ```text
//! cargo run --release --example sensing_operator
//! ```

use snapcs::sensing::{add_noise, adjoint, forward, generate_masks, gram_apply_inverse, DEFAULT_CLAMP_EPS};
use snapcs::{MaskDistribution, MaskStack, MultiFrameSignal, RngSpec};

fn main() -> snapcs::Result<()> {
    // D₁ = diag(1, 2, 3), D₂ = diag(4, 5, 6) on a 3×1 frame.
    let masks = MaskStack::from_frames(3, 1, &[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]], MaskDistribution::Gaussian)?;
    let x = MultiFrameSignal::from_frames(3, 1, &[vec![1.0, 1.0, 1.0], vec![1.0, 0.0, 1.0]])?;
    let y = forward(&masks, &x)?;
    println!("y = Hx         = {:?}", y.data());
    println!("R = diag(HHᵀ)  = {:?}", masks.gram_diag());
    let back = adjoint(&masks, &y)?;
    println!("Hᵀy frame 0    = {:?}", back.frame(0));
    let (w, clamped) = gram_apply_inverse(&masks, &y, DEFAULT_CLAMP_EPS)?;
    println!("R⁻¹y           = {:?} (clamped {clamped})", w.data());

    // Binary masks can leave a pixel unsampled in every frame.
    let binary = generate_masks((16, 16, 4), MaskDistribution::Bernoulli01, RngSpec::new(3, 1))?;
    let dead = binary.gram_diag().iter().filter(|r| **r == 0.0).count();
    println!("binary 16x16x4: {dead} of 256 pixels never sampled");

    let xb = MultiFrameSignal::constant(16, 16, 4, 0.5);
    let clean = forward(&binary, &xb)?;
    let noisy = add_noise(&clean, 0.1, RngSpec::new(3, 2))?;
    println!("‖z‖/√n = {:.4} (sigma 0.1)", noisy.distance(&clean) / 16.0);

    let e = snapcs::Measurement::new(16, 16, (0..256).map(|i| (i % 7) as f64 - 3.0).collect())?;
    let lhs = clean.dot(&e);
    let rhs = xb.dot(&adjoint(&binary, &e)?);
    println!("<Hx, e> - <x, Hᵀe> = {:.2e}", lhs - rhs);
    Ok(())
}
