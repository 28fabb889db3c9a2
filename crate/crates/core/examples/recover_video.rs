//! CbPGD and CbGAP on a 32×32×8 moving square, with fixed and adaptive
//! steps and both mask families.
//!
//! ```text
//! cargo run --release --example recover_video
//! ```

use snapcs::codecs::{Codec, Dct3dCodec, NlsCodec, NlsParams};
use snapcs::io::{make_phantom, PhantomKind};
use snapcs::rng::streams;
use snapcs::sensing::{forward, generate_masks};
use snapcs::solvers::{cbgap_recover, cbpgd_recover, compute_metrics, InitMode, SolverConfig, StepMode};
use snapcs::{MaskDistribution, RngSpec};

fn main() -> snapcs::Result<()> {
    let shape = (32, 32, 8);
    let x = make_phantom(PhantomKind::moving_square(), shape, RngSpec::new(0, streams::PHANTOM))?;
    let nls = NlsCodec::new(NlsParams::default());
    let dct = Dct3dCodec::default();

    for dist in [MaskDistribution::Bernoulli01, MaskDistribution::Gaussian] {
        let masks = generate_masks(shape, dist, RngSpec::new(0, streams::MASKS))?;
        let y = forward(&masks, &x)?;
        let runs: [(&str, &dyn Codec, SolverConfig, bool); 4] = [
            ("gap/nls", &nls, SolverConfig::gap_default(), true),
            ("gap/dct3d", &dct, SolverConfig::gap_default(), true),
            ("pgd/dct3d", &dct, SolverConfig::pgd_default(shape.2), false),
            ("pgd/dct3d adaptive", &dct, adaptive(SolverConfig::pgd_default(shape.2)), false),
        ];
        for (name, codec, cfg, gap) in runs {
            // μ = 2/B assumes R_j ≤ B; Gaussian masks break that and PGD diverges.
            if !gap && dist == MaskDistribution::Gaussian && cfg.step_mode == StepMode::Fixed {
                continue;
            }
            let out = if gap {
                cbgap_recover(codec, &masks, &y, &cfg, None)?
            } else {
                cbpgd_recover(codec, &masks, &y, &cfg, None)?
            };
            let m = compute_metrics(&out.xhat, &x)?;
            println!(
                "{:<11} {name:<19} iters {:>3} residual {:.3e} psnr {:6.2} dB",
                dist.name(),
                out.trace.len(),
                out.final_residual,
                m.psnr_db
            );
        }
        let mut bp = SolverConfig::gap_default();
        bp.init_mode = InitMode::Backprojection;
        bp.max_iters = 1;
        let first = cbgap_recover(&snapcs::codecs::IdentityCodec, &masks, &y, &bp, None)?;
        println!("{:<11} {:<19}                            psnr {:6.2} dB", dist.name(), "backprojection", compute_metrics(&first.xhat, &x)?.psnr_db);
    }
    Ok(())
}

fn adaptive(mut cfg: SolverConfig) -> SolverConfig {
    cfg.step_mode = StepMode::Adaptive;
    cfg.max_iters = 40;
    cfg
}
