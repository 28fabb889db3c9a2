//! File-based workflow without the CLI: simulate, save containers, reload,
//! recover and write the usual outputs plus a manifest.
//!
//! ```text
//! cargo run --release --example pipeline -- /tmp/snapcs-demo
//! ```

use std::path::PathBuf;

use snapcs::codecs::{Codec, NlsCodec, NlsParams};
use snapcs::io::{
    load_masks, load_measurement, load_signal, make_phantom, save_masks, save_measurement, save_outputs, save_signal,
    PhantomKind, RunManifest, RunReport,
};
use snapcs::rng::streams;
use snapcs::sensing::{add_noise, forward, generate_masks};
use snapcs::solvers::{cbgap_recover, compute_metrics, SolverConfig};
use snapcs::{MaskDistribution, RngSpec};

fn main() -> snapcs::Result<()> {
    let dir: PathBuf = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("snapcs-pipeline"), PathBuf::from);
    let seed = 11;
    let x = make_phantom(PhantomKind::moving_square(), (32, 32, 8), RngSpec::new(seed, streams::PHANTOM))?;
    let masks = generate_masks(x.shape(), MaskDistribution::Gaussian, RngSpec::new(seed, streams::MASKS))?;
    let y = add_noise(&forward(&masks, &x)?, 0.01, RngSpec::new(seed, streams::NOISE))?;
    std::fs::create_dir_all(&dir).map_err(|source| snapcs::ScsError::Io { path: dir.clone(), source })?;
    save_masks(dir.join("masks.scsm"), &masks)?;
    save_measurement(dir.join("measurement.scsy"), &y)?;
    save_signal(dir.join("truth.scsx"), &x)?;

    let masks = load_masks(dir.join("masks.scsm"))?;
    let y = load_measurement(dir.join("measurement.scsy"))?;
    let truth = load_signal(dir.join("truth.scsx"))?;
    let codec = NlsCodec::new(NlsParams::default());
    let mut cfg = SolverConfig::gap_default();
    cfg.record_wall_time = false;
    let out = cbgap_recover(&codec, &masks, &y, &cfg, None)?;
    let metrics = compute_metrics(&out.xhat, &truth)?;

    let mut manifest = RunManifest::new();
    manifest.set("command", "pipeline-example")?;
    manifest.set("seed", seed)?;
    manifest.set("codec", codec.name())?;
    manifest.set("mu", cfg.step_mu)?;
    let report = RunReport {
        final_residual: out.final_residual,
        final_error: None,
        metrics: Some(metrics.clone()),
    };
    let rec = dir.join("rec");
    let paths = save_outputs(&rec, &mut manifest, &out.xhat, &out.trace, &report)?;
    println!("psnr {:.2} dB after {} iterations", metrics.psnr_db, out.trace.len());
    println!("wrote {} and {} previews", paths.recon.display(), paths.previews.len());
    print!("{}", manifest.to_text());
    Ok(())
}
