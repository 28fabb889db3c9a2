use ndarray::{ArrayD, IxDyn};
use rand::seq::index::sample;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::run_trials;
use crate::codecs::Dct3dCodec;
use crate::error::{Result, ScsError};
use crate::rng::{streams, RngSpec};
use crate::sensing::{forward, generate_masks, MaskDistribution, Measurement};
use crate::signal::MultiFrameSignal;
use crate::solvers::{cbgap_recover, SolverConfig};
use crate::transforms::DctPlan;

/// How the excess reconstruction error caused by measurement noise grows
/// with the noise level, on matched masks and noise shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseScalingSpec {
    pub nx: usize,
    pub ny: usize,
    pub frames: usize,
    /// Tile edge of the 3D-DCT code.
    pub block: usize,
    /// Non-zero DCT coefficients per `block × block × B` tile.
    pub sparsity: usize,
    /// Two or more increasing noise levels.
    pub sigmas: Vec<f64>,
    pub trials: usize,
    pub iters: usize,
    pub rng: RngSpec,
}

impl NoiseScalingSpec {
    pub fn desk(rng: RngSpec) -> Self {
        NoiseScalingSpec {
            nx: 16,
            ny: 16,
            frames: 2,
            block: 8,
            sparsity: 8,
            sigmas: vec![0.01, 0.1],
            trials: 20,
            iters: 150,
            rng,
        }
    }

    fn codec(&self) -> Dct3dCodec {
        let tile = (self.block * self.block * self.frames) as f64;
        Dct3dCodec {
            block: self.block,
            keep_fraction: self.sparsity as f64 / tile,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseScalingReport {
    pub sigmas: Vec<f64>,
    /// Mean `e` of the noise-free runs.
    pub clean_error: f64,
    /// Mean of `e(σ) − e(0)` per noise level.
    pub excess_error: Vec<f64>,
    /// `excess(σ_last)/excess(σ_first)`.
    pub ratio: f64,
    /// `σ_last/σ_first`, the ratio under exactly linear growth.
    pub linear_ratio: f64,
    /// `ratio` within a factor 3 of `linear_ratio`.
    pub pass: bool,
}

/// A video whose every tile has exactly `s` non-zero 3D-DCT coefficients.
fn dct_sparse_video(spec: &NoiseScalingSpec, r: &mut impl Rng) -> Result<MultiFrameSignal> {
    let (nx, ny, b, blk) = (spec.nx, spec.ny, spec.frames, spec.block);
    let mut x = MultiFrameSignal::zeros(nx, ny, b);
    for y0 in (0..ny).step_by(blk) {
        for x0 in (0..nx).step_by(blk) {
            let shape = [blk.min(nx - x0), blk.min(ny - y0), b];
            let mut cube = ArrayD::<f64>::zeros(IxDyn(&shape));
            let len = cube.len();
            let flat = cube.as_slice_mut().expect("standard layout");
            for i in sample(r, len, spec.sparsity.min(len)) {
                flat[i] = r.sample::<f64, _>(StandardNormal);
            }
            DctPlan::new(&shape)?.apply(&mut cube, true)?;
            for (ix, v) in cube.indexed_iter() {
                let idx = x.index(x0 + ix[0], y0 + ix[1], ix[2]);
                x.data_mut()[idx] = *v;
            }
        }
    }
    Ok(x)
}

/// GAP (`μ = 1`) with the 3D-DCT code on videos that code exactly. Each
/// trial is solved noise-free and at every `σ` with the same masks and the
/// same standard-normal noise draw scaled by `σ`.
pub fn noise_scaling_experiment(spec: &NoiseScalingSpec) -> Result<NoiseScalingReport> {
    let n = spec.nx * spec.ny;
    if spec.sigmas.len() < 2 || spec.sigmas.windows(2).any(|w| !(w[0] > 0.0 && w[0] < w[1])) {
        return Err(ScsError::InvalidParameter(
            "need at least two positive, increasing noise levels".into(),
        ));
    }
    if spec.block == 0 || spec.sparsity == 0 || spec.trials == 0 || spec.iters == 0 {
        return Err(ScsError::InvalidParameter(
            "block, sparsity, trials and iters must be positive".into(),
        ));
    }
    let codec = spec.codec();
    let mut cfg = SolverConfig::gap_default();
    cfg.step_mu = 1.0;
    cfg.max_iters = spec.iters;
    cfg.residual_tol = 0.0;
    cfg.record_wall_time = false;

    let rows = run_trials(spec.trials, |t| {
        let mut r = spec.rng.trial(t).rng();
        let x = dct_sparse_video(spec, &mut r)?;
        let masks = generate_masks(x.shape(), MaskDistribution::Gaussian, RngSpec::new(r.next_u64(), streams::MASKS))?;
        let clean = forward(&masks, &x)?;
        let g: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
        let solve = |sigma: f64| -> Result<f64> {
            let y = Measurement::new(
                spec.nx,
                spec.ny,
                clean.data().iter().zip(&g).map(|(v, g)| v + sigma * g).collect(),
            )?;
            Ok(cbgap_recover(&codec, &masks, &y, &cfg, None)?.xhat.normalized_error(&x))
        };
        let e0 = solve(0.0)?;
        let excess = spec.sigmas.iter().map(|&s| Ok(solve(s)? - e0)).collect::<Result<Vec<f64>>>()?;
        Ok((e0, excess))
    })?;
    let m = spec.trials as f64;
    let clean_error = rows.iter().map(|r| r.0).sum::<f64>() / m;
    let excess_error: Vec<f64> = (0..spec.sigmas.len())
        .map(|i| rows.iter().map(|r| r.1[i]).sum::<f64>() / m)
        .collect();
    let first = excess_error[0];
    let last = *excess_error.last().unwrap_or(&first);
    let ratio = last / first;
    let linear_ratio = spec.sigmas[spec.sigmas.len() - 1] / spec.sigmas[0];
    let pass = ratio.is_finite() && ratio >= linear_ratio / 3.0 && ratio <= linear_ratio * 3.0;
    Ok(NoiseScalingReport {
        sigmas: spec.sigmas.clone(),
        clean_error,
        excess_error,
        ratio,
        linear_ratio,
        pass,
    })
}
