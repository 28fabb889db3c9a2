use ndarray::{ArrayD, IxDyn};

use super::Codec;
use crate::error::{Result, ScsError};
use crate::signal::MultiFrameSignal;
use crate::transforms::{keep_top_k_in_place, DctPlan};

/// Bits used per stored coefficient value.
pub(crate) const COEFF_BITS: f64 = 32.0;

pub(crate) fn index_bits(count: usize) -> f64 {
    if count <= 1 {
        0.0
    } else {
        (count as f64).log2().ceil()
    }
}

/// `g(f(x)) = x`. Useful as a degenerate code in tests and baselines.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityCodec;

impl Codec for IdentityCodec {
    fn name(&self) -> &str {
        "identity"
    }

    fn project(&self, s: &MultiFrameSignal) -> Result<MultiFrameSignal> {
        Ok(s.clone())
    }

    fn rate_bits(&self, s: &MultiFrameSignal) -> Result<f64> {
        Ok(64.0 * s.len() as f64)
    }
}

/// Keeps the `k` largest-magnitude entries of the whole signal.
#[derive(Debug, Clone, Copy)]
pub struct TopKCodec {
    pub k: usize,
}

impl Codec for TopKCodec {
    fn name(&self) -> &str {
        "topk"
    }

    fn project(&self, s: &MultiFrameSignal) -> Result<MultiFrameSignal> {
        let mut out = s.clone();
        keep_top_k_in_place(out.data_mut(), self.k);
        out.set_normalized_unchecked(false);
        Ok(out)
    }

    fn rate_bits(&self, s: &MultiFrameSignal) -> Result<f64> {
        let kept = self.k.min(s.len()) as f64;
        Ok(kept * (COEFF_BITS + index_bits(s.len())))
    }
}

/// Frame-stack 3D-DCT code: the video is tiled into disjoint
/// `block × block × B` cubes (edge cubes are smaller), each cube is
/// transformed and only its largest `keep_fraction` of coefficients kept.
#[derive(Debug, Clone, Copy)]
pub struct Dct3dCodec {
    pub block: usize,
    pub keep_fraction: f64,
}

impl Default for Dct3dCodec {
    fn default() -> Self {
        Dct3dCodec {
            block: 8,
            keep_fraction: 0.125,
        }
    }
}

impl Dct3dCodec {
    fn check(&self) -> Result<()> {
        if self.block == 0 || !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return Err(ScsError::InvalidParameter(format!(
                "dct3d needs block >= 1 and keep_fraction in (0,1], got {} / {}",
                self.block, self.keep_fraction
            )));
        }
        Ok(())
    }

    fn tiles(&self, s: &MultiFrameSignal) -> Vec<(usize, usize, usize, usize)> {
        let mut tiles = Vec::new();
        for y0 in (0..s.ny()).step_by(self.block) {
            for x0 in (0..s.nx()).step_by(self.block) {
                let w = self.block.min(s.nx() - x0);
                let h = self.block.min(s.ny() - y0);
                tiles.push((x0, y0, w, h));
            }
        }
        tiles
    }

    fn keep_count(&self, size: usize) -> usize {
        ((self.keep_fraction * size as f64).ceil() as usize).clamp(1, size)
    }
}

impl Codec for Dct3dCodec {
    fn name(&self) -> &str {
        "dct3d"
    }

    fn project(&self, s: &MultiFrameSignal) -> Result<MultiFrameSignal> {
        self.check()?;
        let b = s.frames();
        let mut out = MultiFrameSignal::zeros(s.nx(), s.ny(), b);
        for (x0, y0, w, h) in self.tiles(s) {
            let shape = [w, h, b];
            let mut cube = ArrayD::from_shape_fn(IxDyn(&shape), |ix| s.get(x0 + ix[0], y0 + ix[1], ix[2]));
            let plan = DctPlan::new(&shape)?;
            plan.apply(&mut cube, false)?;
            let keep = self.keep_count(cube.len());
            keep_top_k_in_place(cube.as_slice_mut().expect("standard layout"), keep);
            plan.apply(&mut cube, true)?;
            for (ix, v) in cube.indexed_iter() {
                let idx = out.index(x0 + ix[0], y0 + ix[1], ix[2]);
                out.data_mut()[idx] = *v;
            }
        }
        Ok(out)
    }

    fn rate_bits(&self, s: &MultiFrameSignal) -> Result<f64> {
        self.check()?;
        let b = s.frames();
        Ok(self
            .tiles(s)
            .iter()
            .map(|&(_, _, w, h)| {
                let size = w * h * b;
                self.keep_count(size) as f64 * (COEFF_BITS + index_bits(size))
            })
            .sum())
    }
}
