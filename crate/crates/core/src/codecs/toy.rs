use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::Codec;
use crate::error::{Result, ScsError};
use crate::rng::RngSpec;
use crate::signal::{check_dims, MultiFrameSignal};

/// Largest codebook we are willing to materialize.
pub const MAX_ENUMERABLE: usize = 1 << 20;

/// Rate `r` (bits per entry), distortion `δ` (worst-case per-entry squared
/// error over the signal class) and amplitude bound `ρ` (`‖x‖_∞ ≤ ρ/2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodecDescriptor {
    pub rate_bits_per_sample: f64,
    pub distortion_bound: f64,
    pub amplitude_bound: f64,
}

/// A finite codebook; as a [`Codec`] it projects onto the nearest codeword.
#[derive(Debug, Clone)]
pub struct EnumerableCodebook {
    shape: (usize, usize, usize),
    codewords: Vec<MultiFrameSignal>,
    descriptor: CodecDescriptor,
}

impl EnumerableCodebook {
    pub fn new(
        codewords: Vec<MultiFrameSignal>,
        amplitude_bound: f64,
        distortion_bound: f64,
    ) -> Result<Self> {
        let first = codewords
            .first()
            .ok_or_else(|| ScsError::InvalidCodec("empty codebook".into()))?;
        if codewords.len() > MAX_ENUMERABLE {
            return Err(ScsError::TooLargeCodebook {
                size: codewords.len() as f64,
                limit: MAX_ENUMERABLE,
            });
        }
        if !(amplitude_bound > 0.0) {
            return Err(ScsError::InvalidCodec(format!(
                "amplitude bound must be positive, got {amplitude_bound}"
            )));
        }
        if !(distortion_bound >= 0.0) {
            return Err(ScsError::InvalidCodec(format!(
                "distortion bound must be non-negative, got {distortion_bound}"
            )));
        }
        let shape = first.shape();
        let mut seen = HashSet::with_capacity(codewords.len());
        for (i, c) in codewords.iter().enumerate() {
            if c.shape() != shape {
                return Err(ScsError::InvalidCodec(format!(
                    "codeword {i} has shape {:?}, expected {shape:?}",
                    c.shape()
                )));
            }
            if c.max_abs() > amplitude_bound / 2.0 {
                return Err(ScsError::InvalidCodec(format!(
                    "codeword {i} exceeds the amplitude bound rho/2 = {}",
                    amplitude_bound / 2.0
                )));
            }
            let key: Vec<u64> = c.data().iter().map(|v| (v + 0.0).to_bits()).collect();
            if !seen.insert(key) {
                return Err(ScsError::InvalidCodec(format!("codeword {i} is a duplicate")));
            }
        }
        let entries = first.len() as f64;
        let rate = (codewords.len() as f64).log2() / entries;
        Ok(EnumerableCodebook {
            shape,
            codewords,
            descriptor: CodecDescriptor {
                rate_bits_per_sample: rate,
                distortion_bound,
                amplitude_bound,
            },
        })
    }

    pub fn with_distortion_bound(mut self, distortion_bound: f64) -> Self {
        self.descriptor.distortion_bound = distortion_bound;
        self
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.shape
    }

    pub fn codewords(&self) -> &[MultiFrameSignal] {
        &self.codewords
    }

    pub fn descriptor(&self) -> &CodecDescriptor {
        &self.descriptor
    }

    /// Index of and distance to the nearest codeword; ties go to the lowest index.
    pub fn nearest(&self, s: &MultiFrameSignal) -> Result<(usize, f64)> {
        if s.shape() != self.shape {
            return Err(ScsError::InvalidShape(format!(
                "signal {:?} does not match codebook {:?}",
                s.shape(),
                self.shape
            )));
        }
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.codewords.iter().enumerate() {
            let d: f64 = c
                .data()
                .iter()
                .zip(s.data())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d < best.1 {
                best = (i, d);
            }
        }
        Ok((best.0, best.1.sqrt()))
    }
}

impl Codec for EnumerableCodebook {
    fn name(&self) -> &str {
        "toy"
    }

    fn project(&self, s: &MultiFrameSignal) -> Result<MultiFrameSignal> {
        let (i, _) = self.nearest(s)?;
        Ok(self.codewords[i].clone())
    }

    fn rate_bits(&self, _s: &MultiFrameSignal) -> Result<f64> {
        Ok((self.codewords.len() as f64).log2())
    }

    fn codebook(&self) -> Option<&EnumerableCodebook> {
        Some(self)
    }
}

/// Midpoints of `levels` equal cells covering `[−ρ/2, ρ/2]`.
pub(crate) fn quantization_levels(levels: usize, rho: f64) -> Vec<f64> {
    let step = rho / levels as f64;
    (0..levels)
        .map(|l| -rho / 2.0 + (l as f64 + 0.5) * step)
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The multi-frame sparse signal class: frame 1 is `k`-sparse, and every
/// later frame carries the same non-zero values at locations given by a
/// fixed per-frame pixel permutation.
#[derive(Debug, Clone)]
pub struct QuantizedSparseFamily {
    nx: usize,
    ny: usize,
    frames: usize,
    k: usize,
    rho: f64,
    perms: Vec<Vec<usize>>,
}

impl QuantizedSparseFamily {
    pub fn new(shape: (usize, usize, usize), k: usize, rho: f64, rng: RngSpec) -> Result<Self> {
        let (nx, ny, frames) = shape;
        check_dims(nx, ny, frames)?;
        let n = nx * ny;
        if k > n {
            return Err(ScsError::InvalidParameter(format!(
                "sparsity k = {k} exceeds the {n} pixels per frame"
            )));
        }
        if !(rho > 0.0) {
            return Err(ScsError::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        let mut r = rng.rng();
        let mut perms = vec![(0..n).collect::<Vec<_>>()];
        for _ in 1..frames {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut r);
            perms.push(p);
        }
        Ok(QuantizedSparseFamily {
            nx,
            ny,
            frames,
            k,
            rho,
            perms,
        })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.frames)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `C(n, k) · L^k` for `L = 2^quant_bits` levels.
    pub fn codebook_size(&self, quant_bits: u32) -> f64 {
        let n = self.nx * self.ny;
        binomial(n, self.k) * 2f64.powi(quant_bits as i32).powi(self.k as i32)
    }

    /// Worst-case per-entry distortion of the quantized code on this class.
    pub fn distortion_bound(&self, quant_bits: u32) -> f64 {
        let half_step = self.rho / (2.0 * 2f64.powi(quant_bits as i32));
        self.k as f64 * half_step * half_step / (self.nx * self.ny) as f64
    }

    fn assemble(&self, support: &[usize], values: &[f64]) -> MultiFrameSignal {
        let mut s = MultiFrameSignal::zeros(self.nx, self.ny, self.frames);
        let b = self.frames;
        let data = s.data_mut();
        for (frame, perm) in self.perms.iter().enumerate() {
            for (&p, &v) in support.iter().zip(values) {
                data[perm[p] * b + frame] = v;
            }
        }
        s
    }

    pub fn codebook(&self, quant_bits: u32) -> Result<EnumerableCodebook> {
        if quant_bits == 0 {
            return Err(ScsError::InvalidParameter("quant_bits must be at least 1".into()));
        }
        let size = self.codebook_size(quant_bits);
        if !(size <= MAX_ENUMERABLE as f64) {
            return Err(ScsError::TooLargeCodebook {
                size,
                limit: MAX_ENUMERABLE,
            });
        }
        let n = self.nx * self.ny;
        let levels = quantization_levels(1usize << quant_bits, self.rho);
        let mut codewords = Vec::with_capacity(size as usize);
        let mut support: Vec<usize> = (0..self.k).collect();
        loop {
            let mut digits = vec![0usize; self.k];
            loop {
                let values: Vec<f64> = digits.iter().map(|&d| levels[d]).collect();
                codewords.push(self.assemble(&support, &values));
                if !advance_digits(&mut digits, levels.len()) {
                    break;
                }
            }
            if !advance_combination(&mut support, n) {
                break;
            }
        }
        EnumerableCodebook::new(codewords, self.rho, self.distortion_bound(quant_bits))
    }

    /// A member of the signal class with values uniform on `[−ρ/2, ρ/2]`.
    pub fn sample(&self, rng: &mut impl Rng) -> MultiFrameSignal {
        let n = self.nx * self.ny;
        let mut pixels: Vec<usize> = (0..n).collect();
        pixels.shuffle(rng);
        let mut support: Vec<usize> = pixels[..self.k].to_vec();
        support.sort_unstable();
        let values: Vec<f64> = (0..self.k)
            .map(|_| rng.random_range(-self.rho / 2.0..=self.rho / 2.0))
            .collect();
        self.assemble(&support, &values)
    }
}

fn advance_digits(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Next `k`-combination of `0..n` in lexicographic order.
fn advance_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Codebook of `k`-sparse multi-frame signals on a uniform grid over
/// `[−ρ/2, ρ/2]`.
pub fn build_quantized_sparse_codec(
    shape: (usize, usize, usize),
    k: usize,
    quant_bits: u32,
    rho: f64,
    rng: RngSpec,
) -> Result<EnumerableCodebook> {
    QuantizedSparseFamily::new(shape, k, rho, rng)?.codebook(quant_bits)
}

/// `size` distinct codewords with entries drawn uniformly from a
/// `levels`-point midpoint grid over `[−ρ/2, ρ/2]`.
pub fn random_grid_codebook(
    shape: (usize, usize, usize),
    size: usize,
    levels: usize,
    rho: f64,
    rng: RngSpec,
) -> Result<EnumerableCodebook> {
    let (nx, ny, frames) = shape;
    check_dims(nx, ny, frames)?;
    if size == 0 {
        return Err(ScsError::InvalidCodec("empty codebook".into()));
    }
    if size > MAX_ENUMERABLE {
        return Err(ScsError::TooLargeCodebook {
            size: size as f64,
            limit: MAX_ENUMERABLE,
        });
    }
    if levels < 2 {
        return Err(ScsError::InvalidParameter("need at least two levels".into()));
    }
    let len = nx * ny * frames;
    let capacity = (levels as f64).powi(len as i32);
    if (size as f64) > capacity {
        return Err(ScsError::InvalidParameter(format!(
            "cannot draw {size} distinct codewords from {capacity} grid points"
        )));
    }
    let grid = quantization_levels(levels, rho);
    let mut r = rng.rng();
    let mut seen = HashSet::with_capacity(size);
    let mut codewords = Vec::with_capacity(size);
    while codewords.len() < size {
        let idx: Vec<usize> = (0..len).map(|_| r.random_range(0..levels)).collect();
        if seen.insert(idx.clone()) {
            let data = idx.iter().map(|&i| grid[i]).collect();
            codewords.push(MultiFrameSignal::new(nx, ny, frames, data)?);
        }
    }
    EnumerableCodebook::new(codewords, rho, 0.0)
}
