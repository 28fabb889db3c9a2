//! Multi-frame signals.
//!
//! A signal holds `B` frames of `n_x × n_y` pixels. Storage is pixel-major,
//! frame-minor: the value of frame `i` at pixel `j` lives at `j * B + i`,
//! and pixel `j` is the raster index `y * n_x + x`. This is the same order
//! used by the on-disk containers, so loads and saves are plain copies.

use crate::error::{Result, ScsError};

#[derive(Debug, Clone, PartialEq)]
pub struct MultiFrameSignal {
    nx: usize,
    ny: usize,
    frames: usize,
    data: Vec<f64>,
    normalized: bool,
}

impl MultiFrameSignal {
    pub fn new(nx: usize, ny: usize, frames: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(nx, ny, frames)?;
        if data.len() != nx * ny * frames {
            return Err(ScsError::InvalidShape(format!(
                "expected {} values for {nx}x{ny}x{frames}, got {}",
                nx * ny * frames,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(ScsError::InvalidArgument(format!(
                "non-finite signal entry at flat index {pos}"
            )));
        }
        Ok(MultiFrameSignal {
            nx,
            ny,
            frames,
            data,
            normalized: false,
        })
    }

    pub fn zeros(nx: usize, ny: usize, frames: usize) -> Self {
        MultiFrameSignal {
            nx,
            ny,
            frames,
            data: vec![0.0; nx * ny * frames],
            normalized: false,
        }
    }

    pub fn constant(nx: usize, ny: usize, frames: usize, value: f64) -> Self {
        MultiFrameSignal {
            nx,
            ny,
            frames,
            data: vec![value; nx * ny * frames],
            normalized: false,
        }
    }

    /// Builds a signal from `f(x, y, frame)`.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        frames: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(nx * ny * frames);
        for y in 0..ny {
            for x in 0..nx {
                for i in 0..frames {
                    data.push(f(x, y, i));
                }
            }
        }
        Self::new(nx, ny, frames, data)
    }

    /// Builds a signal from per-frame raster images.
    pub fn from_frames(nx: usize, ny: usize, frames: &[Vec<f64>]) -> Result<Self> {
        let b = frames.len();
        for (i, f) in frames.iter().enumerate() {
            if f.len() != nx * ny {
                return Err(ScsError::InvalidShape(format!(
                    "frame {i} has {} pixels, expected {}",
                    f.len(),
                    nx * ny
                )));
            }
        }
        let mut data = vec![0.0; nx * ny * b];
        for (i, f) in frames.iter().enumerate() {
            for (j, v) in f.iter().enumerate() {
                data[j * b + i] = *v;
            }
        }
        Self::new(nx, ny, b, data)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    /// Number of pixels per frame, `n`.
    pub fn pixels(&self) -> usize {
        self.nx * self.ny
    }

    /// Total number of entries, `nB`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.frames)
    }

    pub fn same_shape(&self, other: &MultiFrameSignal) -> bool {
        self.shape() == other.shape()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, frame: usize) -> usize {
        (y * self.nx + x) * self.frames + frame
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, frame: usize) -> f64 {
        self.data[self.index(x, y, frame)]
    }

    /// Raster copy of one frame.
    pub fn frame(&self, frame: usize) -> Vec<f64> {
        self.data
            .iter()
            .skip(frame)
            .step_by(self.frames)
            .copied()
            .collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Flags the signal as normalized to `[0, 1]`; fails if any entry is outside.
    pub fn into_normalized(mut self) -> Result<Self> {
        if let Some(v) = self.data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(ScsError::InvalidArgument(format!(
                "value {v} outside [0,1] cannot be flagged normalized"
            )));
        }
        self.normalized = true;
        Ok(self)
    }

    pub(crate) fn set_normalized_unchecked(&mut self, normalized: bool) {
        self.normalized = normalized;
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dot(&self, other: &MultiFrameSignal) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// `‖self − other‖₂`.
    pub fn distance(&self, other: &MultiFrameSignal) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Per-entry squared distortion `(1/nB)‖self − other‖²`.
    pub fn distortion(&self, other: &MultiFrameSignal) -> f64 {
        let d = self.distance(other);
        d * d / self.len() as f64
    }

    /// Normalized error `(1/√(nB))‖self − other‖₂`.
    pub fn normalized_error(&self, other: &MultiFrameSignal) -> f64 {
        self.distance(other) / (self.len() as f64).sqrt()
    }

    /// `self + scale · other`, elementwise.
    pub fn add_scaled(&self, scale: f64, other: &MultiFrameSignal) -> MultiFrameSignal {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + scale * b)
            .collect();
        MultiFrameSignal {
            nx: self.nx,
            ny: self.ny,
            frames: self.frames,
            data,
            normalized: false,
        }
    }

    pub fn scaled(&self, scale: f64) -> MultiFrameSignal {
        self.map(|v| v * scale)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> MultiFrameSignal {
        MultiFrameSignal {
            nx: self.nx,
            ny: self.ny,
            frames: self.frames,
            data: self.data.iter().map(|v| f(*v)).collect(),
            normalized: false,
        }
    }
}

pub(crate) fn check_dims(nx: usize, ny: usize, frames: usize) -> Result<()> {
    if nx == 0 || ny == 0 || frames == 0 {
        return Err(ScsError::InvalidShape(format!(
            "dimensions must be positive, got {nx}x{ny}x{frames}"
        )));
    }
    Ok(())
}
