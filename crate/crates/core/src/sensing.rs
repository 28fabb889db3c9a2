//! The snapshot sensing operator `H = [D₁, …, D_B]`.
//!
//! Each `Dᵢ` is diagonal, so the operator is stored as its `n·B` diagonal
//! entries in the same pixel-major, frame-minor order as
//! [`MultiFrameSignal`]. `HHᵀ` is then diagonal as well, with entries
//! `R_j = Σᵢ D²_{ij}` kept alongside the masks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, ScsError};
use crate::rng::RngSpec;
use crate::signal::{check_dims, MultiFrameSignal};

/// Default threshold below which `R_j` is treated as zero.
pub const DEFAULT_CLAMP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaskDistribution {
    /// i.i.d. `N(0, 1)` entries.
    Gaussian,
    /// i.i.d. `{0, 1}` entries with `p = 0.5`.
    Bernoulli01,
}

impl MaskDistribution {
    pub fn tag(self) -> u8 {
        match self {
            MaskDistribution::Gaussian => 0,
            MaskDistribution::Bernoulli01 => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(MaskDistribution::Gaussian),
            1 => Some(MaskDistribution::Bernoulli01),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MaskDistribution::Gaussian => "gaussian",
            MaskDistribution::Bernoulli01 => "bernoulli01",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskStack {
    nx: usize,
    ny: usize,
    frames: usize,
    diag: Vec<f64>,
    gram_diag: Vec<f64>,
    distribution: MaskDistribution,
}

impl MaskStack {
    /// Wraps explicit diagonal entries (pixel-major, frame-minor).
    pub fn from_diag(
        nx: usize,
        ny: usize,
        frames: usize,
        diag: Vec<f64>,
        distribution: MaskDistribution,
    ) -> Result<Self> {
        check_dims(nx, ny, frames)?;
        if diag.len() != nx * ny * frames {
            return Err(ScsError::InvalidShape(format!(
                "mask needs {} entries, got {}",
                nx * ny * frames,
                diag.len()
            )));
        }
        if diag.iter().any(|v| !v.is_finite()) {
            return Err(ScsError::InvalidArgument("non-finite mask entry".into()));
        }
        let gram_diag = diag
            .chunks_exact(frames)
            .map(|d| d.iter().map(|v| v * v).sum())
            .collect();
        Ok(MaskStack {
            nx,
            ny,
            frames,
            diag,
            gram_diag,
            distribution,
        })
    }

    /// Masks from per-frame raster images, e.g. `D₁ = diag(1,2,3)`.
    pub fn from_frames(
        nx: usize,
        ny: usize,
        frames: &[Vec<f64>],
        distribution: MaskDistribution,
    ) -> Result<Self> {
        let s = MultiFrameSignal::from_frames(nx, ny, frames)?;
        Self::from_diag(nx, ny, frames.len(), s.into_data(), distribution)
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

    pub fn pixels(&self) -> usize {
        self.nx * self.ny
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.frames)
    }

    /// Diagonal entries, `diag[j * B + i] = D_{ij}`.
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// `R_j = Σᵢ D²_{ij}`, one entry per pixel.
    pub fn gram_diag(&self) -> &[f64] {
        &self.gram_diag
    }

    pub fn distribution(&self) -> MaskDistribution {
        self.distribution
    }

    fn check_signal(&self, x: &MultiFrameSignal) -> Result<()> {
        if x.shape() != self.shape() {
            return Err(ScsError::InvalidShape(format!(
                "signal {:?} does not match masks {:?}",
                x.shape(),
                self.shape()
            )));
        }
        Ok(())
    }

    fn check_measurement(&self, y: &Measurement) -> Result<()> {
        if (y.nx, y.ny) != (self.nx, self.ny) {
            return Err(ScsError::InvalidShape(format!(
                "measurement {}x{} does not match masks {}x{}",
                y.nx, y.ny, self.nx, self.ny
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
    noise_sigma: f64,
}

impl Measurement {
    pub fn new(nx: usize, ny: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(nx, ny, 1)?;
        if data.len() != nx * ny {
            return Err(ScsError::InvalidShape(format!(
                "measurement needs {} entries, got {}",
                nx * ny,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(ScsError::InvalidArgument(
                "non-finite measurement entry".into(),
            ));
        }
        Ok(Measurement {
            nx,
            ny,
            data,
            noise_sigma: 0.0,
        })
    }

    pub fn zeros(nx: usize, ny: usize) -> Self {
        Measurement {
            nx,
            ny,
            data: vec![0.0; nx * ny],
            noise_sigma: 0.0,
        }
    }

    pub fn with_noise_sigma(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Measurement) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// `self − other` as a noise-free residual.
    pub fn sub(&self, other: &Measurement) -> Measurement {
        Measurement {
            nx: self.nx,
            ny: self.ny,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
            noise_sigma: 0.0,
        }
    }

    /// `‖self − other‖₂`.
    pub fn distance(&self, other: &Measurement) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Draws `D_{ij}` i.i.d. from `distribution`.
pub fn generate_masks(
    shape: (usize, usize, usize),
    distribution: MaskDistribution,
    rng: RngSpec,
) -> Result<MaskStack> {
    let (nx, ny, frames) = shape;
    check_dims(nx, ny, frames)?;
    let mut rng = rng.rng();
    let len = nx * ny * frames;
    let diag: Vec<f64> = match distribution {
        MaskDistribution::Gaussian => (0..len).map(|_| rng.sample(StandardNormal)).collect(),
        MaskDistribution::Bernoulli01 => (0..len)
            .map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 })
            .collect(),
    };
    MaskStack::from_diag(nx, ny, frames, diag, distribution)
}

/// `y[j] = Σᵢ D_{ij} x_{ij}`.
pub fn forward(masks: &MaskStack, x: &MultiFrameSignal) -> Result<Measurement> {
    masks.check_signal(x)?;
    let b = masks.frames;
    let data = masks
        .diag
        .chunks_exact(b)
        .zip(x.data().chunks_exact(b))
        .map(|(d, v)| d.iter().zip(v).map(|(d, v)| d * v).sum())
        .collect();
    Ok(Measurement {
        nx: masks.nx,
        ny: masks.ny,
        data,
        noise_sigma: 0.0,
    })
}

/// `(Hᵀe)[j, i] = D_{ij} e[j]`.
pub fn adjoint(masks: &MaskStack, e: &Measurement) -> Result<MultiFrameSignal> {
    masks.check_measurement(e)?;
    let b = masks.frames;
    let mut out = Vec::with_capacity(masks.diag.len());
    for (d, ej) in masks.diag.chunks_exact(b).zip(&e.data) {
        out.extend(d.iter().map(|d| d * ej));
    }
    MultiFrameSignal::new(masks.nx, masks.ny, b, out)
}

/// `R⁻¹e` computed elementwise, with `R_j < clamp_eps` mapped to zero.
///
/// Returns the result together with the number of clamped pixels.
pub fn gram_apply_inverse(
    masks: &MaskStack,
    e: &Measurement,
    clamp_eps: f64,
) -> Result<(Measurement, usize)> {
    if !(clamp_eps > 0.0) {
        return Err(ScsError::InvalidParameter(format!(
            "clamp_eps must be positive, got {clamp_eps}"
        )));
    }
    masks.check_measurement(e)?;
    let mut clamped = 0;
    let data = masks
        .gram_diag
        .iter()
        .zip(&e.data)
        .map(|(r, v)| {
            if *r >= clamp_eps {
                v / r
            } else {
                clamped += 1;
                0.0
            }
        })
        .collect();
    Ok((
        Measurement {
            nx: e.nx,
            ny: e.ny,
            data,
            noise_sigma: 0.0,
        },
        clamped,
    ))
}

/// `y + z` with `z` i.i.d. `N(0, σ²)`.
pub fn add_noise(y: &Measurement, sigma: f64, rng: RngSpec) -> Result<Measurement> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(ScsError::InvalidParameter(format!(
            "noise sigma must be a finite non-negative number, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(y.clone().with_noise_sigma(0.0));
    }
    let mut rng = rng.rng();
    let data = y
        .data
        .iter()
        .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(Measurement {
        nx: y.nx,
        ny: y.ny,
        data,
        noise_sigma: sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_masks() -> MaskStack {
        MaskStack::from_frames(
            3,
            1,
            &[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]],
            MaskDistribution::Gaussian,
        )
        .unwrap()
    }

    #[test]
    fn forward_small_instance() {
        let m = small_masks();
        let x = MultiFrameSignal::from_frames(3, 1, &[vec![1.0, 1.0, 1.0], vec![1.0, 0.0, 1.0]]).unwrap();
        assert_eq!(forward(&m, &x).unwrap().data(), &[5.0, 2.0, 9.0]);
        let z = MultiFrameSignal::zeros(3, 1, 2);
        assert_eq!(forward(&m, &z).unwrap().data(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn adjoint_small_instance() {
        let m = small_masks();
        let e = Measurement::new(3, 1, vec![1.0; 3]).unwrap();
        let out = adjoint(&m, &e).unwrap();
        assert_eq!(out.frame(0), vec![1.0, 2.0, 3.0]);
        assert_eq!(out.frame(1), vec![4.0, 5.0, 6.0]);
        let zero = adjoint(&m, &Measurement::zeros(3, 1)).unwrap();
        assert!(zero.data().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gram_inverse_small_instance() {
        let m = small_masks();
        assert_eq!(m.gram_diag(), &[17.0, 29.0, 45.0]);
        let e = Measurement::new(3, 1, vec![17.0, 29.0, 45.0]).unwrap();
        let (out, clamped) = gram_apply_inverse(&m, &e, DEFAULT_CLAMP_EPS).unwrap();
        assert_eq!(out.data(), &[1.0, 1.0, 1.0]);
        assert_eq!(clamped, 0);
    }

    #[test]
    fn gram_inverse_clamps_dead_pixels() {
        let m = MaskStack::from_frames(2, 1, &[vec![0.0, 1.0], vec![0.0, 1.0]], MaskDistribution::Bernoulli01).unwrap();
        let e = Measurement::new(2, 1, vec![3.5, 4.0]).unwrap();
        let (out, clamped) = gram_apply_inverse(&m, &e, DEFAULT_CLAMP_EPS).unwrap();
        assert_eq!(out.data(), &[0.0, 2.0]);
        assert_eq!(clamped, 1);
        assert!(gram_apply_inverse(&m, &e, 0.0).is_err());
    }

    #[test]
    fn masks_are_deterministic() {
        let a = generate_masks((1, 1, 1), MaskDistribution::Gaussian, RngSpec::new(5, 1)).unwrap();
        let b = generate_masks((1, 1, 1), MaskDistribution::Gaussian, RngSpec::new(5, 1)).unwrap();
        assert_eq!(a.diag(), b.diag());
        let bern = generate_masks((2, 2, 3), MaskDistribution::Bernoulli01, RngSpec::new(5, 1)).unwrap();
        assert!(bern.diag().iter().all(|v| *v == 0.0 || *v == 1.0));
        assert!(generate_masks((0, 2, 3), MaskDistribution::Gaussian, RngSpec::new(5, 1)).is_err());
    }

    #[test]
    fn noise_contract() {
        let y = Measurement::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(add_noise(&y, 0.0, RngSpec::new(1, 2)).unwrap().data(), y.data());
        assert!(add_noise(&y, -1.0, RngSpec::new(1, 2)).is_err());
        let a = add_noise(&y, 0.3, RngSpec::new(1, 2)).unwrap();
        let b = add_noise(&y, 0.3, RngSpec::new(1, 2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.noise_sigma(), 0.3);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let m = small_masks();
        assert!(forward(&m, &MultiFrameSignal::zeros(3, 1, 3)).is_err());
        assert!(adjoint(&m, &Measurement::zeros(2, 1)).is_err());
    }
}
