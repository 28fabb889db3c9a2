use std::time::Instant;

use super::step_search::{objective_at, search_along};
use super::trace::{IterationRecord, IterationTrace};
use super::{InitMode, SolverConfig, StepMode};
use crate::codecs::Codec;
use crate::error::{Result, ScsError};
use crate::sensing::{adjoint, forward, gram_apply_inverse, MaskStack, Measurement};
use crate::signal::MultiFrameSignal;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutput {
    pub xhat: MultiFrameSignal,
    pub trace: IterationTrace,
    /// `‖y − Hx̂‖₂` for the returned estimate.
    pub final_residual: f64,
    /// `(1/√(nB))‖x̂ − x̃‖₂`, when a reference was supplied.
    pub final_error: Option<f64>,
}

impl SolverOutput {
    /// `e₀, e₁, …` including the returned estimate.
    pub fn error_sequence(&self) -> Option<Vec<f64>> {
        let mut v = self.trace.errors()?;
        v.push(self.final_error?);
        Some(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Gradient,
    Preconditioned,
}

/// Compression-based projected gradient descent.
///
/// `reference`, typically the projection `x̃` of the true signal, only feeds
/// the `error_to_reference` column of the trace.
pub fn cbpgd_recover<C: Codec + ?Sized>(
    codec: &C,
    masks: &MaskStack,
    y: &Measurement,
    config: &SolverConfig,
    reference: Option<&MultiFrameSignal>,
) -> Result<SolverOutput> {
    run(codec, masks, y, config, reference, Step::Gradient)
}

/// Compression-based generalized alternating projection.
pub fn cbgap_recover<C: Codec + ?Sized>(
    codec: &C,
    masks: &MaskStack,
    y: &Measurement,
    config: &SolverConfig,
    reference: Option<&MultiFrameSignal>,
) -> Result<SolverOutput> {
    run(codec, masks, y, config, reference, Step::Preconditioned)
}

fn initial_point(
    masks: &MaskStack,
    y: &Measurement,
    config: &SolverConfig,
) -> Result<MultiFrameSignal> {
    let (nx, ny, b) = masks.shape();
    match &config.init_mode {
        InitMode::Zero => Ok(MultiFrameSignal::zeros(nx, ny, b)),
        InitMode::Backprojection => {
            let (w, _) = gram_apply_inverse(masks, y, config.clamp_eps)?;
            adjoint(masks, &w)
        }
        InitMode::Signal(s) => {
            if s.shape() != (nx, ny, b) {
                return Err(ScsError::InvalidShape(format!(
                    "initial point {:?} vs masks {:?}",
                    s.shape(),
                    masks.shape()
                )));
            }
            Ok(s.clone())
        }
    }
}

fn run<C: Codec + ?Sized>(
    codec: &C,
    masks: &MaskStack,
    y: &Measurement,
    config: &SolverConfig,
    reference: Option<&MultiFrameSignal>,
    step: Step,
) -> Result<SolverOutput> {
    config.validate()?;
    if (y.nx(), y.ny()) != (masks.nx(), masks.ny()) {
        return Err(ScsError::InvalidShape(format!(
            "measurement {}x{} vs masks {}x{}",
            y.nx(),
            y.ny(),
            masks.nx(),
            masks.ny()
        )));
    }
    if let Some(r) = reference {
        if r.shape() != masks.shape() {
            return Err(ScsError::InvalidShape(format!(
                "reference {:?} vs masks {:?}",
                r.shape(),
                masks.shape()
            )));
        }
    }
    let start = Instant::now();
    let elapsed = || {
        if config.record_wall_time {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        }
    };
    let err_of = |x: &MultiFrameSignal| reference.map(|r| x.normalized_error(r));

    let mut x = initial_point(masks, y, config)?;
    let mut trace = IterationTrace::default();
    for t in 0..config.max_iters {
        let residual = y.sub(&forward(masks, &x)?);
        let rnorm = residual.norm2();
        if !rnorm.is_finite() {
            return Err(ScsError::Search(format!("residual diverged at iteration {t}")));
        }
        let mut record = IterationRecord {
            iter: t,
            residual_norm: rnorm,
            error_to_reference: err_of(&x),
            chosen_mu: 0.0,
            wall_time: 0.0,
        };
        // The backprojection fits y by construction but is not yet a
        // codec output, so it never ends the run on its own.
        let consistent_start = t == 0 && matches!(config.init_mode, InitMode::Backprojection);
        if rnorm <= config.residual_tol && !consistent_start {
            record.wall_time = elapsed();
            trace.records.push(record);
            break;
        }
        let dir = match step {
            Step::Gradient => adjoint(masks, &residual)?,
            Step::Preconditioned => {
                let (w, clamped) = gram_apply_inverse(masks, &residual, config.clamp_eps)?;
                trace.clamped_pixels = trace.clamped_pixels.max(clamped);
                adjoint(masks, &w)?
            }
        };
        let mu = match config.step_mode {
            StepMode::Fixed => config.step_mu,
            StepMode::Adaptive => {
                let found = search_along(codec, masks, y, &x, &dir, config.search_bracket(), t)?;
                let fixed = objective_at(codec, masks, y, &x, &dir, config.step_mu, t)?;
                if fixed < found.objective {
                    config.step_mu
                } else {
                    found.mu
                }
            }
        };
        x = codec.project_at(&x.add_scaled(mu, &dir), t)?;
        record.chosen_mu = mu;
        record.wall_time = elapsed();
        trace.records.push(record);
    }
    let final_residual = forward(masks, &x)?.distance(y);
    Ok(SolverOutput {
        final_error: err_of(&x),
        xhat: x,
        trace,
        final_residual,
    })
}
