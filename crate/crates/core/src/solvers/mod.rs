//! Recovery algorithms.
//!
//! * [`csp_recover`]: exhaustive minimum-residual search over an
//!   enumerable codebook, the brute-force reference for everything else.
//! * [`cbpgd_recover`]: projected gradient descent where the projection is
//!   a compression code: `sᵗ⁺¹ = xᵗ + μHᵀ(y − Hxᵗ)`, `xᵗ⁺¹ = g(f(sᵗ⁺¹))`.
//! * [`cbgap_recover`]: the same loop with the `(HHᵀ)⁻¹`-preconditioned
//!   step `sᵗ⁺¹ = xᵗ + μHᵀR⁻¹(y − Hxᵗ)`.
//! * [`adaptive_step_search`]: per-iteration choice of `μ` minimizing the
//!   post-projection measurement residual.

mod csp;
mod iterative;
mod metrics;
mod step_search;
mod trace;

pub use csp::csp_recover;
pub use iterative::{cbgap_recover, cbpgd_recover, SolverOutput};
pub use metrics::{compute_metrics, Metrics};
pub use step_search::{adaptive_step_search, StepSearch, COARSE_GRID_POINTS};
pub use trace::{write_trace_csv, IterationRecord, IterationTrace, TRACE_CSV_HEADER};

use crate::error::{Result, ScsError};
use crate::sensing::DEFAULT_CLAMP_EPS;
use crate::signal::MultiFrameSignal;

pub const DEFAULT_MAX_ITERS: usize = 150;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    Fixed,
    /// Line search over `μ` at every iteration.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitMode {
    /// `x⁰ = 0`.
    Zero,
    /// `x⁰ = HᵀR⁻¹y`, the least-norm measurement-consistent signal.
    Backprojection,
    /// Caller-supplied starting point.
    Signal(MultiFrameSignal),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub step_mu: f64,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub step_mode: StepMode,
    /// `R_j` below this is treated as zero by the GAP step.
    pub clamp_eps: f64,
    pub init_mode: InitMode,
    /// Search bracket for adaptive steps; defaults to `(0, 2μ)`.
    pub bracket: Option<(f64, f64)>,
    /// Record wall-clock time per iteration. Off gives byte-reproducible traces.
    pub record_wall_time: bool,
}

impl SolverConfig {
    fn with_mu(step_mu: f64) -> Self {
        SolverConfig {
            step_mu,
            max_iters: DEFAULT_MAX_ITERS,
            residual_tol: DEFAULT_RESIDUAL_TOL,
            step_mode: StepMode::Fixed,
            clamp_eps: DEFAULT_CLAMP_EPS,
            init_mode: InitMode::Zero,
            bracket: None,
            record_wall_time: true,
        }
    }

    /// Fixed step `μ = 2/B`.
    pub fn pgd_default(frames: usize) -> Self {
        Self::with_mu(2.0 / frames.max(1) as f64)
    }

    /// Fixed step `μ = 2`.
    pub fn gap_default() -> Self {
        Self::with_mu(2.0)
    }

    /// `μ = 1`, the step for which the PGD contraction guarantee is stated.
    pub fn pgd_theory() -> Self {
        Self::with_mu(1.0)
    }

    /// `μ = B`, the step for which the GAP contraction guarantee is stated.
    pub fn gap_theory(frames: usize) -> Self {
        Self::with_mu(frames.max(1) as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_mu > 0.0) || !self.step_mu.is_finite() {
            return Err(ScsError::InvalidParameter(format!(
                "step_mu must be positive, got {}",
                self.step_mu
            )));
        }
        if self.max_iters == 0 {
            return Err(ScsError::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !(self.residual_tol >= 0.0) {
            return Err(ScsError::InvalidParameter(format!(
                "residual_tol must be non-negative, got {}",
                self.residual_tol
            )));
        }
        if !(self.clamp_eps > 0.0) {
            return Err(ScsError::InvalidParameter(format!(
                "clamp_eps must be positive, got {}",
                self.clamp_eps
            )));
        }
        let (lo, hi) = self.search_bracket();
        if !(lo < hi) || !(lo <= self.step_mu && self.step_mu <= hi) {
            return Err(ScsError::InvalidParameter(format!(
                "step bracket ({lo}, {hi}) must be non-empty and contain step_mu {}",
                self.step_mu
            )));
        }
        Ok(())
    }

    pub fn search_bracket(&self) -> (f64, f64) {
        self.bracket.unwrap_or((0.0, 2.0 * self.step_mu))
    }
}
