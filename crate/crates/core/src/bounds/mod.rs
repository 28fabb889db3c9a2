//! Monte Carlo checks of the concentration and convergence guarantees.
//!
//! Every experiment produces a [`TailBoundReport`]: per grid point, an
//! empirical frequency, its Monte Carlo standard error and the theoretical
//! bound it must not exceed. All bounds use the sub-exponential constant
//! [`K_SUBEXP`] and live in [`formulas`].

mod bernstein;
mod contraction;
mod csp_events;
pub mod formulas;
mod noise;
mod psi;

pub use bernstein::{simulate_bernstein_tail, TailExperimentSpec};
pub use contraction::{
    run_contraction_experiment, ContractionExperimentSpec, ContractionInit, ContractionReport,
    SolverKind,
};
pub use csp_events::{
    corollary_b_sweep, csp_expectation_check, run_noisy_csp_experiment, simulate_csp_events,
    simulate_csp_recovery, CorollaryBPoint, CorollaryBSpec, CspRecoveryStats, NoisyCspSpec,
};
pub use noise::{noise_scaling_experiment, NoiseScalingReport, NoiseScalingSpec};
pub use psi::{product_tail, verify_psi2_gaussian, Psi2Check};

use std::io::Write;

use rayon::prelude::*;

use crate::error::Result;

/// `‖Z²‖_ψ1 ≤ ‖Z‖²_ψ2 ≤ 8/3` for a standard normal `Z`.
pub const K_SUBEXP: f64 = 8.0 / 3.0;

/// Slack, in standard errors, granted to Monte Carlo estimates.
pub const MC_SIGMAS: f64 = 3.0;

/// `√(p(1 − p)/trials)`.
pub fn mc_stderr(p: f64, trials: usize) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / trials as f64).max(0.0).sqrt()
}

/// `empirical ≤ bound + 3·stderr`.
pub fn within_bound(empirical: f64, stderr: f64, bound: f64) -> bool {
    empirical <= bound + MC_SIGMAS * stderr
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailRecord {
    pub experiment: String,
    pub params: serde_json::Value,
    pub threshold: f64,
    pub empirical_freq: f64,
    pub mc_stderr: f64,
    pub theoretical_bound: f64,
    pub pass: bool,
}

impl TailRecord {
    /// A record whose pass flag is the 3-sigma validity check.
    pub fn validity(
        experiment: &str,
        params: serde_json::Value,
        threshold: f64,
        hits: usize,
        trials: usize,
        theoretical_bound: f64,
    ) -> Self {
        let p = hits as f64 / trials.max(1) as f64;
        let se = mc_stderr(p, trials);
        TailRecord {
            experiment: experiment.to_string(),
            params,
            threshold,
            empirical_freq: p,
            mc_stderr: se,
            theoretical_bound,
            pass: within_bound(p, se, theoretical_bound),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TailBoundReport {
    pub records: Vec<TailRecord>,
}

pub const REPORT_CSV_HEADER: &str =
    "experiment,param_json,threshold,empirical_freq,mc_stderr,theoretical_bound,pass";

impl TailBoundReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn extend(&mut self, other: TailBoundReport) {
        self.records.extend(other.records);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{REPORT_CSV_HEADER}")?;
        for r in &self.records {
            let json = r.params.to_string().replace('"', "\"\"");
            writeln!(
                w,
                "{},\"{}\",{},{},{},{},{}",
                r.experiment,
                json,
                r.threshold,
                r.empirical_freq,
                r.mc_stderr,
                r.theoretical_bound,
                r.pass
            )?;
        }
        Ok(())
    }
}

/// Runs `f(0..trials)` on the current rayon pool and returns results in
/// trial order, so downstream reductions do not depend on scheduling.
pub(crate) fn run_trials<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(f).collect()
}
