//! Default configurations of the `verify` experiments.

use super::ExperimentName;
use crate::bounds::{
    corollary_b_sweep, product_tail, run_contraction_experiment, run_noisy_csp_experiment,
    simulate_bernstein_tail, simulate_csp_events, simulate_csp_recovery, verify_psi2_gaussian,
    ContractionExperimentSpec, CorollaryBSpec, NoisyCspSpec, SolverKind, TailBoundReport, TailExperimentSpec,
    K_SUBEXP,
};
use crate::codecs::{random_grid_codebook, EnumerableCodebook};
use crate::error::{Result, ScsError};
use crate::rng::{streams, RngSpec};
use crate::sensing::MaskDistribution;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRequest {
    pub experiment: ExperimentName,
    /// `None` picks the experiment's default.
    pub trials: Option<usize>,
    pub seed: u64,
    pub solver: SolverKind,
    /// Empty picks the experiment's default.
    pub sigmas: Vec<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub report: TailBoundReport,
    /// Human-readable result lines.
    pub summary: Vec<String>,
    pub pass: bool,
}

pub const PSI2_TOL: f64 = 1e-6;
pub const PSI2_CHECK_TOL: f64 = 1e-9;

/// 64 codewords of `4 × 3 × 2` entries on a 4-level grid over `[−1, 1]`.
fn desk_codebook(seed: u64) -> Result<EnumerableCodebook> {
    random_grid_codebook((4, 3, 2), 64, 4, 2.0, RngSpec::new(seed, streams::CODEBOOK))
}

pub fn run_verify(req: &VerifyRequest) -> Result<VerifyOutcome> {
    let trials = |default: usize| req.trials.unwrap_or(default);
    let rng = RngSpec::new(req.seed, 0);
    let mut summary = Vec::new();
    let mut extra_ok = true;
    let report = match req.experiment {
        ExperimentName::Psi2 => {
            let c = verify_psi2_gaussian(1.0)?;
            let expect = K_SUBEXP.sqrt();
            extra_ok = (c.psi2 - expect).abs() <= PSI2_TOL && (c.check_at_bound - 2.0).abs() <= PSI2_CHECK_TOL;
            summary.push(format!("psi2={:.6} expected={expect:.6} check_at_bound={:.9}", c.psi2, c.check_at_bound));
            product_tail(1.0, 1.0, &[0.5, 1.0, 2.0, 4.0, 8.0], trials(100_000), rng)?
        }
        ExperimentName::Bernstein => {
            let spec = TailExperimentSpec::uniform(req.n, trials(100_000), TailExperimentSpec::default_grid(req.n), rng);
            simulate_bernstein_tail(&spec)?
        }
        ExperimentName::CspEvents => {
            let cb = desk_codebook(req.seed)?;
            let x = cb.codewords()[0].clone();
            let eps = [0.5, 1.0, 2.0, 4.0, 2.0 * K_SUBEXP];
            let mut report = simulate_csp_events(&cb, &x, MaskDistribution::Gaussian, &eps, trials(2_000), rng)?;
            let rec = simulate_csp_recovery(&cb, trials(2_000), rng.stream(1))?;
            summary.push(format!(
                "exact_recovery={:.4} min_gap={:.4} epsilon={:.4} failure_bound={:.4}",
                rec.exact_rate(),
                rec.min_distortion_gap,
                rec.epsilon,
                rec.failure_bound
            ));
            report.extend(rec.report);
            report
        }
        ExperimentName::CspNoisy => {
            let cb = desk_codebook(req.seed)?;
            let sigmas = if req.sigmas.is_empty() { vec![0.01, 0.1] } else { req.sigmas.clone() };
            let mut report = TailBoundReport::default();
            for (i, &sigma_z) in sigmas.iter().enumerate() {
                let spec = NoisyCspSpec {
                    sigma_z,
                    delta: 1e-3,
                    epsilons: vec![0.5, 1.0, 2.0, 3.0],
                    trials: trials(1_000),
                    distribution: MaskDistribution::Gaussian,
                    rng: rng.stream(i as u64),
                };
                let r = run_noisy_csp_experiment(&cb, &spec)?;
                summary.push(format!("sigma_z={sigma_z} pass={}", r.all_pass()));
                report.extend(r);
            }
            report
        }
        ExperimentName::Contraction => {
            let sigmas = if req.sigmas.is_empty() { vec![0.0] } else { req.sigmas.clone() };
            let mut report = TailBoundReport::default();
            for &sigma in &sigmas {
                let mut spec = ContractionExperimentSpec::desk(req.solver, rng);
                spec.noise_sigma = sigma;
                if let Some(t) = req.trials {
                    spec.trials = t;
                }
                let r = run_contraction_experiment(&spec)?;
                summary.push(format!(
                    "solver={} sigma={sigma} tested={} violation_rate={:.4} cumulative_failure_rate={:.4}",
                    req.solver.name(),
                    r.tested_iterations,
                    r.violation_rate,
                    r.cumulative_failure_rate
                ));
                report.extend(r.report);
            }
            report
        }
        ExperimentName::CorollaryB => {
            let spec = CorollaryBSpec {
                rate: 0.5,
                deltas: vec![2f64.powi(-4), 2f64.powi(-8), 2f64.powi(-12)],
                eta: 4.0,
                rho: 2.0,
                n: 4,
                trials: trials(500),
                rng,
            };
            let (points, report) = corollary_b_sweep(&spec)?;
            for p in points {
                summary.push(format!(
                    "delta={} frames={} codebook={} error_bound={:.4} exceed_freq={:.4} mean_distortion={:.4}",
                    p.delta,
                    p.frames.map_or("none".to_string(), |b| b.to_string()),
                    p.codebook_size,
                    p.error_bound,
                    p.exceed_freq,
                    p.mean_distortion
                ));
            }
            report
        }
    };
    if report.records.is_empty() {
        return Err(ScsError::InvalidParameter("experiment produced no grid points".into()));
    }
    let pass = extra_ok && report.all_pass();
    Ok(VerifyOutcome { report, summary, pass })
}
