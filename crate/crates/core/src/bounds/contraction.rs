use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::csp_events::perturbed_member;
use super::formulas::{
    contraction_eps_failure, contraction_min_epsilon, unrolled_error_bound, pgd_step_failure,
    noisy_pgd_step_failure, noisy_recursion_term, gap_step_failure,
};
use super::{mc_stderr, run_trials, within_bound, TailBoundReport, TailRecord, K_SUBEXP};
use crate::codecs::{random_grid_codebook, Codec, EnumerableCodebook};
use crate::error::{Result, ScsError};
use crate::rng::{streams, RngSpec};
use crate::sensing::{forward, generate_masks, MaskDistribution, Measurement};
use crate::solvers::{cbgap_recover, cbpgd_recover, InitMode, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Projected gradient descent with `μ = 1`.
    Pgd,
    /// Generalized alternating projection with `μ = B`.
    Gap,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Pgd => "pgd",
            SolverKind::Gap => "gap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractionInit {
    Zero,
    /// Start at the projected signal `x̃` itself.
    Reference,
}

/// One Monte Carlo study of the per-iteration contraction
/// `e_{t+1} ≤ 2λe_t + 4√δ` on a random grid codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionExperimentSpec {
    /// Pixels per frame.
    pub n: usize,
    pub frames: usize,
    /// Bits per entry; the codebook has `2^{nBr}` words.
    pub rate: f64,
    pub delta: f64,
    pub rho: f64,
    pub lambda: f64,
    pub trials: usize,
    pub iters: usize,
    pub solver: SolverKind,
    pub init: ContractionInit,
    /// Standard deviation of Gaussian measurement noise; 0 for the
    /// noise-free recursion.
    pub noise_sigma: f64,
    /// Free parameter of the noisy recursion, in `(0, √ρ)`.
    pub eps_z: f64,
    /// Largest tolerated fraction of violating iterations and traces.
    pub max_violation: f64,
    pub rng: RngSpec,
}

impl ContractionExperimentSpec {
    /// `n = 16`, `B = 2`, 256 codewords, `ρ = 2`, `δ = ρ²/64`, `λ = 0.25`.
    pub fn desk(solver: SolverKind, rng: RngSpec) -> Self {
        let rho = 2.0;
        ContractionExperimentSpec {
            n: 16,
            frames: 2,
            rate: 0.25,
            delta: rho * rho / 64.0,
            rho,
            lambda: 0.25,
            trials: 500,
            iters: 30,
            solver,
            init: ContractionInit::Zero,
            noise_sigma: 0.0,
            eps_z: rho.sqrt() / 2.0,
            max_violation: 0.01,
            rng,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ScsError::InvalidParameter(m));
        if self.n == 0 || self.frames == 0 || self.trials == 0 || self.iters == 0 {
            return bad("n, frames, trials and iters must be positive".into());
        }
        if !(self.lambda > 0.0 && self.lambda < 0.5) {
            return bad(format!("lambda must lie in (0, 0.5), got {}", self.lambda));
        }
        if !(self.rho > 0.0) || !(self.rate > 0.0) {
            return bad("rho and rate must be positive".into());
        }
        if !(self.delta > 0.0 && self.delta <= 2.0 * K_SUBEXP * self.rho * self.rho) {
            return bad(format!("delta must lie in (0, 2Kρ²], got {}", self.delta));
        }
        if !(self.noise_sigma >= 0.0) {
            return bad("noise_sigma must be non-negative".into());
        }
        if self.noise_sigma > 0.0 && !(self.eps_z > 0.0 && self.eps_z < self.rho.sqrt()) {
            return bad(format!("eps_z must lie in (0, √ρ), got {}", self.eps_z));
        }
        if !(0.0..=1.0).contains(&self.max_violation) {
            return bad("max_violation must lie in [0, 1]".into());
        }
        Ok(())
    }

    pub fn codebook_size(&self) -> f64 {
        2f64.powf((self.n * self.frames) as f64 * self.rate).round()
    }

    /// Grid levels chosen so a `√δ` perturbation keeps inputs inside `[−ρ/2, ρ/2]`.
    fn levels(&self) -> usize {
        ((self.rho / (2.0 * self.delta.sqrt())).floor() as usize).max(2)
    }

    /// Additive slack of the recursion: `4√δ`, plus `2ε_zσ/√B` with noise.
    pub fn additive_term(&self) -> f64 {
        let mut a = 4.0 * self.delta.sqrt();
        if self.noise_sigma > 0.0 {
            a += noisy_recursion_term(self.eps_z, self.noise_sigma, self.frames);
        }
        a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub tested_iterations: usize,
    pub violations: usize,
    pub violation_rate: f64,
    /// No iteration started outside the `√δ` ball.
    pub degenerate: bool,
    pub cumulative_failures: usize,
    pub cumulative_failure_rate: f64,
    /// Per trial, `e₀, e₁, …` against the projected input.
    pub error_traces: Vec<Vec<f64>>,
    pub codebook_size: usize,
    /// The `ε` that places `B` inside the small-`B` regime.
    pub contraction_epsilon: f64,
    pub report: TailBoundReport,
}

struct TrialOutcome {
    tested: usize,
    violated: usize,
    cumulative_ok: bool,
    errors: Vec<f64>,
}

/// Slack absorbing floating-point rounding in the inequality checks.
const FP_SLACK: f64 = 1e-12;

fn check_trace(errors: &[f64], spec: &ContractionExperimentSpec) -> (usize, usize, bool) {
    let sqrt_delta = spec.delta.sqrt();
    let add = spec.additive_term();
    let two_l = 2.0 * spec.lambda;
    let mut tested = 0;
    let mut violated = 0;
    for w in errors.windows(2) {
        if w[0] > sqrt_delta {
            tested += 1;
            if w[1] > two_l * w[0] + add + FP_SLACK {
                violated += 1;
            }
        }
    }
    // Unrolled recursion; stops once the trace has entered the ball.
    let e0 = errors[0];
    let noise_tail = (add - 4.0 * sqrt_delta) / (1.0 - two_l);
    let mut cumulative_ok = true;
    for t in 0..errors.len() - 1 {
        if t >= 1 && errors[t] <= sqrt_delta {
            break;
        }
        let bound = unrolled_error_bound(t, e0, spec.lambda, spec.delta) + noise_tail;
        if errors[t + 1] > bound + FP_SLACK {
            cumulative_ok = false;
            break;
        }
    }
    (tested, violated, cumulative_ok)
}

fn run_trial(spec: &ContractionExperimentSpec, codebook: &EnumerableCodebook, t: u64) -> Result<TrialOutcome> {
    let mut r = spec.rng.trial(t).rng();
    let words = codebook.codewords();
    let c = &words[r.random_range(0..words.len())];
    let x = perturbed_member(c, spec.delta, spec.rho, &mut r);
    let reference = codebook.project(&x)?;
    let shape = (spec.n, 1, spec.frames);
    let masks = generate_masks(shape, MaskDistribution::Gaussian, RngSpec::new(r.next_u64(), streams::MASKS))?;
    let clean = forward(&masks, &x)?;
    // Always draw the noise so runs at different σ share masks and noise shape.
    let g: Vec<f64> = (0..spec.n).map(|_| r.sample(StandardNormal)).collect();
    let y = Measurement::new(
        spec.n,
        1,
        clean.data().iter().zip(&g).map(|(v, g)| v + spec.noise_sigma * g).collect(),
    )?;
    let mut cfg = match spec.solver {
        SolverKind::Pgd => SolverConfig::pgd_theory(),
        SolverKind::Gap => SolverConfig::gap_theory(spec.frames),
    };
    cfg.max_iters = spec.iters;
    cfg.residual_tol = 0.0;
    cfg.record_wall_time = false;
    cfg.init_mode = match spec.init {
        ContractionInit::Zero => InitMode::Zero,
        ContractionInit::Reference => InitMode::Signal(reference.clone()),
    };
    let out = match spec.solver {
        SolverKind::Pgd => cbpgd_recover(codebook, &masks, &y, &cfg, Some(&reference))?,
        SolverKind::Gap => cbgap_recover(codebook, &masks, &y, &cfg, Some(&reference))?,
    };
    let errors = out
        .error_sequence()
        .ok_or_else(|| ScsError::Search("solver trace lacks reference errors".into()))?;
    let (tested, violated, cumulative_ok) = check_trace(&errors, spec);
    Ok(TrialOutcome {
        tested,
        violated,
        cumulative_ok,
        errors,
    })
}

/// Runs the chosen solver from seeded random instances and checks the
/// one-step recursion at every iteration that starts outside the `√δ`
/// ball, and the unrolled bound `(2λ)^{t+1}e₀ + 4√δ/(1 − 2λ)` per trace.
///
/// Inputs are codewords perturbed by at most `δ` per entry; masks are
/// fresh Gaussian draws per trial; the codebook is fixed.
pub fn run_contraction_experiment(spec: &ContractionExperimentSpec) -> Result<ContractionReport> {
    spec.validate()?;
    let size = spec.codebook_size();
    if size > crate::codecs::MAX_ENUMERABLE as f64 {
        return Err(ScsError::TooLargeCodebook {
            size,
            limit: crate::codecs::MAX_ENUMERABLE,
        });
    }
    let codebook = random_grid_codebook(
        (spec.n, 1, spec.frames),
        size as usize,
        spec.levels(),
        spec.rho,
        spec.rng.stream(streams::CODEBOOK),
    )?
    .with_distortion_bound(spec.delta);

    let outcomes = run_trials(spec.trials, |t| run_trial(spec, &codebook, t))?;
    let tested: usize = outcomes.iter().map(|o| o.tested).sum();
    let violations: usize = outcomes.iter().map(|o| o.violated).sum();
    let cumulative_failures = outcomes.iter().filter(|o| !o.cumulative_ok).count();
    let violation_rate = if tested == 0 { 0.0 } else { violations as f64 / tested as f64 };
    let cumulative_failure_rate = cumulative_failures as f64 / spec.trials as f64;

    let ln_c = (codebook.len() as f64).ln();
    let step_failure = match (spec.solver, spec.noise_sigma > 0.0) {
        (SolverKind::Pgd, false) => pgd_step_failure(ln_c, spec.n, spec.delta, spec.rho, spec.lambda),
        (SolverKind::Pgd, true) => {
            noisy_pgd_step_failure(ln_c, spec.n, spec.delta, spec.rho, spec.lambda, spec.eps_z)
        }
        (SolverKind::Gap, _) => {
            gap_step_failure(ln_c, spec.n, spec.frames, spec.delta, spec.rho, spec.lambda)
        }
    };
    let eps2 = contraction_min_epsilon(spec.frames, spec.rate, spec.delta, spec.rho, spec.lambda);
    let params = serde_json::json!({
        "solver": spec.solver.name(), "n": spec.n, "B": spec.frames, "rate": spec.rate,
        "codebook_size": codebook.len(), "delta": spec.delta, "rho": spec.rho,
        "lambda": spec.lambda, "trials": spec.trials, "iters": spec.iters,
        "noise_sigma": spec.noise_sigma, "eps_z": spec.eps_z,
        "contraction_epsilon": eps2,
        "contraction_eps_failure": contraction_eps_failure(spec.n, spec.delta, spec.rho, spec.lambda, eps2),
        "max_violation": spec.max_violation, "tested_iterations": tested,
        "degenerate": tested == 0,
    });
    let record = |name: &str, hits: usize, total: usize| {
        let p = if total == 0 { 0.0 } else { hits as f64 / total as f64 };
        let se = mc_stderr(p, total);
        TailRecord {
            experiment: name.to_string(),
            params: params.clone(),
            threshold: spec.additive_term(),
            empirical_freq: p,
            mc_stderr: se,
            theoretical_bound: step_failure,
            pass: p <= spec.max_violation && within_bound(p, se, step_failure),
        }
    };
    let report = TailBoundReport {
        records: vec![
            record("contraction-recursion", violations, tested),
            record("contraction-cumulative", cumulative_failures, spec.trials),
        ],
    };
    Ok(ContractionReport {
        tested_iterations: tested,
        violations,
        violation_rate,
        degenerate: tested == 0,
        cumulative_failures,
        cumulative_failure_rate,
        error_traces: outcomes.into_iter().map(|o| o.errors).collect(),
        codebook_size: codebook.len(),
        contraction_epsilon: eps2,
        report,
    })
}
