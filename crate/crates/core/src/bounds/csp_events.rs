use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::formulas::{
    rate_error_bound, rate_failure, rate_max_frames, csp_failure,
    noisy_csp_error_bound, noisy_csp_failure,
};
use super::{run_trials, TailBoundReport, TailRecord, K_SUBEXP};
use crate::codecs::{random_grid_codebook, EnumerableCodebook};
use crate::error::{Result, ScsError};
use crate::rng::{streams, RngSpec};
use crate::sensing::{forward, generate_masks, MaskDistribution, MaskStack, Measurement};
use crate::signal::MultiFrameSignal;
use crate::solvers::csp_recover;

fn ln_size(cb: &EnumerableCodebook) -> f64 {
    (cb.len() as f64).ln()
}

fn check_eps(eps: f64, max: f64, what: &str) -> Result<()> {
    if !(eps > 0.0 && eps <= max) {
        return Err(ScsError::InvalidParameter(format!(
            "epsilon {eps} outside (0, {max}] required by {what}"
        )));
    }
    Ok(())
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(ScsError::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(())
}

/// `‖H v‖²` without materializing the measurement.
fn sensed_energy(masks: &MaskStack, v: &MultiFrameSignal) -> f64 {
    let b = masks.frames();
    masks
        .diag()
        .chunks_exact(b)
        .zip(v.data().chunks_exact(b))
        .map(|(d, x)| {
            let s: f64 = d.iter().zip(x).map(|(d, x)| d * x).sum();
            s * s
        })
        .sum()
}

/// Frequency with which some codeword's sensed distance leaves the band
/// `‖x − c‖²/n ± Bρ²ε/2`, the failure of the two concentration events
/// behind the noise-free CSP guarantee, against `2^{nBr+1}e^{−ε²n/(16K²)}`.
///
/// The guarantee is stated for Gaussian masks.
pub fn simulate_csp_events(
    codebook: &EnumerableCodebook,
    x: &MultiFrameSignal,
    distribution: MaskDistribution,
    epsilons: &[f64],
    trials: usize,
    rng: RngSpec,
) -> Result<TailBoundReport> {
    check_trials(trials)?;
    if x.shape() != codebook.shape() {
        return Err(ScsError::InvalidShape(format!(
            "signal {:?} vs codebook {:?}",
            x.shape(),
            codebook.shape()
        )));
    }
    for &e in epsilons {
        check_eps(e, 2.0 * K_SUBEXP, "the concentration events")?;
    }
    let (nx, ny, b) = codebook.shape();
    let n = nx * ny;
    let rho = codebook.descriptor().amplitude_bound;
    let diffs: Vec<MultiFrameSignal> = codebook
        .codewords()
        .iter()
        .map(|c| x.add_scaled(-1.0, c))
        .collect();
    let deviations = run_trials(trials, |t| {
        let masks = generate_masks((nx, ny, b), distribution, rng.trial(t))?;
        Ok(diffs
            .iter()
            .map(|d| ((sensed_energy(&masks, d) - d.norm2().powi(2)) / n as f64).abs())
            .fold(0.0f64, f64::max))
    })?;
    let params = serde_json::json!({
        "n": n, "B": b, "codebook_size": codebook.len(), "rho": rho,
        "trials": trials, "masks": distribution.name(),
    });
    let records = epsilons
        .iter()
        .map(|&eps| {
            let half_band = b as f64 * rho * rho * eps / 2.0;
            let hits = deviations.iter().filter(|&&d| d > half_band).count();
            let bound = csp_failure(ln_size(codebook), n, eps);
            TailRecord::validity("csp-events", params.clone(), eps, hits, trials, bound)
        })
        .collect();
    Ok(TailBoundReport { records })
}

/// Monte Carlo mean of `‖Σᵢ Dᵢ(xᵢ − cᵢ)‖²` next to its exact expectation
/// `‖x − c‖²` under standard Gaussian masks.
pub fn csp_expectation_check(
    x: &MultiFrameSignal,
    c: &MultiFrameSignal,
    trials: usize,
    rng: RngSpec,
) -> Result<(f64, f64)> {
    check_trials(trials)?;
    if !x.same_shape(c) {
        return Err(ScsError::InvalidShape("x and c differ in shape".into()));
    }
    let d = x.add_scaled(-1.0, c);
    let energies = run_trials(trials, |t| {
        let masks = generate_masks(d.shape(), MaskDistribution::Gaussian, rng.trial(t))?;
        Ok(sensed_energy(&masks, &d))
    })?;
    let mean = energies.iter().sum::<f64>() / trials as f64;
    Ok((mean, d.norm2().powi(2)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CspRecoveryStats {
    pub trials: usize,
    pub exact: usize,
    /// Smallest `(1/nB)‖c − c'‖²` over distinct codeword pairs.
    pub min_distortion_gap: f64,
    /// Largest admissible `ε` below which a wrong codeword violates the error guarantee.
    pub epsilon: f64,
    /// Bound on the probability of inexact recovery.
    pub failure_bound: f64,
    pub report: TailBoundReport,
}

impl CspRecoveryStats {
    pub fn exact_rate(&self) -> f64 {
        self.exact as f64 / self.trials as f64
    }
}

/// Exact-recovery frequency of CSP on noise-free codeword inputs with
/// fresh Gaussian masks per trial.
///
/// A wrong answer has per-entry error at least the minimum codeword gap
/// `d`, so it violates the guarantee `δ + ρ²ε` for every `ε < d/ρ²`; the
/// failure rate is therefore bounded by the guarantee's probability at
/// `ε = min(d/ρ², 2K)`.
pub fn simulate_csp_recovery(
    codebook: &EnumerableCodebook,
    trials: usize,
    rng: RngSpec,
) -> Result<CspRecoveryStats> {
    check_trials(trials)?;
    let (nx, ny, b) = codebook.shape();
    let n = nx * ny;
    let rho = codebook.descriptor().amplitude_bound;
    let words = codebook.codewords();
    let mut gap = f64::INFINITY;
    for (i, a) in words.iter().enumerate() {
        for c in &words[i + 1..] {
            gap = gap.min(a.distortion(c));
        }
    }
    let eps = if gap.is_finite() {
        (gap / (rho * rho)).min(2.0 * K_SUBEXP)
    } else {
        2.0 * K_SUBEXP
    };
    let hits = run_trials(trials, |t| {
        let mut r = rng.trial(t).rng();
        let idx = r.random_range(0..words.len());
        let masks = generate_masks((nx, ny, b), MaskDistribution::Gaussian, RngSpec::new(r.next_u64(), streams::MASKS))?;
        let y = forward(&masks, &words[idx])?;
        let (xhat, _) = csp_recover(codebook, &masks, &y)?;
        Ok(xhat == words[idx])
    })?;
    let exact = hits.iter().filter(|&&h| h).count();
    let failure_bound = csp_failure(ln_size(codebook), n, eps);
    let params = serde_json::json!({
        "n": n, "B": b, "codebook_size": codebook.len(), "rho": rho,
        "trials": trials, "min_gap": gap,
    });
    let report = TailBoundReport {
        records: vec![TailRecord::validity("csp-exact", params, eps, trials - exact, trials, failure_bound)],
    };
    Ok(CspRecoveryStats {
        trials,
        exact,
        min_distortion_gap: gap,
        epsilon: eps,
        failure_bound,
        report,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyCspSpec {
    pub sigma_z: f64,
    /// Per-entry distortion of the inputs around their codewords.
    pub delta: f64,
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub distribution: MaskDistribution,
    pub rng: RngSpec,
}

/// A codeword moved by uniform noise of amplitude `√δ`, clipped back into
/// `[−ρ/2, ρ/2]`, so that `(1/nB)‖x − c‖² ≤ δ`.
pub(crate) fn perturbed_member(c: &MultiFrameSignal, delta: f64, rho: f64, r: &mut impl Rng) -> MultiFrameSignal {
    let a = delta.sqrt();
    let half = rho / 2.0;
    let mut x = c.clone();
    if a > 0.0 {
        for v in x.data_mut() {
            *v = (*v + r.random_range(-a..=a)).clamp(-half, half);
        }
    }
    x
}

/// Bounded noise with `(1/√n)‖z‖₂ ≤ σ_z`: Gaussian draw, rescaled if it
/// exceeds the budget.
fn bounded_noise(nx: usize, ny: usize, sigma_z: f64, r: &mut impl Rng) -> Result<Measurement> {
    let n = nx * ny;
    let mut z: Vec<f64> = (0..n).map(|_| sigma_z * r.sample::<f64, _>(StandardNormal)).collect();
    let rms = (z.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms > sigma_z {
        let s = sigma_z / rms;
        z.iter_mut().for_each(|v| *v *= s);
    }
    Measurement::new(nx, ny, z)
}

/// Frequency with which the CSP error `(1/√(nB))‖x − x̂‖₂` exceeds
/// `(1/√(nB))√δ + ρε + 2σ_z/√B` under bounded noise, against
/// `2^{nBr+1}e^{−ε⁴n/(4³K²)}`.
pub fn run_noisy_csp_experiment(
    codebook: &EnumerableCodebook,
    spec: &NoisyCspSpec,
) -> Result<TailBoundReport> {
    check_trials(spec.trials)?;
    if !(spec.sigma_z >= 0.0) || !(spec.delta >= 0.0) {
        return Err(ScsError::InvalidParameter("sigma_z and delta must be non-negative".into()));
    }
    for &e in &spec.epsilons {
        check_eps(e, 2.0 * K_SUBEXP.sqrt(), "the noisy guarantee")?;
    }
    let (nx, ny, b) = codebook.shape();
    let n = nx * ny;
    let rho = codebook.descriptor().amplitude_bound;
    let words = codebook.codewords();
    let errors = run_trials(spec.trials, |t| {
        let mut r = spec.rng.trial(t).rng();
        let c = &words[r.random_range(0..words.len())];
        let x = perturbed_member(c, spec.delta, rho, &mut r);
        let masks = generate_masks((nx, ny, b), spec.distribution, RngSpec::new(r.next_u64(), streams::MASKS))?;
        let z = bounded_noise(nx, ny, spec.sigma_z, &mut r)?;
        let clean = forward(&masks, &x)?;
        let y = Measurement::new(nx, ny, clean.data().iter().zip(z.data()).map(|(a, b)| a + b).collect())?;
        let (xhat, _) = csp_recover(codebook, &masks, &y)?;
        Ok(x.normalized_error(&xhat))
    })?;
    let params = serde_json::json!({
        "n": n, "B": b, "codebook_size": codebook.len(), "rho": rho, "delta": spec.delta,
        "sigma_z": spec.sigma_z, "trials": spec.trials, "masks": spec.distribution.name(),
    });
    let records = spec
        .epsilons
        .iter()
        .map(|&eps| {
            let rhs = noisy_csp_error_bound(n, b, spec.delta, rho, eps, spec.sigma_z);
            let hits = errors.iter().filter(|&&e| e > rhs).count();
            let bound = noisy_csp_failure(ln_size(codebook), n, eps);
            TailRecord::validity("csp-noisy", params.clone(), eps, hits, spec.trials, bound)
        })
        .collect();
    Ok(TailBoundReport { records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryBSpec {
    pub rate: f64,
    pub deltas: Vec<f64>,
    pub eta: f64,
    pub rho: f64,
    /// Pixels per frame.
    pub n: usize,
    pub trials: usize,
    pub rng: RngSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryBPoint {
    pub delta: f64,
    /// `None` when no `B ≥ 1` satisfies the frame bound.
    pub frames: Option<usize>,
    pub codebook_size: usize,
    pub error_bound: f64,
    pub failure_bound: f64,
    pub exceed_freq: f64,
    pub mean_distortion: f64,
}

/// For each `δ`, takes the largest admissible `B`, builds a rate-`r`
/// codebook of `2^{nBr}` random grid codewords and measures how often the
/// CSP distortion `(1/nB)‖x − x̂‖²` exceeds `δ + 8ρ²√(log₂(1/δ)/η)`.
pub fn corollary_b_sweep(spec: &CorollaryBSpec) -> Result<(Vec<CorollaryBPoint>, TailBoundReport)> {
    check_trials(spec.trials)?;
    if !(spec.eta > 0.0 && spec.rate > 0.0 && spec.rho > 0.0) {
        return Err(ScsError::InvalidParameter("eta, rate and rho must be positive".into()));
    }
    if spec.deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(ScsError::InvalidParameter("every delta must lie in (0, 1)".into()));
    }
    let mut points = Vec::new();
    let mut report = TailBoundReport::default();
    for (i, &delta) in spec.deltas.iter().enumerate() {
        let error_bound = rate_error_bound(delta, spec.rho, spec.eta);
        let failure_bound = rate_failure(delta, spec.n, spec.eta);
        let Some(b) = rate_max_frames(spec.rate, delta, spec.eta) else {
            points.push(CorollaryBPoint {
                delta,
                frames: None,
                codebook_size: 0,
                error_bound,
                failure_bound,
                exceed_freq: 0.0,
                mean_distortion: f64::NAN,
            });
            report.records.push(TailRecord::validity(
                "corollary-b",
                serde_json::json!({ "delta": delta, "eta": spec.eta, "rate": spec.rate, "infeasible": true }),
                error_bound,
                0,
                1,
                failure_bound,
            ));
            continue;
        };
        let bits = (spec.n * b) as f64 * spec.rate;
        let size = 2f64.powf(bits).round();
        if size > crate::codecs::MAX_ENUMERABLE as f64 {
            return Err(ScsError::TooLargeCodebook {
                size,
                limit: crate::codecs::MAX_ENUMERABLE,
            });
        }
        let levels = ((spec.rho / (2.0 * delta.sqrt())).floor() as usize).max(2);
        let codebook = random_grid_codebook(
            (spec.n, 1, b),
            size as usize,
            levels,
            spec.rho,
            spec.rng.stream(streams::CODEBOOK).trial(i as u64),
        )?
        .with_distortion_bound(delta);
        let words = codebook.codewords();
        let stream = spec.rng.trial(i as u64);
        let distortions = run_trials(spec.trials, |t| {
            let mut r = stream.trial(t).rng();
            let c = &words[r.random_range(0..words.len())];
            let x = perturbed_member(c, delta, spec.rho, &mut r);
            let masks = generate_masks((spec.n, 1, b), MaskDistribution::Gaussian, RngSpec::new(r.next_u64(), streams::MASKS))?;
            let y = forward(&masks, &x)?;
            let (xhat, _) = csp_recover(&codebook, &masks, &y)?;
            Ok(x.distortion(&xhat))
        })?;
        let hits = distortions.iter().filter(|&&d| d > error_bound).count();
        let mean = distortions.iter().sum::<f64>() / spec.trials as f64;
        points.push(CorollaryBPoint {
            delta,
            frames: Some(b),
            codebook_size: codebook.len(),
            error_bound,
            failure_bound,
            exceed_freq: hits as f64 / spec.trials as f64,
            mean_distortion: mean,
        });
        report.records.push(TailRecord::validity(
            "corollary-b",
            serde_json::json!({
                "delta": delta, "eta": spec.eta, "rate": spec.rate, "B": b, "n": spec.n,
                "codebook_size": codebook.len(), "trials": spec.trials, "mean_distortion": mean,
            }),
            error_bound,
            hits,
            spec.trials,
            failure_bound,
        ));
    }
    Ok((points, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_codebook(size: usize) -> EnumerableCodebook {
        random_grid_codebook((8, 1, 2), size, 4, 2.0, RngSpec::new(5, streams::CODEBOOK)).unwrap()
    }

    #[test]
    fn single_codeword_at_x_never_violates() {
        let x = MultiFrameSignal::constant(4, 1, 2, 0.25);
        let cb = EnumerableCodebook::new(vec![x.clone()], 2.0, 0.0).unwrap();
        let r = simulate_csp_events(&cb, &x, MaskDistribution::Gaussian, &[0.01, 1.0], 200, RngSpec::new(1, 0)).unwrap();
        assert!(r.records.iter().all(|rec| rec.empirical_freq == 0.0));
    }

    #[test]
    fn epsilon_above_2k_rejected() {
        let cb = small_codebook(4);
        let x = cb.codewords()[0].clone();
        assert!(simulate_csp_events(&cb, &x, MaskDistribution::Gaussian, &[6.0], 10, RngSpec::new(1, 0)).is_err());
    }

    #[test]
    fn expectation_identity_roughly() {
        let cb = small_codebook(2);
        let (m, exact) = csp_expectation_check(&cb.codewords()[0], &cb.codewords()[1], 20_000, RngSpec::new(2, 0)).unwrap();
        assert!((m / exact - 1.0).abs() < 0.05, "{m} vs {exact}");
    }

    #[test]
    fn recovery_is_mostly_exact() {
        let cb = small_codebook(16);
        let s = simulate_csp_recovery(&cb, 100, RngSpec::new(3, 0)).unwrap();
        assert!(s.exact_rate() > 0.8, "{}", s.exact_rate());
        assert!(s.report.all_pass());
    }

    #[test]
    fn zero_noise_codeword_inputs_meet_the_bound() {
        let cb = small_codebook(16);
        let spec = NoisyCspSpec {
            sigma_z: 0.0,
            delta: 0.0,
            epsilons: vec![0.1, 1.0],
            trials: 50,
            distribution: MaskDistribution::Gaussian,
            rng: RngSpec::new(4, 0),
        };
        assert!(run_noisy_csp_experiment(&cb, &spec).unwrap().all_pass());
    }

    #[test]
    fn corollary_b_infeasible_and_feasible_points() {
        let spec = CorollaryBSpec {
            rate: 0.5,
            deltas: vec![0.3, 2f64.powi(-8)],
            eta: 4.0,
            rho: 2.0,
            n: 4,
            trials: 20,
            rng: RngSpec::new(5, 0),
        };
        let (points, report) = corollary_b_sweep(&spec).unwrap();
        assert_eq!(points[0].frames, None);
        assert_eq!(points[1].frames, Some(2));
        assert_eq!(points[1].codebook_size, 16);
        assert!(report.all_pass());
    }
}
