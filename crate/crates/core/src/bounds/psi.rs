use rand::Rng;
use rand_distr::StandardNormal;

use super::formulas::gaussian_psi2_moment;
use super::{run_trials, TailBoundReport, TailRecord, K_SUBEXP};
use crate::error::{Result, ScsError};
use crate::rng::RngSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psi2Check {
    /// Root of `E[exp(X²/L²)] = 2` in `L`.
    pub psi2: f64,
    /// `E[exp(X²/L²)]` at `L = √(8/3)σ`.
    pub check_at_bound: f64,
}

/// Sub-Gaussian norm of `N(0, σ²)` by bisection on the closed-form moment.
pub fn verify_psi2_gaussian(sigma: f64) -> Result<Psi2Check> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(ScsError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    // The moment decreases in L from +∞ at √2σ towards 1.
    let mut lo = 2f64.sqrt() * sigma;
    let mut hi = 2.0 * sigma;
    while gaussian_psi2_moment(hi, sigma) > 2.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gaussian_psi2_moment(mid, sigma) > 2.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Psi2Check {
        psi2: 0.5 * (lo + hi),
        check_at_bound: gaussian_psi2_moment((8.0f64 / 3.0).sqrt() * sigma, sigma),
    })
}

/// Tail of `|XY|` for independent `X ~ N(0, σₓ²)`, `Y ~ N(0, σ_y²)` against
/// the envelope `2e^{−t/(Kσₓσ_y)}`, which follows from
/// `‖XY‖_ψ1 ≤ ‖X‖_ψ2‖Y‖_ψ2 = Kσₓσ_y` and Markov's inequality.
pub fn product_tail(
    sigma_x: f64,
    sigma_y: f64,
    thresholds: &[f64],
    trials: usize,
    rng: RngSpec,
) -> Result<TailBoundReport> {
    if !(sigma_x > 0.0 && sigma_y > 0.0) {
        return Err(ScsError::InvalidParameter("sigmas must be positive".into()));
    }
    if trials == 0 {
        return Err(ScsError::InvalidParameter("trials must be at least 1".into()));
    }
    let products = run_trials(trials, |t| {
        let mut r = rng.trial(t).rng();
        let x: f64 = r.sample(StandardNormal);
        let y: f64 = r.sample(StandardNormal);
        Ok((x * sigma_x * y * sigma_y).abs())
    })?;
    let scale = K_SUBEXP * sigma_x * sigma_y;
    let params = serde_json::json!({ "sigma_x": sigma_x, "sigma_y": sigma_y, "trials": trials });
    let records = thresholds
        .iter()
        .map(|&t| {
            let hits = products.iter().filter(|&&p| p >= t).count();
            let bound = (2.0 * (-t / scale).exp()).min(1.0);
            TailRecord::validity("product-tail", params.clone(), t, hits, trials, bound)
        })
        .collect();
    Ok(TailBoundReport { records })
}
