//! Closed-form tail bounds and probabilities.
//!
//! Failure probabilities are evaluated in log space and capped at 1; a
//! codebook size enters as `ln|C|`, which equals `nBr·ln 2`.

use super::K_SUBEXP;

const LN2: f64 = std::f64::consts::LN_2;

fn capped(log_p: f64) -> f64 {
    log_p.exp().min(1.0)
}

/// `exp{−min(t²/(4K²‖w‖₂²), t/(2K‖w‖∞))}` for `P(Σ wⱼ(Xⱼ − EXⱼ) ≥ t)`.
pub fn bernstein_tail(t: f64, w_l2_sq: f64, w_linf: f64, k: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let a = t * t / (4.0 * k * k * w_l2_sq);
    let b = t / (2.0 * k * w_linf);
    (-a.min(b)).exp()
}

/// `E[exp(X²/L²)] = √(L²/(L² − 2σ²))` for `X ~ N(0, σ²)`; infinite when
/// `L² ≤ 2σ²`.
pub fn gaussian_psi2_moment(l: f64, sigma: f64) -> f64 {
    let l2 = l * l;
    let s2 = 2.0 * sigma * sigma;
    if l2 <= s2 {
        f64::INFINITY
    } else {
        (l2 / (l2 - s2)).sqrt()
    }
}

/// Probability that the noise-free CSP error exceeds `δ + ρ²ε`:
/// `2^{nBr+1} e^{−ε²n/(16K²)}`.
pub fn csp_failure(ln_codebook: f64, n: usize, eps: f64) -> f64 {
    capped(LN2 + ln_codebook - eps * eps * n as f64 / (16.0 * K_SUBEXP * K_SUBEXP))
}

/// Probability that the noisy CSP error exceeds its bound:
/// `2^{nBr+1} e^{−ε⁴n/(4³K²)}`.
pub fn noisy_csp_failure(ln_codebook: f64, n: usize, eps: f64) -> f64 {
    capped(LN2 + ln_codebook - eps.powi(4) * n as f64 / (64.0 * K_SUBEXP * K_SUBEXP))
}

/// Right-hand side of the noisy CSP guarantee on `(1/√(nB))‖x − x̂‖₂`:
/// `(1/√(nB))√δ + ρε + 2σ_z/√B`.
pub fn noisy_csp_error_bound(n: usize, b: usize, delta: f64, rho: f64, eps: f64, sigma_z: f64) -> f64 {
    let nb = (n * b) as f64;
    delta.sqrt() / nb.sqrt() + rho * eps + 2.0 * sigma_z / (b as f64).sqrt()
}

fn ln_pow2_plus_one(ln_c2: f64) -> f64 {
    // ln(|C|² + 1) without overflow.
    ln_c2 + (-ln_c2).exp().ln_1p()
}

/// Failure probability of one PGD contraction step:
/// `2^{4nBr} e^{−a²λ²n} + (2^{2nBr} + 1) e^{−a²n}` with `a = δ/(2Kρ²)`.
pub fn pgd_step_failure(ln_codebook: f64, n: usize, delta: f64, rho: f64, lambda: f64) -> f64 {
    let a = delta / (2.0 * K_SUBEXP * rho * rho);
    let n = n as f64;
    let t1 = 4.0 * ln_codebook - a * a * lambda * lambda * n;
    let t2 = ln_pow2_plus_one(2.0 * ln_codebook) - a * a * n;
    (t1.exp() + t2.exp()).min(1.0)
}

/// Noisy variant: adds `2^{2nBr} e^{−n(3ε_z/(16ρ))²δ}`; `a = 3δ/(16ρ²)`.
pub fn noisy_pgd_step_failure(
    ln_codebook: f64,
    n: usize,
    delta: f64,
    rho: f64,
    lambda: f64,
    eps_z: f64,
) -> f64 {
    let a = 3.0 * delta / (16.0 * rho * rho);
    let nf = n as f64;
    let t1 = 4.0 * ln_codebook - a * a * lambda * lambda * nf;
    let t2 = ln_pow2_plus_one(2.0 * ln_codebook) - a * a * nf;
    let c = 3.0 * eps_z / (16.0 * rho);
    let t3 = 2.0 * ln_codebook - nf * c * c * delta;
    (t1.exp() + t2.exp() + t3.exp()).min(1.0)
}

/// Extra additive term in the noisy recursion: `2ε_zσ/√B`.
pub fn noisy_recursion_term(eps_z: f64, sigma: f64, b: usize) -> f64 {
    2.0 * eps_z * sigma / (b as f64).sqrt()
}

/// Failure probability of one GAP contraction step with `μ = B`:
/// `2^{4nBr} e^{−λ²δ²n/(2Bρ⁴)} + 2^{2nBr} e^{−nδ/(2ρ²B²)}`.
pub fn gap_step_failure(ln_codebook: f64, n: usize, b: usize, delta: f64, rho: f64, lambda: f64) -> f64 {
    let nf = n as f64;
    let bf = b as f64;
    let t1 = 4.0 * ln_codebook - lambda * lambda * delta * delta * nf / (2.0 * bf * rho.powi(4));
    let t2 = 2.0 * ln_codebook - nf * delta / (2.0 * rho * rho * bf * bf);
    (t1.exp() + t2.exp()).min(1.0)
}

/// Largest admissible `B` under `B ≤ (1+ε)/(100r)·(δλ/ρ²)²`.
pub fn contraction_max_frames(rate: f64, delta: f64, rho: f64, lambda: f64, eps: f64) -> f64 {
    (1.0 + eps) / (100.0 * rate) * (delta * lambda / (rho * rho)).powi(2)
}

/// Smallest `ε > 0` for which `b` frames satisfy the frame inequality.
pub fn contraction_min_epsilon(b: usize, rate: f64, delta: f64, rho: f64, lambda: f64) -> f64 {
    let need = b as f64 * 100.0 * rate / (delta * lambda / (rho * rho)).powi(2) - 1.0;
    need.max(f64::MIN_POSITIVE)
}

/// `e^{−(3δλ/(16ρ²))²εn}`.
pub fn contraction_eps_failure(n: usize, delta: f64, rho: f64, lambda: f64, eps: f64) -> f64 {
    let a = 3.0 * delta * lambda / (16.0 * rho * rho);
    capped(-a * a * eps * n as f64)
}

/// `(2λ)^{t+1}e₀ + 4√δ/(1 − 2λ)`, the bound on `e_{t+1}`.
pub fn unrolled_error_bound(t: usize, e0: f64, lambda: f64, delta: f64) -> f64 {
    (2.0 * lambda).powi(t as i32 + 1) * e0 + 4.0 * delta.sqrt() / (1.0 - 2.0 * lambda)
}

/// Largest integer `B` allowed by `B ≤ log₂(1/δ)/(2rη)`; `None` when no
/// `B ≥ 1` qualifies.
pub fn rate_max_frames(rate: f64, delta: f64, eta: f64) -> Option<usize> {
    let b = ((1.0 / delta).log2() / (2.0 * rate * eta)).floor();
    if b >= 1.0 {
        Some(b as usize)
    } else {
        None
    }
}

/// `δ + 8ρ²√(log₂(1/δ)/η)`.
pub fn rate_error_bound(delta: f64, rho: f64, eta: f64) -> f64 {
    delta + 8.0 * rho * rho * ((1.0 / delta).log2() / eta).sqrt()
}

/// `2e^{−log₂(1/δ)·n/(5η)}`.
pub fn rate_failure(delta: f64, n: usize, eta: f64) -> f64 {
    capped(LN2 - (1.0 / delta).log2() * n as f64 / (5.0 * eta))
}
