use rand::Rng;
use rand_distr::StandardNormal;

use super::formulas::bernstein_tail;
use super::{run_trials, TailBoundReport, TailRecord, K_SUBEXP};
use crate::error::{Result, ScsError};
use crate::rng::RngSpec;

/// Weighted sum `Σ wⱼ(Zⱼ² − 1)` of centered squared standard normals.
#[derive(Debug, Clone, PartialEq)]
pub struct TailExperimentSpec {
    pub weights: Vec<f64>,
    pub trials: usize,
    /// Ascending.
    pub thresholds: Vec<f64>,
    pub rng: RngSpec,
    pub subexp_k: f64,
}

impl TailExperimentSpec {
    /// `wⱼ = 1/n`.
    pub fn uniform(n: usize, trials: usize, thresholds: Vec<f64>, rng: RngSpec) -> Self {
        TailExperimentSpec {
            weights: vec![1.0 / n as f64; n],
            trials,
            thresholds,
            rng,
            subexp_k: K_SUBEXP,
        }
    }

    /// Eight thresholds spanning the bulk and the far tail of the uniform
    /// `n`-term sum, whose standard deviation is `√(2/n)`.
    pub fn default_grid(n: usize) -> Vec<f64> {
        let sd = (2.0 / n as f64).sqrt();
        [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0].iter().map(|m| m * sd).collect()
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(ScsError::InvalidParameter("weights must be finite and non-empty".into()));
        }
        if self.trials == 0 {
            return Err(ScsError::InvalidParameter("trials must be at least 1".into()));
        }
        if self.thresholds.windows(2).any(|w| w[0] > w[1]) {
            return Err(ScsError::InvalidParameter("thresholds must be sorted ascending".into()));
        }
        if !(self.subexp_k > 0.0) {
            return Err(ScsError::InvalidParameter("K must be positive".into()));
        }
        Ok(())
    }
}

pub fn simulate_bernstein_tail(spec: &TailExperimentSpec) -> Result<TailBoundReport> {
    spec.validate()?;
    let w = &spec.weights;
    let sums = run_trials(spec.trials, |t| {
        let mut r = spec.rng.trial(t).rng();
        Ok(w.iter()
            .map(|wj| {
                let z: f64 = r.sample(StandardNormal);
                wj * (z * z - 1.0)
            })
            .sum::<f64>())
    })?;
    let l2_sq: f64 = w.iter().map(|v| v * v).sum();
    let linf = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let params = serde_json::json!({
        "n": spec.n(),
        "trials": spec.trials,
        "K": spec.subexp_k,
        "w_l2_sq": l2_sq,
        "w_linf": linf,
    });
    let records = spec
        .thresholds
        .iter()
        .map(|&t| {
            let hits = sums.iter().filter(|&&s| s >= t).count();
            let bound = bernstein_tail(t, l2_sq, linf, spec.subexp_k);
            TailRecord::validity("bernstein", params.clone(), t, hits, spec.trials, bound)
        })
        .collect();
    Ok(TailBoundReport { records })
}
