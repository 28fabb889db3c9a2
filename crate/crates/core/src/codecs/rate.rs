use super::Codec;
use crate::error::{Result, ScsError};
use crate::signal::MultiFrameSignal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDistortion {
    /// Bits per signal entry.
    pub rate: f64,
    /// Worst per-entry squared error over the corpus.
    pub distortion: f64,
}

/// Empirical operating point of `codec` on `corpus`: the largest rate and
/// the largest distortion `(1/nB)‖x − g(f(x))‖²` seen on any member.
pub fn estimate_rate_distortion<C: Codec + ?Sized>(
    codec: &C,
    corpus: &[MultiFrameSignal],
) -> Result<RateDistortion> {
    if corpus.is_empty() {
        return Err(ScsError::InvalidArgument("empty corpus".into()));
    }
    let mut rate: f64 = 0.0;
    let mut distortion: f64 = 0.0;
    for x in corpus {
        let xhat = codec.project(x)?;
        distortion = distortion.max(x.distortion(&xhat));
        rate = rate.max(codec.rate_bits(x)? / x.len() as f64);
    }
    Ok(RateDistortion { rate, distortion })
}

/// Least-squares slope of `2r` against `log₂(1/δ)` over a family of
/// operating points; estimates the α-dimension of the family.
///
/// Points with zero distortion carry no information and are skipped.
pub fn fit_alpha_dimension(points: &[RateDistortion]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.distortion > 0.0)
        .map(|p| ((1.0 / p.distortion).log2(), 2.0 * p.rate))
        .collect();
    if pts.len() < 2 {
        return Err(ScsError::InvalidArgument(
            "need at least two operating points with positive distortion".into(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(ScsError::InvalidArgument("operating points share one distortion".into()));
    }
    Ok(sxy / sxx)
}
