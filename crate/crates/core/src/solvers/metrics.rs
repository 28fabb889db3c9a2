use crate::error::{Result, ScsError};
use crate::signal::MultiFrameSignal;

/// Reconstruction quality against ground truth, peak value 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub mse: f64,
    /// `+∞` when the reconstruction is exact.
    pub psnr_db: f64,
    pub per_frame_psnr: Vec<f64>,
}

fn psnr(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (1.0 / mse).log10()
    }
}

pub fn compute_metrics(xhat: &MultiFrameSignal, x_true: &MultiFrameSignal) -> Result<Metrics> {
    if !xhat.same_shape(x_true) {
        return Err(ScsError::InvalidShape(format!(
            "reconstruction {:?} vs ground truth {:?}",
            xhat.shape(),
            x_true.shape()
        )));
    }
    let b = xhat.frames();
    let mut frame_sq = vec![0.0; b];
    for (k, (a, t)) in xhat.data().iter().zip(x_true.data()).enumerate() {
        frame_sq[k % b] += (a - t) * (a - t);
    }
    let n = xhat.pixels() as f64;
    let mse = frame_sq.iter().sum::<f64>() / (n * b as f64);
    Ok(Metrics {
        mse,
        psnr_db: psnr(mse),
        per_frame_psnr: frame_sq.iter().map(|s| psnr(s / n)).collect(),
    })
}
