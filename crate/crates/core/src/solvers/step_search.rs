use crate::codecs::Codec;
use crate::error::{Result, ScsError};
use crate::sensing::{adjoint, forward, MaskStack, Measurement};
use crate::signal::MultiFrameSignal;

/// Points in the uniform grid that seeds the search, endpoints included.
pub const COARSE_GRID_POINTS: usize = 33;
/// Local minima of the coarse grid that get golden-section refinement.
const REFINED_CELLS: usize = 3;
/// Refinement stops once the bracket is this fraction of the search range.
const REL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSearch {
    pub mu: f64,
    /// `‖y − H·g(f(x + μd))‖₂` at the returned `mu`.
    pub objective: f64,
}

/// Step `μ ∈ [lo, hi]` minimizing the residual after projecting the PGD
/// update `x + μHᵀ(y − Hx)`.
///
/// A coarse grid locates the best few basins and golden-section search
/// refines each. When the objective is constant over the grid the midpoint
/// of the bracket is returned.
pub fn adaptive_step_search<C: Codec + ?Sized>(
    codec: &C,
    masks: &MaskStack,
    y: &Measurement,
    x: &MultiFrameSignal,
    bracket: (f64, f64),
) -> Result<StepSearch> {
    let residual = y.sub(&forward(masks, x)?);
    let dir = adjoint(masks, &residual)?;
    search_along(codec, masks, y, x, &dir, bracket, 0)
}

pub(crate) fn objective_at<C: Codec + ?Sized>(
    codec: &C,
    masks: &MaskStack,
    y: &Measurement,
    x: &MultiFrameSignal,
    dir: &MultiFrameSignal,
    mu: f64,
    iter: usize,
) -> Result<f64> {
    let p = codec.project_at(&x.add_scaled(mu, dir), iter)?;
    let v = forward(masks, &p)?.distance(y);
    if !v.is_finite() {
        return Err(ScsError::Search(format!("objective is {v} at mu = {mu}")));
    }
    Ok(v)
}

pub(crate) fn search_along<C: Codec + ?Sized>(
    codec: &C,
    masks: &MaskStack,
    y: &Measurement,
    x: &MultiFrameSignal,
    dir: &MultiFrameSignal,
    (lo, hi): (f64, f64),
    iter: usize,
) -> Result<StepSearch> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ScsError::InvalidParameter(format!("bad step bracket ({lo}, {hi})")));
    }
    let f = |mu: f64| objective_at(codec, masks, y, x, dir, mu, iter);
    let last = COARSE_GRID_POINTS - 1;
    let grid: Vec<f64> = (0..=last)
        .map(|i| lo + (hi - lo) * i as f64 / last as f64)
        .collect();
    let vals = grid.iter().map(|&m| f(m)).collect::<Result<Vec<f64>>>()?;

    let vmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let vmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if vmax - vmin <= 1e-14 * vmax.abs().max(1.0) {
        return Ok(StepSearch {
            mu: grid[last / 2],
            objective: vals[last / 2],
        });
    }

    let mut basins: Vec<usize> = (0..=last)
        .filter(|&i| (i == 0 || vals[i] <= vals[i - 1]) && (i == last || vals[i] <= vals[i + 1]))
        .collect();
    basins.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    basins.truncate(REFINED_CELLS);

    let mut best = StepSearch {
        mu: grid[basins[0]],
        objective: vals[basins[0]],
    };
    let mut consider = |mu: f64, v: f64| {
        if v < best.objective {
            best = StepSearch { mu, objective: v };
        }
    };
    let tol = REL_TOL * (hi - lo);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for &i in &basins {
        let mut a = grid[i.saturating_sub(1)];
        let mut b = grid[(i + 1).min(last)];
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let mut fc = f(c)?;
        let mut fd = f(d)?;
        consider(c, fc);
        consider(d, fd);
        while b - a > tol {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = f(c)?;
                consider(c, fc);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = f(d)?;
                consider(d, fd);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codecs::IdentityCodec;
    use crate::sensing::MaskDistribution;

    #[test]
    fn identity_codec_unit_masks_picks_one() {
        let masks = MaskStack::from_frames(3, 1, &[vec![1.0; 3]], MaskDistribution::Gaussian).unwrap();
        let y = Measurement::new(3, 1, vec![0.3, -0.7, 1.1]).unwrap();
        let x = MultiFrameSignal::zeros(3, 1, 1);
        let s = adaptive_step_search(&IdentityCodec, &masks, &y, &x, (0.0, 2.0)).unwrap();
        assert!((s.mu - 1.0).abs() < 1e-6, "mu = {}", s.mu);
        assert!(s.objective < 1e-6);
    }

    #[test]
    fn constant_objective_gives_midpoint() {
        // x already fits y, so the direction is zero.
        let masks = MaskStack::from_frames(2, 1, &[vec![1.0, 1.0]], MaskDistribution::Gaussian).unwrap();
        let y = Measurement::new(2, 1, vec![0.5, 0.5]).unwrap();
        let x = MultiFrameSignal::constant(2, 1, 1, 0.5);
        let s = adaptive_step_search(&IdentityCodec, &masks, &y, &x, (0.5, 1.5)).unwrap();
        assert_eq!(s.mu, 1.0);
    }

    #[test]
    fn rejects_empty_bracket() {
        let masks = MaskStack::from_frames(1, 1, &[vec![1.0]], MaskDistribution::Gaussian).unwrap();
        let y = Measurement::new(1, 1, vec![1.0]).unwrap();
        let x = MultiFrameSignal::zeros(1, 1, 1);
        assert!(adaptive_step_search(&IdentityCodec, &masks, &y, &x, (1.0, 1.0)).is_err());
    }
}
