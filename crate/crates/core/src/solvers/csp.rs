use crate::codecs::{EnumerableCodebook, MAX_ENUMERABLE};
use crate::error::{Result, ScsError};
use crate::sensing::{forward, MaskStack, Measurement};
use crate::signal::MultiFrameSignal;

/// Exhaustive `argmin_{c ∈ C} ‖y − Hc‖₂`; ties go to the lowest codeword index.
///
/// Returns the winning codeword and its residual norm.
pub fn csp_recover(
    codebook: &EnumerableCodebook,
    masks: &MaskStack,
    y: &Measurement,
) -> Result<(MultiFrameSignal, f64)> {
    if codebook.len() > MAX_ENUMERABLE {
        return Err(ScsError::TooLargeCodebook {
            size: codebook.len() as f64,
            limit: MAX_ENUMERABLE,
        });
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in codebook.codewords().iter().enumerate() {
        let r = forward(masks, c)?.distance(y);
        if best.is_none_or(|(_, b)| r < b) {
            best = Some((i, r));
        }
    }
    let (i, r) = best.ok_or_else(|| ScsError::InvalidCodec("empty codebook".into()))?;
    Ok((codebook.codewords()[i].clone(), r))
}
