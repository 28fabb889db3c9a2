//! Nonlocal-similarity (NLS) video code.
//!
//! Encoder: overlapping `p_x × p_y × B` blocks are taken on a stride grid.
//! For every reference block, the `G` most similar grid blocks inside the
//! search window (ℓ₂ distance, reference first) are stacked into a
//! `p_x × p_y × B × G` group, transformed with a 4D DCT, and only the
//! `keep_per_group` largest coefficients survive.
//!
//! Decoder: each group is inverted and its member blocks are scattered back
//! and averaged per pixel.
//!
//! Group tensors use axes `(dx, dy, frame, member)` in row-major order, so a
//! coefficient's flat index is `((dx·p_y + dy)·B + frame)·G + member`.

use ndarray::{ArrayD, IxDyn};
use rayon::prelude::*;

use super::simple::{index_bits, COEFF_BITS};
use super::Codec;
use crate::error::{Result, ScsError};
use crate::signal::MultiFrameSignal;
use crate::transforms::{top_k_indices, DctPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NlsParams {
    pub block_w: usize,
    pub block_h: usize,
    pub stride: usize,
    pub group_size: usize,
    /// Half-width, in pixels, of the block-matching window.
    pub search_window: usize,
    /// Coefficients kept per group; `None` means `p_x · p_y · B`.
    pub keep_per_group: Option<usize>,
}

impl Default for NlsParams {
    fn default() -> Self {
        NlsParams {
            block_w: 8,
            block_h: 8,
            stride: 4,
            group_size: 16,
            search_window: 20,
            keep_per_group: None,
        }
    }
}

impl NlsParams {
    pub fn block_len(&self, frames: usize) -> usize {
        self.block_w * self.block_h * frames
    }

    pub fn keep(&self, frames: usize) -> usize {
        self.keep_per_group.unwrap_or(self.block_len(frames))
    }

    pub fn validate(&self, frames: usize) -> Result<()> {
        if self.block_w == 0 || self.block_h == 0 {
            return Err(ScsError::InvalidParameter("NLS block dimensions must be positive".into()));
        }
        if self.stride == 0 || self.stride > self.block_w || self.stride > self.block_h {
            return Err(ScsError::InvalidParameter(format!(
                "NLS stride {} must lie in 1..=min(block_w, block_h)",
                self.stride
            )));
        }
        if self.group_size == 0 {
            return Err(ScsError::InvalidParameter("NLS group_size must be at least 1".into()));
        }
        let max_keep = self.block_len(frames) * self.group_size;
        if self.keep(frames) > max_keep {
            return Err(ScsError::InvalidParameter(format!(
                "keep_per_group {} exceeds group size {max_keep}",
                self.keep(frames)
            )));
        }
        Ok(())
    }

    fn check_frame(&self, nx: usize, ny: usize, frames: usize) -> Result<()> {
        self.validate(frames)?;
        if self.block_w > nx || self.block_h > ny {
            return Err(ScsError::InvalidParameter(format!(
                "NLS block {}x{} larger than frame {nx}x{ny}",
                self.block_w, self.block_h
            )));
        }
        Ok(())
    }
}

/// Block origins along one axis: every `stride`, plus the last valid origin
/// so that every pixel is covered.
fn grid_positions(len: usize, block: usize, stride: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..=len - block).step_by(stride).collect();
    if *out.last().expect("non-empty") != len - block {
        out.push(len - block);
    }
    out
}

fn block_origins(nx: usize, ny: usize, p: &NlsParams) -> Vec<(usize, usize)> {
    let xs = grid_positions(nx, p.block_w, p.stride);
    let ys = grid_positions(ny, p.block_h, p.stride);
    ys.iter()
        .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlsGroup {
    /// Member block origins `(x, y)`; the reference block is first.
    pub members: Vec<(u32, u32)>,
    /// Surviving `(flat 4D index, value)` pairs, ascending by index.
    pub coeffs: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlsCode {
    pub nx: usize,
    pub ny: usize,
    pub frames: usize,
    pub params: NlsParams,
    pub groups: Vec<NlsGroup>,
}

impl NlsCode {
    pub fn kept_coefficients(&self) -> usize {
        self.groups.iter().map(|g| g.coeffs.len()).sum()
    }
}

fn extract_block(x: &MultiFrameSignal, origin: (usize, usize), p: &NlsParams) -> Vec<f64> {
    let b = x.frames();
    let mut out = Vec::with_capacity(p.block_len(b));
    for dx in 0..p.block_w {
        for dy in 0..p.block_h {
            let start = x.index(origin.0 + dx, origin.1 + dy, 0);
            out.extend_from_slice(&x.data()[start..start + b]);
        }
    }
    out
}

fn plans(p: &NlsParams, frames: usize) -> Result<Vec<DctPlan>> {
    (1..=p.group_size)
        .map(|g| DctPlan::new(&[p.block_w, p.block_h, frames, g]))
        .collect()
}

pub fn nls_encode(params: &NlsParams, x: &MultiFrameSignal) -> Result<NlsCode> {
    nls_encode_with_keep(params, x, params.keep(x.frames()))
}

fn nls_encode_with_keep(params: &NlsParams, x: &MultiFrameSignal, keep: usize) -> Result<NlsCode> {
    let (nx, ny, frames) = x.shape();
    params.check_frame(nx, ny, frames)?;
    let origins = block_origins(nx, ny, params);
    let blocks: Vec<Vec<f64>> = origins
        .iter()
        .map(|&o| extract_block(x, o, params))
        .collect();
    let plans = plans(params, frames)?;
    let block_len = params.block_len(frames);
    let window = params.search_window;

    let groups = (0..origins.len())
        .into_par_iter()
        .map(|r| -> Result<NlsGroup> {
            let (rx, ry) = origins[r];
            let reference = &blocks[r];
            let mut cands: Vec<(bool, f64, usize)> = origins
                .iter()
                .enumerate()
                .filter(|(_, &(cx, cy))| cx.abs_diff(rx) <= window && cy.abs_diff(ry) <= window)
                .map(|(c, _)| {
                    let d: f64 = blocks[c]
                        .iter()
                        .zip(reference)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    (c != r, d, c)
                })
                .collect();
            // Reference first, then ascending distance, then raster order.
            cands.sort_by(|a, b| {
                a.0.cmp(&b.0)
                    .then(a.1.total_cmp(&b.1))
                    .then(a.2.cmp(&b.2))
            });
            cands.truncate(params.group_size);
            let g = cands.len();

            let mut data = vec![0.0; block_len * g];
            for (m, &(_, _, c)) in cands.iter().enumerate() {
                for (e, v) in blocks[c].iter().enumerate() {
                    data[e * g + m] = *v;
                }
            }
            let mut tensor = ArrayD::from_shape_vec(IxDyn(&[params.block_w, params.block_h, frames, g]), data)
                .expect("group tensor shape");
            plans[g - 1].apply(&mut tensor, false)?;
            let coeffs_all = tensor.as_slice().expect("standard layout");
            let mut kept = top_k_indices(coeffs_all, keep);
            kept.sort_unstable();
            let coeffs = kept
                .into_iter()
                .filter(|&i| coeffs_all[i] != 0.0)
                .map(|i| (i as u32, coeffs_all[i]))
                .collect();
            let members = cands
                .iter()
                .map(|&(_, _, c)| (origins[c].0 as u32, origins[c].1 as u32))
                .collect();
            Ok(NlsGroup { members, coeffs })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(NlsCode {
        nx,
        ny,
        frames,
        params: *params,
        groups,
    })
}

pub fn nls_decode(
    params: &NlsParams,
    code: &NlsCode,
    shape: (usize, usize, usize),
) -> Result<MultiFrameSignal> {
    let (nx, ny, frames) = shape;
    if (code.nx, code.ny, code.frames) != shape {
        return Err(ScsError::Decode(format!(
            "code is for {}x{}x{}, requested {nx}x{ny}x{frames}",
            code.nx, code.ny, code.frames
        )));
    }
    if code.params != *params {
        return Err(ScsError::Decode("code was produced with different NLS parameters".into()));
    }
    params.check_frame(nx, ny, frames)?;
    let plans = plans(params, frames)?;
    let block_len = params.block_len(frames);

    let blocks = code
        .groups
        .par_iter()
        .enumerate()
        .map(|(gi, group)| -> Result<ArrayD<f64>> {
            let g = group.members.len();
            if g == 0 || g > params.group_size {
                return Err(ScsError::Decode(format!(
                    "group {gi} has {g} members (group_size {})",
                    params.group_size
                )));
            }
            for &(x, y) in &group.members {
                if x as usize + params.block_w > nx || y as usize + params.block_h > ny {
                    return Err(ScsError::Decode(format!(
                        "group {gi} member at ({x},{y}) falls outside the frame"
                    )));
                }
            }
            let size = block_len * g;
            let mut data = vec![0.0; size];
            for &(idx, v) in &group.coeffs {
                let slot = data.get_mut(idx as usize).ok_or_else(|| {
                    ScsError::Decode(format!("group {gi} coefficient index {idx} out of range {size}"))
                })?;
                *slot = v;
            }
            let mut tensor = ArrayD::from_shape_vec(IxDyn(&[params.block_w, params.block_h, frames, g]), data)
                .expect("group tensor shape");
            plans[g - 1].apply(&mut tensor, true)?;
            Ok(tensor)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sum = vec![0.0; nx * ny * frames];
    let mut count = vec![0u32; nx * ny];
    for (group, tensor) in code.groups.iter().zip(&blocks) {
        let g = group.members.len();
        let flat = tensor.as_slice().expect("standard layout");
        for (m, &(x0, y0)) in group.members.iter().enumerate() {
            let (x0, y0) = (x0 as usize, y0 as usize);
            for dx in 0..params.block_w {
                for dy in 0..params.block_h {
                    let pixel = (y0 + dy) * nx + x0 + dx;
                    count[pixel] += 1;
                    for b in 0..frames {
                        let e = (dx * params.block_h + dy) * frames + b;
                        sum[pixel * frames + b] += flat[e * g + m];
                    }
                }
            }
        }
    }
    for (pixel, &c) in count.iter().enumerate() {
        let slots = &mut sum[pixel * frames..(pixel + 1) * frames];
        if c == 0 {
            slots.iter_mut().for_each(|v| *v = 0.0);
        } else {
            let c = c as f64;
            slots.iter_mut().for_each(|v| *v /= c);
        }
    }
    MultiFrameSignal::new(nx, ny, frames, sum)
}

/// Per-iteration `keep_per_group` schedule for use inside iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum KeepSchedule {
    /// Always use the parameter value.
    #[default]
    Constant,
    /// Linear ramp from `start` to `end` over the first `iters` iterations.
    Linear { start: usize, end: usize, iters: usize },
}

impl KeepSchedule {
    pub fn keep_at(&self, base: usize, iter: usize) -> usize {
        match *self {
            KeepSchedule::Constant => base,
            KeepSchedule::Linear { start, end, iters } => {
                if iters == 0 || iter >= iters {
                    return end;
                }
                let t = iter as f64 / iters as f64;
                (start as f64 + t * (end as f64 - start as f64)).round() as usize
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NlsCodec {
    pub params: NlsParams,
    pub schedule: KeepSchedule,
}

impl NlsCodec {
    pub fn new(params: NlsParams) -> Self {
        NlsCodec {
            params,
            schedule: KeepSchedule::Constant,
        }
    }

    pub fn with_schedule(mut self, schedule: KeepSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn encode(&self, x: &MultiFrameSignal) -> Result<NlsCode> {
        nls_encode(&self.params, x)
    }

    pub fn decode(&self, code: &NlsCode) -> Result<MultiFrameSignal> {
        nls_decode(&self.params, code, (code.nx, code.ny, code.frames))
    }

    fn project_with_keep(&self, s: &MultiFrameSignal, keep: usize) -> Result<MultiFrameSignal> {
        let code = nls_encode_with_keep(&self.params, s, keep)?;
        nls_decode(&self.params, &code, s.shape())
    }
}

impl Codec for NlsCodec {
    fn name(&self) -> &str {
        "nls"
    }

    fn project(&self, s: &MultiFrameSignal) -> Result<MultiFrameSignal> {
        self.project_with_keep(s, self.params.keep(s.frames()))
    }

    fn project_at(&self, s: &MultiFrameSignal, iter: usize) -> Result<MultiFrameSignal> {
        let keep = self.schedule.keep_at(self.params.keep(s.frames()), iter);
        let max = self.params.block_len(s.frames()) * self.params.group_size;
        self.project_with_keep(s, keep.clamp(1, max))
    }

    fn rate_bits(&self, s: &MultiFrameSignal) -> Result<f64> {
        let code = self.encode(s)?;
        let positions = block_origins(s.nx(), s.ny(), &self.params).len();
        let block_len = self.params.block_len(s.frames());
        Ok(code
            .groups
            .iter()
            .map(|g| {
                let coeff = g.coeffs.len() as f64 * (COEFF_BITS + index_bits(block_len * g.members.len()));
                coeff + g.members.len() as f64 * index_bits(positions)
            })
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_frame() {
        assert_eq!(grid_positions(16, 8, 4), vec![0, 4, 8]);
        assert_eq!(grid_positions(10, 8, 4), vec![0, 2]);
        assert_eq!(grid_positions(8, 8, 8), vec![0]);
    }

    #[test]
    fn reference_leads_every_group() {
        let x = MultiFrameSignal::from_fn(16, 16, 2, |x, y, i| ((x * 3 + y * 5 + i) % 7) as f64 / 7.0).unwrap();
        let p = NlsParams {
            group_size: 4,
            ..NlsParams::default()
        };
        let code = nls_encode(&p, &x).unwrap();
        let origins = block_origins(16, 16, &p);
        assert_eq!(code.groups.len(), origins.len());
        for (g, o) in code.groups.iter().zip(&origins) {
            assert_eq!(g.members[0], (o.0 as u32, o.1 as u32));
        }
    }

    #[test]
    fn rejects_oversized_block() {
        let x = MultiFrameSignal::zeros(4, 4, 2);
        assert!(matches!(nls_encode(&NlsParams::default(), &x), Err(ScsError::InvalidParameter(_))));
    }

    #[test]
    fn decode_rejects_malformed_code() {
        let x = MultiFrameSignal::constant(8, 8, 1, 0.5);
        let p = NlsParams {
            group_size: 1,
            stride: 8,
            ..NlsParams::default()
        };
        let mut code = nls_encode(&p, &x).unwrap();
        code.groups[0].coeffs.push((10_000, 1.0));
        assert!(matches!(nls_decode(&p, &code, (8, 8, 1)), Err(ScsError::Decode(_))));
        assert!(matches!(nls_decode(&p, &code, (8, 8, 2)), Err(ScsError::Decode(_))));
    }

    #[test]
    fn schedule_ramps() {
        let s = KeepSchedule::Linear {
            start: 10,
            end: 20,
            iters: 10,
        };
        assert_eq!(s.keep_at(99, 0), 10);
        assert_eq!(s.keep_at(99, 5), 15);
        assert_eq!(s.keep_at(99, 50), 20);
        assert_eq!(KeepSchedule::Constant.keep_at(99, 3), 99);
    }
}
