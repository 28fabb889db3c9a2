//! Separable orthonormal DCT-II on tensors of rank 1 to 4, and top-k hard
//! thresholding.
//!
//! The per-axis transform is a dense `L × L` basis matrix. Block lengths are
//! small, so the `O(L²)` cost per lane is fine and the arithmetic order is
//! fixed, which keeps results bit-reproducible.

use std::cmp::Ordering;
use std::f64::consts::PI;

use ndarray::{ArrayD, Axis, IxDyn};

use crate::error::{Result, ScsError};

pub const MAX_RANK: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Spatial,
    Dct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTensor {
    pub data: ArrayD<f64>,
    pub basis: Basis,
}

impl CoeffTensor {
    pub fn spatial(data: ArrayD<f64>) -> Self {
        CoeffTensor {
            data,
            basis: Basis::Spatial,
        }
    }

    pub fn dct(data: ArrayD<f64>) -> Self {
        CoeffTensor {
            data,
            basis: Basis::Dct,
        }
    }

    pub fn from_shape_vec(shape: &[usize], values: Vec<f64>, basis: Basis) -> Result<Self> {
        let data = ArrayD::from_shape_vec(IxDyn(shape), values)
            .map_err(|e| ScsError::InvalidShape(e.to_string()))?;
        Ok(CoeffTensor { data, basis })
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Orthonormal DCT-II matrix of size `len`, row-major: `m[k * len + n]`.
pub fn dct_matrix(len: usize) -> Vec<f64> {
    let l = len as f64;
    let mut m = Vec::with_capacity(len * len);
    for k in 0..len {
        let scale = if k == 0 { (1.0 / l).sqrt() } else { (2.0 / l).sqrt() };
        for n in 0..len {
            m.push(scale * (PI * (2 * n + 1) as f64 * k as f64 / (2.0 * l)).cos());
        }
    }
    m
}

/// Cached basis matrices for one tensor shape.
#[derive(Debug, Clone)]
pub struct DctPlan {
    shape: Vec<usize>,
    matrices: Vec<Vec<f64>>,
}

impl DctPlan {
    pub fn new(shape: &[usize]) -> Result<Self> {
        if shape.len() > MAX_RANK {
            return Err(ScsError::UnsupportedRank(shape.len()));
        }
        Ok(DctPlan {
            shape: shape.to_vec(),
            matrices: shape.iter().map(|&l| dct_matrix(l)).collect(),
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Applies the forward (or inverse) transform along every axis in place.
    pub fn apply(&self, data: &mut ArrayD<f64>, inverse: bool) -> Result<()> {
        if data.shape() != self.shape.as_slice() {
            return Err(ScsError::InvalidShape(format!(
                "plan built for {:?}, tensor is {:?}",
                self.shape,
                data.shape()
            )));
        }
        for (axis, m) in self.matrices.iter().enumerate() {
            let len = self.shape[axis];
            if len <= 1 {
                continue;
            }
            let mut buf = vec![0.0; len];
            for mut lane in data.lanes_mut(Axis(axis)) {
                for (b, v) in buf.iter_mut().zip(lane.iter()) {
                    *b = *v;
                }
                for (k, out) in lane.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    if inverse {
                        // Transposed basis.
                        for (n, b) in buf.iter().enumerate() {
                            acc += m[n * len + k] * b;
                        }
                    } else {
                        let row = &m[k * len..(k + 1) * len];
                        for (r, b) in row.iter().zip(&buf) {
                            acc += r * b;
                        }
                    }
                    *out = acc;
                }
            }
        }
        Ok(())
    }
}

pub fn dct_forward(t: &CoeffTensor) -> Result<CoeffTensor> {
    if t.basis != Basis::Spatial {
        return Err(ScsError::InvalidArgument(
            "dct_forward expects a spatial-domain tensor".into(),
        ));
    }
    let plan = DctPlan::new(t.data.shape())?;
    let mut data = t.data.clone();
    plan.apply(&mut data, false)?;
    Ok(CoeffTensor::dct(data))
}

pub fn dct_inverse(t: &CoeffTensor) -> Result<CoeffTensor> {
    if t.basis != Basis::Dct {
        return Err(ScsError::InvalidArgument(
            "dct_inverse expects a coefficient-domain tensor".into(),
        ));
    }
    let plan = DctPlan::new(t.data.shape())?;
    let mut data = t.data.clone();
    plan.apply(&mut data, true)?;
    Ok(CoeffTensor::spatial(data))
}

/// Ordering used for top-k selection: larger magnitude first, then lower
/// flat index first.
fn magnitude_order(values: &[f64], a: usize, b: usize) -> Ordering {
    values[b]
        .abs()
        .total_cmp(&values[a].abs())
        .then_with(|| a.cmp(&b))
}

/// Flat indices of the `k` largest-magnitude entries, in selection order.
pub fn top_k_indices(values: &[f64], k: usize) -> Vec<usize> {
    let k = k.min(values.len());
    if k == 0 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, |&a, &b| magnitude_order(values, a, b));
        idx.truncate(k);
    }
    idx.sort_unstable_by(|&a, &b| magnitude_order(values, a, b));
    idx
}

/// Zeroes all but the `k` largest-magnitude entries of `values`.
pub fn keep_top_k_in_place(values: &mut [f64], k: usize) {
    if k >= values.len() {
        return;
    }
    let mut keep = vec![false; values.len()];
    for i in top_k_indices(values, k) {
        keep[i] = true;
    }
    for (v, keep) in values.iter_mut().zip(keep) {
        if !keep {
            *v = 0.0;
        }
    }
}

pub fn keep_top_k(t: &CoeffTensor, k: usize) -> CoeffTensor {
    let mut out = t.clone();
    match out.data.as_slice_mut() {
        Some(s) => keep_top_k_in_place(s, k),
        None => {
            let mut flat: Vec<f64> = out.data.iter().copied().collect();
            keep_top_k_in_place(&mut flat, k);
            for (o, v) in out.data.iter_mut().zip(flat) {
                *o = v;
            }
        }
    }
    out
}
