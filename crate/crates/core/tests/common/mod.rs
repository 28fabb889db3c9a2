#![allow(dead_code)]

use snapcs::{MaskStack, MultiFrameSignal};

/// Frame-major vectorization `[x₁; x₂; …; x_B]`, each frame row-major.
pub fn stack_frames(x: &MultiFrameSignal) -> Vec<f64> {
    (0..x.frames()).flat_map(|i| x.frame(i)).collect()
}

/// `H = [D₁, …, D_B]` as a dense `n × nB` matrix acting on [`stack_frames`].
pub fn dense_h(masks: &MaskStack) -> Vec<Vec<f64>> {
    let (nx, ny, b) = masks.shape();
    let n = nx * ny;
    let mut h = vec![vec![0.0; n * b]; n];
    for y in 0..ny {
        for x in 0..nx {
            let j = y * nx + x;
            for i in 0..b {
                h[j][i * n + j] = masks.diag()[j * b + i];
            }
        }
    }
    h
}

pub fn matvec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(a, v)| a * v).sum()).collect()
}

pub fn matvec_t(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.first().map_or(0, Vec::len)];
    for (row, vj) in a.iter().zip(v) {
        for (o, aij) in out.iter_mut().zip(row) {
            *o += aij * vj;
        }
    }
    out
}

/// `A Aᵀ`.
pub fn gram(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .map(|ri| a.iter().map(|rj| ri.iter().zip(rj).map(|(p, q)| p * q).sum()).collect())
        .collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, v)| r.iter().copied().chain([*v]).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / piv;
            if f != 0.0 {
                for k in c..=n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}

/// `10·log₁₀(1/MSE)`.
pub fn psnr(a: &MultiFrameSignal, b: &MultiFrameSignal) -> f64 {
    let mse = a.data().iter().zip(b.data()).map(|(p, q)| (p - q) * (p - q)).sum::<f64>() / a.len() as f64;
    10.0 * (1.0 / mse).log10()
}

/// Per-pixel least-norm consistent signal `x_{ij} = D_{ij} y_j / R_j`,
/// zero where `R_j = 0`.
pub fn backprojection(masks: &MaskStack, y: &[f64]) -> MultiFrameSignal {
    let (nx, ny, b) = masks.shape();
    MultiFrameSignal::from_fn(nx, ny, b, |x, yy, i| {
        let j = yy * nx + x;
        let d = &masks.diag()[j * b..(j + 1) * b];
        let r: f64 = d.iter().map(|v| v * v).sum();
        if r == 0.0 {
            0.0
        } else {
            d[i] * y[j] / r
        }
    })
    .unwrap()
}
