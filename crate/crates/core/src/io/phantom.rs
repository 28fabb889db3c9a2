use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Result, ScsError};
use crate::rng::RngSpec;
use crate::signal::MultiFrameSignal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhantomKind {
    /// A `size × size` square of value `value` on a zero background,
    /// moving right by `stride` pixels per frame. It starts at the
    /// left-most position that keeps the whole path centred.
    MovingSquare { size: usize, stride: usize, value: f64 },
    /// `k` non-zero values shared by all frames, each frame placing them
    /// at its own random pixels; frame norms are at most 1.
    ShiftingSparse { k: usize },
    Constant { value: f64 },
}

impl PhantomKind {
    pub fn moving_square() -> Self {
        PhantomKind::MovingSquare {
            size: 8,
            stride: 1,
            value: 1.0,
        }
    }
}

pub fn make_phantom(kind: PhantomKind, shape: (usize, usize, usize), rng: RngSpec) -> Result<MultiFrameSignal> {
    let (nx, ny, b) = shape;
    crate::signal::check_dims(nx, ny, b)?;
    let x = match kind {
        PhantomKind::Constant { value } => {
            if !value.is_finite() {
                return Err(ScsError::InvalidParameter(format!("constant value {value}")));
            }
            MultiFrameSignal::constant(nx, ny, b, value)
        }
        PhantomKind::MovingSquare { size, stride, value } => {
            let path = size + stride * (b - 1);
            if size == 0 || path > nx || size > ny {
                return Err(ScsError::InvalidParameter(format!(
                    "a {size}px square moving {stride}px over {b} frames does not fit in {nx}x{ny}"
                )));
            }
            let x0 = (nx - path) / 2;
            let y0 = (ny - size) / 2;
            MultiFrameSignal::from_fn(nx, ny, b, |x, y, t| {
                let left = x0 + stride * t;
                if (left..left + size).contains(&x) && (y0..y0 + size).contains(&y) {
                    value
                } else {
                    0.0
                }
            })?
        }
        PhantomKind::ShiftingSparse { k } => {
            let n = nx * ny;
            if k == 0 || k > n {
                return Err(ScsError::InvalidParameter(format!("sparsity {k} must lie in 1..={n}")));
            }
            let mut r = rng.rng();
            let mut values: Vec<f64> = (0..k).map(|_| r.random_range(0.1..=1.0)).collect();
            let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1.0 {
                values.iter_mut().for_each(|v| *v /= norm);
            }
            let mut x = MultiFrameSignal::zeros(nx, ny, b);
            let data = x.data_mut();
            for t in 0..b {
                for (pixel, v) in sample(&mut r, n, k).into_iter().zip(&values) {
                    data[pixel * b + t] = *v;
                }
            }
            x
        }
    };
    if x.data().iter().all(|v| (0.0..=1.0).contains(v)) {
        x.into_normalized()
    } else {
        Ok(x)
    }
}
