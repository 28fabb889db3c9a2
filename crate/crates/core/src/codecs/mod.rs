//! Compression codes used as projections.
//!
//! The recovery algorithms only ever need the composed map `g(f(·))`, so a
//! [`Codec`] is first and foremost a projection from signal space onto its
//! codebook. Rate accounting is attached so codes can be compared on a
//! rate-distortion plane.

mod nls;
mod rate;
mod simple;
mod toy;

pub use nls::{nls_decode, nls_encode, KeepSchedule, NlsCode, NlsCodec, NlsGroup, NlsParams};
pub use rate::{estimate_rate_distortion, fit_alpha_dimension, RateDistortion};
pub use simple::{Dct3dCodec, IdentityCodec, TopKCodec};
pub use toy::{
    build_quantized_sparse_codec, random_grid_codebook, CodecDescriptor, EnumerableCodebook,
    QuantizedSparseFamily, MAX_ENUMERABLE,
};

use crate::error::Result;
use crate::signal::MultiFrameSignal;

pub trait Codec: Send + Sync {
    fn name(&self) -> &str;

    /// `g(f(s))`.
    fn project(&self, s: &MultiFrameSignal) -> Result<MultiFrameSignal>;

    /// Projection used at solver iteration `iter`. Codes with a quality
    /// schedule override this; the default ignores the iteration.
    fn project_at(&self, s: &MultiFrameSignal, iter: usize) -> Result<MultiFrameSignal> {
        let _ = iter;
        self.project(s)
    }

    /// Number of bits the code spends describing `s`.
    fn rate_bits(&self, s: &MultiFrameSignal) -> Result<f64>;

    /// The codebook, when the code is small enough to enumerate.
    fn codebook(&self) -> Option<&EnumerableCodebook> {
        None
    }
}

impl<C: Codec + ?Sized> Codec for &C {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn project(&self, s: &MultiFrameSignal) -> Result<MultiFrameSignal> {
        (**self).project(s)
    }

    fn project_at(&self, s: &MultiFrameSignal, iter: usize) -> Result<MultiFrameSignal> {
        (**self).project_at(s, iter)
    }

    fn rate_bits(&self, s: &MultiFrameSignal) -> Result<f64> {
        (**self).rate_bits(s)
    }

    fn codebook(&self) -> Option<&EnumerableCodebook> {
        (**self).codebook()
    }
}

impl<C: Codec + ?Sized> Codec for Box<C> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn project(&self, s: &MultiFrameSignal) -> Result<MultiFrameSignal> {
        (**self).project(s)
    }

    fn project_at(&self, s: &MultiFrameSignal, iter: usize) -> Result<MultiFrameSignal> {
        (**self).project_at(s, iter)
    }

    fn rate_bits(&self, s: &MultiFrameSignal) -> Result<f64> {
        (**self).rate_bits(s)
    }

    fn codebook(&self) -> Option<&EnumerableCodebook> {
        (**self).codebook()
    }
}
