//! Snapshot compressive sensing.
//!
//! A snapshot system collapses `B` frames into one measurement frame,
//! `y = Σᵢ Dᵢ xᵢ + z`, with diagonal masks `Dᵢ`. This crate provides the
//! structured operator, compression codes used as projections, the
//! compression-based recovery algorithms built on them (exhaustive
//! compressible-signal pursuit, projected gradient descent and generalized
//! alternating projection), and a Monte Carlo lab that checks the
//! accompanying concentration and convergence bounds at desk scale.

pub mod bounds;
pub mod cli;
pub mod codecs;
pub mod error;
pub mod io;
pub mod rng;
pub mod sensing;
pub mod signal;
pub mod solvers;
pub mod transforms;

pub use error::{Result, ScsError};
pub use rng::RngSpec;
pub use sensing::{MaskDistribution, MaskStack, Measurement};
pub use signal::MultiFrameSignal;
