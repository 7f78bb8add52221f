//! Multiscale decomposition, reconstruction, compression and smoothing of
//! manifold-valued sequences.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: points, tangent vectors and `⊕`/`⊖` on Euclidean space,
//!   the unit sphere and the rotation group.
//! * [`averaging`]: Karcher means, base-point means and kernel smoothing.
//! * [`schemes`]: linear filters and the geometric Haar, interpolating and
//!   midpoint-interpolating up/downscaling rules with detail extraction.
//! * [`pyramid`]: multi-level decomposition, reconstruction, thresholding
//!   and quantization.
//! * [`analysis`]: numerical experiments (detail decay, proximity,
//!   contractivity, stability, Jacobian rank, smoothing convergence).

pub mod analysis;
pub mod averaging;
pub mod error;
pub mod geometry;
pub mod pyramid;
pub mod schemes;

pub use error::{Error, Result};
pub use geometry::{Manifold, Point, Tangent};
