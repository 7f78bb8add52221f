//! Linear filter rules and the geometric Haar, interpolating and
//! midpoint-interpolating schemes.

pub mod filter;
pub mod geometric;
pub mod linear;

pub use filter::Filter;
pub use geometric::{
    average_downscale, average_upscale, interpolatory_from_midpoint, PointSeq, Scheme, SchemeKind, TangentSeq,
};
pub use linear::{linear_downscale, linear_upscale, shift, LinearScheme, Seq, VectorLike};
