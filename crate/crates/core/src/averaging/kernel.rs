//! Kernel smoothing `f ⊛ ψ^ρ` of curves `f: R → M` and the sampling operator
//! that turns a continuous curve into level-`j` data.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{weighted_mean_with, KarcherOptions, WeightVector};
use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelShape {
    /// `½·1_{[−1,1]}`
    Box,
    /// `1 − |s|` on `[−1,1]`
    Hat,
}

/// Where the kernel mass sits relative to the evaluation parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Symmetric about `u`: averages over `[u − ρ, u + ρ]`.
    Centered,
    /// Compressed onto `[−1, 0]`: averages over `[u, u + ρ]`.
    #[default]
    Forward,
}

/// Nonnegative unit-mass kernel supported in `[−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kernel {
    pub shape: KernelShape,
    pub placement: Placement,
}

impl Kernel {
    /// Centered box kernel `½·1_{[−1,1]}`.
    pub fn box_kernel() -> Self {
        Kernel { shape: KernelShape::Box, placement: Placement::Centered }
    }

    /// Centered hat kernel.
    pub fn hat() -> Self {
        Kernel { shape: KernelShape::Hat, placement: Placement::Centered }
    }

    /// Box average over the cell `[u, u + ρ]`.
    pub fn cell_average() -> Self {
        Kernel { shape: KernelShape::Box, placement: Placement::Forward }
    }

    pub fn with_placement(self, placement: Placement) -> Self {
        Kernel { placement, ..self }
    }

    fn profile(&self, s: f64) -> f64 {
        if !(-1.0..=1.0).contains(&s) {
            return 0.0;
        }
        match self.shape {
            KernelShape::Box => 0.5,
            KernelShape::Hat => 1.0 - s.abs(),
        }
    }

    /// `ψ(s)`.
    pub fn eval(&self, s: f64) -> f64 {
        match self.placement {
            Placement::Centered => self.profile(s),
            Placement::Forward => {
                if (-1.0..=0.0).contains(&s) {
                    2.0 * self.profile(2.0 * s + 1.0)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self.placement {
            Placement::Centered => (-1.0, 1.0),
            Placement::Forward => (-1.0, 0.0),
        }
    }

    /// Midpoint-rule nodes and unnormalized weights over the support.
    fn nodes(&self, count: usize) -> Vec<(f64, f64)> {
        let (a, b) = self.support();
        let h = (b - a) / count as f64;
        (0..count)
            .map(|i| {
                let s = a + (i as f64 + 0.5) * h;
                (s, self.eval(s) * h)
            })
            .filter(|&(_, w)| w > 0.0)
            .collect()
    }

    /// `∫ψ` by the composite midpoint rule.
    pub fn mass(&self, nodes: usize) -> f64 {
        self.nodes(nodes).iter().map(|&(_, w)| w).sum()
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::box_kernel()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingOptions {
    /// Number of midpoint quadrature nodes over the kernel support.
    pub nodes: usize,
    pub karcher: KarcherOptions,
}

impl Default for SmoothingOptions {
    fn default() -> Self {
        SmoothingOptions { nodes: 64, karcher: KarcherOptions::default() }
    }
}

/// `f^ρ(u)`: the point `m` with `∫ (f(x) ⊖ m) ψ^ρ(u − x) dx = 0`.
///
/// The integral is discretized with the composite midpoint rule on the
/// kernel support (`x = u − ρ s`), the quadrature weights are renormalized
/// to sum 1 and the resulting weighted mean is solved.
pub fn kernel_smooth<F>(f: F, kernel: &Kernel, rho: f64, u: f64, opts: &SmoothingOptions) -> Result<Point>
where
    F: Fn(f64) -> Point,
{
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("smoothing radius must be positive, got {rho}")));
    }
    if opts.nodes == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
    }
    let nodes = kernel.nodes(opts.nodes);
    let points: Vec<Point> = nodes.iter().map(|&(s, _)| f(u - rho * s)).collect();
    let weights = WeightVector::normalized(nodes.iter().map(|&(_, w)| w).collect())?;
    weighted_mean_with(&points, &weights, None, &opts.karcher)
}

/// Level-`j` data `c_k = f^ρ(k·2^{−j})` with `ρ = 2^{−j}` for `k` in `indices`.
///
/// With [`Kernel::cell_average`] each sample is the mean of `f` over the
/// cell `2^{−j}·[k, k+1]`.
pub fn discretize<F>(
    f: F,
    kernel: &Kernel,
    level: u32,
    indices: Range<i64>,
    opts: &SmoothingOptions,
) -> Result<Vec<Point>>
where
    F: Fn(f64) -> Point,
{
    let h = 0.5f64.powi(level as i32);
    indices
        .enumerate()
        .map(|(i, k)| kernel_smooth(&f, kernel, h, k as f64 * h, opts).map_err(|e| e.at_index(i)))
        .collect()
}
