use rayon::prelude::*;
use serde::Serialize;

use super::chart::Chart;
use crate::averaging::{kernel_smooth, Kernel, SmoothingOptions};
use crate::error::Result;
use crate::geometry::{distance, Point};

/// Step of the central differences used for derivatives.
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothingRow {
    pub rho: f64,
    /// `sup_u dist(f^ρ(u), f(u))`.
    pub point_error: f64,
    /// `sup_u ‖(f^ρ)'(u) − f'(u)‖` in the chart at `f(u)`.
    pub derivative_error: f64,
}

/// Compares `f^ρ` with `f` at the parameters `params` for each `ρ`.
pub fn smoothing_convergence<F>(
    f: F,
    kernel: &Kernel,
    rhos: &[f64],
    params: &[f64],
    opts: &SmoothingOptions,
) -> Result<Vec<SmoothingRow>>
where
    F: Fn(f64) -> Point + Sync,
{
    let f = &f;
    rhos.iter()
        .map(|&rho| {
            let errors = params
                .par_iter()
                .map(|&u| {
                    let smooth = |t: f64| kernel_smooth(f, kernel, rho, t, opts);
                    let chart = Chart::new(f(u));
                    let point_error = distance(&smooth(u)?, chart.base())?;
                    let derivative = |a: Point, b: Point| -> Result<Vec<f64>> {
                        let (xa, xb) = (chart.coords(&a)?, chart.coords(&b)?);
                        Ok(xa.iter().zip(&xb).map(|(p, q)| (p - q) / (2.0 * FD_STEP)).collect())
                    };
                    let ds = derivative(smooth(u + FD_STEP)?, smooth(u - FD_STEP)?)?;
                    let df = derivative(f(u + FD_STEP), f(u - FD_STEP))?;
                    let derivative_error = ds.iter().zip(&df).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    Ok((point_error, derivative_error))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SmoothingRow {
                rho,
                point_error: errors.iter().map(|e| e.0).fold(0.0, f64::max),
                derivative_error: errors.iter().map(|e| e.1).fold(0.0, f64::max),
            })
        })
        .collect()
}

/// Consecutive `(point, derivative)` error ratios.
pub fn halving_ratios(rows: &[SmoothingRow]) -> Vec<(f64, f64)> {
    rows.windows(2)
        .map(|w| (w[1].point_error / w[0].point_error, w[1].derivative_error / w[0].derivative_error))
        .collect()
}
