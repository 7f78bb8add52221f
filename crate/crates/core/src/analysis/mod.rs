//! Numerical experiments: detail decay, proximity, contractivity,
//! stability constants, Jacobian rank and smoothing convergence.
//!
//! Every randomized experiment takes an explicit seed; trials run in
//! parallel and are collected in trial order.

pub mod chart;
pub mod curves;
mod decay;
mod rank;
mod smoothing;
mod stability;

pub use chart::{tangent_basis, Chart};
pub use decay::{
    contractivity_estimate, detail_decay, proximity_ratio, ContractivityReport, DecayReport, LevelDecay, ProximityRow,
};
pub use rank::{numerical_jacobian, numerical_rank, rank_experiment, RankConfig, RankPair, RankReport};
pub use smoothing::{halving_ratios, smoothing_convergence, SmoothingRow, FD_STEP};
pub use stability::{stability_experiment, StabilityConfig, StabilityReport};

/// `exp` of the least-squares slope of `ln y` against `x`, over the pairs
/// with `y > 0`; `None` with fewer than two such pairs.
pub fn fitted_ratio(samples: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples.iter().filter(|(_, y)| *y > 0.0).map(|&(x, y)| (x, y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some((sxy / sxx).exp())
}
