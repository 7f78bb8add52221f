use nalgebra::DVector;
use serde::Serialize;

use super::chart::Chart;
use super::curves::sample_closed;
use super::fitted_ratio;
use crate::error::{Error, Result};
use crate::geometry::{geodesic_midpoint, Point};
use crate::pyramid::Pyramid;
use crate::schemes::{PointSeq, Scheme, SchemeKind, Seq};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelDecay {
    pub level: usize,
    /// `‖d^j‖ = sup_k ‖d^j_k‖`.
    pub detail_sup: f64,
    /// `‖d^j‖ / ‖d^{j−1}‖`.
    pub ratio: Option<f64>,
    /// `sup_k ‖c^j_{k+1} ⊖ c^j_k‖`.
    pub step_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub levels: Vec<LevelDecay>,
    /// Fitted geometric ratio of the detail norms; `None` when fewer than
    /// two levels carry nonzero details.
    pub mu_hat: Option<f64>,
}

impl DecayReport {
    /// `(j, ‖d^{j+1}‖/‖d^j‖)` for every level with a defined ratio.
    pub fn ratios(&self) -> Vec<(usize, f64)> {
        self.levels.iter().filter_map(|l| l.ratio.map(|r| (l.level - 1, r))).collect()
    }
}

/// Decomposes `c` and tabulates detail and step norms per level.
pub fn detail_decay(c: &PointSeq, scheme: &Scheme, levels: usize) -> Result<DecayReport> {
    let p = Pyramid::decompose(c, scheme, levels)?;
    let data = p.reconstruct_levels()?;
    let mut out: Vec<LevelDecay> = Vec::with_capacity(levels);
    for (i, d) in p.details().iter().enumerate() {
        let detail_sup = d.sup_norm();
        let ratio = out.last().and_then(|prev| (prev.detail_sup > 0.0).then(|| detail_sup / prev.detail_sup));
        let step_sup = data[i + 1].max_step().map_err(|e| e.at_level(i + 1))?;
        out.push(LevelDecay { level: i + 1, detail_sup, ratio, step_sup });
    }
    let samples: Vec<(f64, f64)> = out.iter().map(|l| (l.level as f64, l.detail_sup)).collect();
    Ok(DecayReport { mu_hat: fitted_ratio(&samples), levels: out })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProximityRow {
    pub halving: usize,
    pub len: usize,
    /// `‖Δc‖` in chart coordinates.
    pub step: f64,
    /// `sup ‖S c − S_lin c‖` in chart coordinates.
    pub upscale_deviation: f64,
    pub upscale_ratio: f64,
    /// `sup ‖D c − D_lin c‖` in chart coordinates.
    pub downscale_deviation: f64,
    pub downscale_ratio: f64,
}

fn chart_seq(chart: &Chart, c: &PointSeq) -> Result<Seq<DVector<f64>>> {
    let values = c
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| chart.coords(p).map(DVector::from_vec).map_err(|e| e.at_index(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Seq::periodic(values))
}

fn sup_diff(a: &Seq<DVector<f64>>, b: &Seq<DVector<f64>>) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn ratio(num: f64, step: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / (step * step)
    }
}

/// Compares geometric and linear up/downscaling in a chart at the Karcher
/// mean of `len·2^h` samples of the closed curve `f` (period `period`),
/// `h = 0, …, halvings`.
pub fn proximity_ratio<F>(f: F, period: f64, len: usize, scheme: &Scheme, halvings: usize) -> Result<Vec<ProximityRow>>
where
    F: Fn(f64) -> Point,
{
    let lin = scheme.kind.linear();
    (0..=halvings)
        .map(|h| {
            let n = len << h;
            let c = sample_closed(&f, period, n)?;
            let chart = Chart::at_mean(c.points())?;
            let x = chart_seq(&chart, &c)?;
            let step =
                x.values.iter().enumerate().map(|(k, v)| (&x.values[(k + 1) % n] - v).norm()).fold(0.0, f64::max);
            let up = sup_diff(&chart_seq(&chart, &scheme.upscale(&c)?)?, &lin.upscale(&x)?);
            let down = sup_diff(&chart_seq(&chart, &scheme.downscale(&c)?)?, &lin.downscale(&x)?);
            Ok(ProximityRow {
                halving: h,
                len: n,
                step,
                upscale_deviation: up,
                upscale_ratio: ratio(up, step),
                downscale_deviation: down,
                downscale_ratio: ratio(down, step),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractivityReport {
    /// `‖Δ S^i c‖` for `i = 0, …, N`.
    pub steps: Vec<f64>,
    /// Fitted ratio; `0` when the data is constant.
    pub mu_hat: f64,
}

/// Largest initial step for which contraction is asserted.
pub const CONTRACTIVITY_GUARD: f64 = 0.2;

/// Iterates the scheme's interpolatory subdivision `N` times and fits the
/// decay of the step size.
///
/// Interpolating schemes are iterated directly. For Haar and
/// midpoint-interpolating schemes repeated upscaling reproduces steps, so the
/// companion `S̃ = ½(L + id)S` is used: `(S̃c)_i = μ((Sc)_i, (Sc)_{i+1})`.
pub fn contractivity_estimate(scheme: &Scheme, c: &PointSeq, iterations: usize) -> Result<ContractivityReport> {
    let first = c.max_step()?;
    if first > CONTRACTIVITY_GUARD {
        return Err(Error::InvalidArgument(format!(
            "initial step {first} exceeds the contractivity guard {CONTRACTIVITY_GUARD}"
        )));
    }
    let mut steps = vec![first];
    let mut current = c.clone();
    for i in 0..iterations {
        current = companion_upscale(scheme, &current).map_err(|e| e.at_level(i + 1))?;
        steps.push(current.max_step()?);
    }
    let samples: Vec<(f64, f64)> = steps.iter().enumerate().map(|(i, &s)| (i as f64, s)).collect();
    let mu_hat = match fitted_ratio(&samples) {
        Some(mu) => mu,
        None if steps.iter().all(|&s| s == 0.0) => 0.0,
        None => f64::NAN,
    };
    if mu_hat.is_nan() || mu_hat >= 1.0 {
        return Err(Error::NotContractive { mu_hat, steps });
    }
    Ok(ContractivityReport { steps, mu_hat })
}

fn companion_upscale(scheme: &Scheme, c: &PointSeq) -> Result<PointSeq> {
    let up = scheme.upscale(c)?;
    if let SchemeKind::Interpolating { .. } = scheme.kind {
        return Ok(up);
    }
    let n = up.len();
    let pts = up.points();
    let out = (0..n)
        .map(|i| geodesic_midpoint(&pts[i], &pts[(i + 1) % n]).map_err(|e| e.at_index(i)))
        .collect::<Result<Vec<_>>>()?;
    PointSeq::periodic(out)
}
