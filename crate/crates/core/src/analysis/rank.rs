use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::chart::Chart;
use super::curves::random_loop;
use crate::error::{Error, Result};
use crate::geometry::{ominus, Manifold};
use crate::schemes::{average_downscale, average_upscale, Filter, PointSeq, Scheme};

/// Central-difference Jacobian of `f` at `x`.
pub fn numerical_jacobian<F>(f: F, x: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let rows = f(x)?.len();
    let columns = (0..x.len())
        .into_par_iter()
        .map(|j| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(&xp)?, f(&xm)?);
            Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(rows, x.len(), |i, j| columns[j][i]))
}

/// Singular values (descending) and the number exceeding `tau·σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, tau: f64) -> (Vec<f64>, usize) {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let cut = tau * s.first().copied().unwrap_or(0.0);
    let rank = s.iter().filter(|&&x| x > cut).count();
    (s, rank)
}

/// The up/downscaling pair whose residual map is examined.
#[derive(Debug, Clone, PartialEq)]
pub enum RankPair {
    Scheme(Scheme),
    /// Geometric cubic B-spline upscaling `(1, 4, 6, 4, 1)/8` on `−2..=2`
    /// paired with geometric decimation `(1, 2, 1)/4` on `−1..=1`, both by
    /// Karcher means.
    GenericAveraging,
}

impl RankPair {
    pub fn name(&self) -> String {
        match self {
            RankPair::Scheme(s) => s.kind.name().to_string(),
            RankPair::GenericAveraging => "generic-averaging".to_string(),
        }
    }

    fn up_down(&self, c: &PointSeq) -> Result<PointSeq> {
        match self {
            RankPair::Scheme(s) => s.upscale(&s.downscale(c)?),
            RankPair::GenericAveraging => {
                let up = Filter::new(-2, vec![0.125, 0.5, 0.75, 0.5, 0.125])?;
                let down = Filter::new(-1, vec![0.25, 0.5, 0.25])?;
                let opts = Default::default();
                average_upscale(&up, &average_downscale(&down, c, &opts)?, &opts)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankConfig {
    /// Half the period; data has `2n` entries.
    pub n: usize,
    /// Step bound of the random base configuration.
    pub step: f64,
    pub seed: u64,
    pub h: f64,
    pub tau: f64,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig { n: 4, step: 0.1, seed: 0, h: 1e-5, tau: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub pair: String,
    pub manifold: String,
    pub n: usize,
    pub dim: usize,
    /// `n·dim M`.
    pub target: usize,
    pub singular_values: Vec<f64>,
    /// Rank of `c ↦ c ⊖ S D c`.
    pub rank: usize,
    /// Rank of `c ↦ S D c`.
    pub projection_rank: usize,
    /// Rank of the identity map through the same chart; must be `2n·dim M`.
    pub identity_rank: usize,
    pub verdict: String,
}

/// Numerical rank of `c ↦ c ⊖ S D c` at a random periodic configuration of
/// length `2n`, in chart coordinates at its Karcher mean.
pub fn rank_experiment(pair: &RankPair, manifold: Manifold, cfg: &RankConfig) -> Result<RankReport> {
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("period half-length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let c = random_loop(manifold, 2 * cfg.n, cfg.step, &mut rng)?;
    let chart = Chart::at_mean(c.points())?;
    let d = chart.dim();
    let x0: Vec<f64> = c.points().iter().map(|p| chart.coords(p)).collect::<Result<Vec<_>>>()?.concat();
    let to_seq = |x: &[f64]| -> Result<PointSeq> {
        PointSeq::periodic(x.chunks(d).map(|xi| chart.point(xi)).collect::<Result<Vec<_>>>()?)
    };

    let identity = |x: &[f64]| -> Result<Vec<f64>> {
        Ok(to_seq(x)?.points().iter().map(|p| chart.coords(p)).collect::<Result<Vec<_>>>()?.concat())
    };
    let (_, identity_rank) = numerical_rank(&numerical_jacobian(identity, &x0, cfg.h)?, cfg.tau);

    let projection = |x: &[f64]| -> Result<Vec<f64>> {
        let sd = pair.up_down(&to_seq(x)?)?;
        Ok(sd.points().iter().map(|p| chart.coords(p)).collect::<Result<Vec<_>>>()?.concat())
    };
    let (_, projection_rank) = numerical_rank(&numerical_jacobian(projection, &x0, cfg.h)?, cfg.tau);

    let residual = |x: &[f64]| -> Result<Vec<f64>> {
        let c = to_seq(x)?;
        let sd = pair.up_down(&c)?;
        let mut out = Vec::with_capacity(x.len());
        for (p, q) in c.points().iter().zip(sd.points()) {
            out.extend(chart.tangent_coords(&ominus(p, q)?)?);
        }
        Ok(out)
    };
    let (singular_values, rank) = numerical_rank(&numerical_jacobian(residual, &x0, cfg.h)?, cfg.tau);

    let target = cfg.n * d;
    let verdict = if identity_rank != 2 * target {
        "identity self-check failed"
    } else if rank == target {
        "matches n·dim M"
    } else if rank > target {
        "exceeds n·dim M"
    } else {
        "below n·dim M"
    };
    Ok(RankReport {
        pair: pair.name(),
        manifold: manifold.to_string(),
        n: cfg.n,
        dim: d,
        target,
        singular_values,
        rank,
        projection_rank,
        identity_rank,
        verdict: verdict.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_known_matrices() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0]);
        assert_eq!(numerical_rank(&m, 1e-8).1, 2);
        let j = numerical_jacobian(|x| Ok(vec![x[0] * x[1], x[0] + x[1]]), &[2.0, 3.0], 1e-5).unwrap();
        assert!((j - DMatrix::from_row_slice(2, 2, &[3.0, 2.0, 1.0, 1.0])).amax() < 1e-9);
    }

    #[test]
    fn euclidean_haar_residual_has_half_rank() {
        let r =
            rank_experiment(&RankPair::Scheme(Scheme::haar()), Manifold::Euclidean(2), &RankConfig::default()).unwrap();
        assert_eq!(r.identity_rank, 16);
        assert_eq!(r.rank, 8);
        assert!(r.projection_rank <= 8);
        assert_eq!(r.verdict, "matches n·dim M");
    }
}
