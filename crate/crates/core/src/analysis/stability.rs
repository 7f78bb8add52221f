use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curves::random_tangent;
use crate::error::{Error, Result};
use crate::geometry::{distance, oplus};
use crate::pyramid::Pyramid;
use crate::schemes::{PointSeq, Scheme, TangentSeq};

/// Perturbation budget `‖c⁰ − c̃⁰‖ ≤ E₁`, `‖d^k − d̃^k‖ ≤ E₂ μ^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    pub levels: usize,
    pub trials: usize,
    pub e1: f64,
    pub e2: f64,
    pub mu: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub config: StabilityConfig,
    /// `E₁ + ∑_{k ≤ j} E₂ μ^k` for `j = 0, …, J`.
    pub budget: Vec<f64>,
    /// `sup` over trials of `sup_i dist(c^j_i, c̃^j_i)`, `j = 0, …, J`.
    pub deviation: Vec<f64>,
    /// Trials whose reconstruction left the injectivity domain.
    pub excluded: usize,
    /// `max` over trials of the finest-level deviation over the total budget.
    pub d_hat: f64,
}

fn sup_distance(a: &PointSeq, b: &PointSeq) -> Result<f64> {
    let mut out: f64 = 0.0;
    for (i, (p, q)) in a.points().iter().zip(b.points()).enumerate() {
        out = out.max(distance(p, q).map_err(|e| e.at_index(i))?);
    }
    Ok(out)
}

/// Perturbs the pyramid of `c` at the budget boundary in uniformly random
/// directions and measures the reconstruction deviation on every level.
pub fn stability_experiment(c: &PointSeq, scheme: &Scheme, cfg: &StabilityConfig) -> Result<StabilityReport> {
    if !(cfg.e1 >= 0.0 && cfg.e2 >= 0.0 && cfg.mu > 0.0 && cfg.mu < 1.0) {
        return Err(Error::InvalidArgument("budgets must be nonnegative and μ must lie in (0, 1)".into()));
    }
    let pyramid = Pyramid::decompose(c, scheme, cfg.levels)?;
    let reference = pyramid.reconstruct_levels()?;
    let mut budget = vec![cfg.e1];
    for k in 1..=cfg.levels {
        budget.push(budget[k - 1] + cfg.e2 * cfg.mu.powi(k as i32));
    }

    let trials: Vec<Option<Vec<f64>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(t as u64));
            let perturbed = perturb(&pyramid, cfg, &mut rng)?;
            let levels = match perturbed.reconstruct_levels() {
                Ok(l) => l,
                Err(_) => return Ok(None),
            };
            let devs = reference.iter().zip(&levels).map(|(a, b)| sup_distance(a, b)).collect::<Result<Vec<_>>>();
            Ok(devs.ok())
        })
        .collect::<Result<_>>()?;

    let mut deviation = vec![0.0f64; cfg.levels + 1];
    let mut excluded = 0;
    for t in &trials {
        match t {
            Some(devs) => {
                for (d, x) in deviation.iter_mut().zip(devs) {
                    *d = d.max(*x);
                }
            }
            None => excluded += 1,
        }
    }
    let total = budget[cfg.levels];
    let d_hat = if total > 0.0 { deviation[cfg.levels] / total } else { 0.0 };
    Ok(StabilityReport { config: *cfg, budget, deviation, excluded, d_hat })
}

fn perturb(p: &Pyramid, cfg: &StabilityConfig, rng: &mut ChaCha8Rng) -> Result<Pyramid> {
    let coarse =
        p.coarse().points().iter().map(|x| oplus(x, &random_tangent(x, cfg.e1, rng))).collect::<Result<Vec<_>>>()?;
    let coarse = PointSeq::new(coarse, p.coarse().is_periodic())?;
    let manifold = p.manifold();
    let mut details = Vec::with_capacity(p.levels());
    for (i, d) in p.details().iter().enumerate() {
        let norm = cfg.e2 * cfg.mu.powi(i as i32 + 1);
        let vectors = d
            .vectors()
            .iter()
            .map(|v| {
                let base = v.base().unwrap_or_else(|| manifold.reference_point());
                v.add(&random_tangent(&base, norm, rng))
            })
            .collect::<Result<Vec<_>>>()?;
        details.push(TangentSeq::new(vectors)?);
    }
    Pyramid::from_parts(p.scheme().clone(), coarse, details)
}

#[cfg(test)]
mod tests {
    use nalgebra::DVector;

    use super::*;
    use crate::analysis::curves::{random_loop, warped_circle_samples};
    use crate::geometry::{Manifold, Point, Tangent};
    use crate::schemes::Seq;

    fn cfg(levels: usize, e: f64) -> StabilityConfig {
        StabilityConfig { levels, trials: 8, e1: e, e2: e, mu: 0.5, seed: 42 }
    }

    #[test]
    fn zero_perturbation() {
        let c = warped_circle_samples(32, 0.2).unwrap();
        let r = stability_experiment(&c, &Scheme::midpoint_haar(), &cfg(3, 0.0)).unwrap();
        assert!(r.deviation.iter().all(|&d| d < 1e-14));
        assert_eq!(r.excluded, 0);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let c = warped_circle_samples(32, 0.2).unwrap();
        let a = stability_experiment(&c, &Scheme::haar(), &cfg(3, 1e-3)).unwrap();
        let b = stability_experiment(&c, &Scheme::haar(), &cfg(3, 1e-3)).unwrap();
        assert_eq!(a, b);
        assert!(a.d_hat > 0.0 && a.d_hat <= 1.0 + 1e-9);
    }

    #[test]
    fn euclidean_haar_propagates_linearly() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = random_loop(Manifold::Euclidean(2), 32, 0.3, &mut rng).unwrap();
        let scheme = Scheme::haar();
        let p = Pyramid::decompose(&c, &scheme, 3).unwrap();
        let q = perturb(&p, &cfg(3, 0.1), &mut rng).unwrap();
        let diff = |a: &Point, b: &Point| DVector::from_vec(a.coords()) - DVector::from_vec(b.coords());
        let tdiff = |a: &Tangent, b: &Tangent| {
            DVector::from_column_slice(a.as_slice()) - DVector::from_column_slice(b.as_slice())
        };
        let lin = scheme.kind.linear();
        let mut e =
            Seq::periodic(q.coarse().points().iter().zip(p.coarse().points()).map(|(a, b)| diff(a, b)).collect());
        for (dq, dp) in q.details().iter().zip(p.details()) {
            let dd = Seq::periodic(dq.vectors().iter().zip(dp.vectors()).map(|(a, b)| tdiff(a, b)).collect());
            e = lin.reconstruct(&e, &dd).unwrap();
        }
        let rq = q.reconstruct().unwrap();
        for ((a, b), x) in rq.points().iter().zip(c.points()).zip(&e.values) {
            assert!((diff(a, b) - x).amax() < 1e-13);
        }
    }
}
