//! Multi-level decomposition into coarse data and detail levels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Manifold, Tangent};
use crate::schemes::{PointSeq, Scheme, TangentSeq};

/// Coarse data `c⁰` and details `d¹, …, d^J`, where `d^k` has
/// `2^{k−1}·|c⁰|` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    scheme: Scheme,
    coarse: PointSeq,
    details: Vec<TangentSeq>,
}

impl Pyramid {
    pub fn from_parts(scheme: Scheme, coarse: PointSeq, details: Vec<TangentSeq>) -> Result<Self> {
        scheme.kind.validate()?;
        let mut expected = coarse.len();
        for (i, d) in details.iter().enumerate() {
            let level = i + 1;
            coarse.manifold().check(d.manifold()).map_err(|e| e.at_level(level))?;
            if d.len() != expected {
                return Err(Error::LengthMismatch { expected, found: d.len() }.at_level(level));
            }
            expected *= 2;
        }
        Ok(Pyramid { scheme, coarse, details })
    }

    pub fn into_parts(self) -> (Scheme, PointSeq, Vec<TangentSeq>) {
        (self.scheme, self.coarse, self.details)
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn manifold(&self) -> Manifold {
        self.coarse.manifold()
    }

    pub fn coarse(&self) -> &PointSeq {
        &self.coarse
    }

    /// `details()[k − 1]` is `d^k`.
    pub fn details(&self) -> &[TangentSeq] {
        &self.details
    }

    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Splits `c` into `J = levels` detail levels and coarse data.
    pub fn decompose(c: &PointSeq, scheme: &Scheme, levels: usize) -> Result<Pyramid> {
        scheme.kind.validate()?;
        if levels == 0 {
            return Err(Error::InvalidArgument("at least one level is required".into()));
        }
        if levels >= usize::BITS as usize || !c.len().is_multiple_of(1usize << levels) {
            return Err(Error::IndivisibleLength { len: c.len(), levels });
        }
        let mut current = c.clone();
        let mut details = Vec::with_capacity(levels);
        for j in (1..=levels).rev() {
            let coarse = scheme.downscale(&current).map_err(|e| e.at_level(j))?;
            details.push(scheme.details(&current, &coarse).map_err(|e| e.at_level(j))?);
            current = coarse;
        }
        details.reverse();
        Ok(Pyramid { scheme: scheme.clone(), coarse: current, details })
    }

    /// `c^J`.
    pub fn reconstruct(&self) -> Result<PointSeq> {
        Ok(self.reconstruct_levels()?.pop().unwrap_or_else(|| self.coarse.clone()))
    }

    /// `c⁰, c¹, …, c^J`.
    pub fn reconstruct_levels(&self) -> Result<Vec<PointSeq>> {
        let mut out = Vec::with_capacity(self.details.len() + 1);
        out.push(self.coarse.clone());
        for (i, d) in self.details.iter().enumerate() {
            let next = self.scheme.detail_recon(out.last().unwrap(), d).map_err(|e| e.at_level(i + 1))?;
            out.push(next);
        }
        Ok(out)
    }

    /// Zeroes details whose norm lies below the threshold of their level.
    pub fn threshold(&self, rule: ThresholdRule) -> Result<(Pyramid, ThresholdReport)> {
        rule.validate()?;
        let mut out = self.clone();
        let mut levels = Vec::with_capacity(self.details.len());
        for (i, d) in out.details.iter_mut().enumerate() {
            let level = i + 1;
            let eps = rule.threshold(level);
            let mut stats = LevelThreshold {
                level,
                threshold: eps,
                kept: 0,
                zeroed: 0,
                zeroed_norm_sum: 0.0,
                max_zeroed_norm: 0.0,
            };
            for v in d.vectors_mut() {
                let n = v.norm();
                if n < eps {
                    if n > 0.0 {
                        *v = v.scale(0.0);
                    }
                    stats.zeroed += 1;
                    stats.zeroed_norm_sum += n;
                    stats.max_zeroed_norm = stats.max_zeroed_norm.max(n);
                } else {
                    stats.kept += 1;
                }
            }
            levels.push(stats);
        }
        Ok((out, ThresholdReport { levels }))
    }

    /// Rounds each stored detail coordinate to a multiple of `step`.
    ///
    /// Sphere details are projected back onto their tangent plane after
    /// rounding, which does not increase the perturbation.
    pub fn quantize(&self, step: f64) -> Result<(Pyramid, QuantizeReport)> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("quantization step must be positive, got {step}")));
        }
        let bound = 0.5 * step * (self.manifold().tangent_len() as f64).sqrt();
        let round = |x: f64| (x / step).round() * step;
        let mut out = self.clone();
        let mut levels = Vec::with_capacity(self.details.len());
        for (i, d) in out.details.iter_mut().enumerate() {
            let mut max_perturbation: f64 = 0.0;
            for v in d.vectors_mut() {
                let q = match &*v {
                    Tangent::Euclidean(x) => Tangent::Euclidean(x.map(round)),
                    Tangent::Rotation(x) => Tangent::Rotation(x.map(round)),
                    Tangent::Sphere { base, vec } => {
                        let r = vec.map(round);
                        Tangent::Sphere { base: *base, vec: r - base * base.dot(&r) }
                    }
                };
                max_perturbation = max_perturbation.max(q.sub(v)?.norm());
                *v = q;
            }
            levels.push(LevelQuantization { level: i + 1, max_perturbation, bound });
        }
        Ok((out, QuantizeReport { step, levels }))
    }
}

/// Threshold applied to detail norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ThresholdRule {
    /// The same `eps` on every level.
    Absolute { eps: f64 },
    /// `eps·μ^k` on level `k`.
    Geometric { eps: f64, mu: f64 },
}

impl ThresholdRule {
    fn validate(&self) -> Result<()> {
        let (eps, mu) = match *self {
            ThresholdRule::Absolute { eps } => (eps, 0.5),
            ThresholdRule::Geometric { eps, mu } => (eps, mu),
        };
        if eps.is_nan() || eps < 0.0 {
            return Err(Error::InvalidArgument(format!("threshold must be nonnegative, got {eps}")));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidArgument(format!("ratio must lie in (0, 1), got {mu}")));
        }
        Ok(())
    }

    pub fn threshold(&self, level: usize) -> f64 {
        match *self {
            ThresholdRule::Absolute { eps } => eps,
            ThresholdRule::Geometric { eps, mu } => eps * mu.powi(level as i32),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelThreshold {
    pub level: usize,
    pub threshold: f64,
    pub kept: usize,
    pub zeroed: usize,
    pub zeroed_norm_sum: f64,
    pub max_zeroed_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub levels: Vec<LevelThreshold>,
}

impl ThresholdReport {
    pub fn kept(&self) -> usize {
        self.levels.iter().map(|l| l.kept).sum()
    }

    pub fn zeroed(&self) -> usize {
        self.levels.iter().map(|l| l.zeroed).sum()
    }

    /// `∑_k sup ‖d^k − d̃^k‖`.
    pub fn perturbation_budget(&self) -> f64 {
        self.levels.iter().map(|l| l.max_zeroed_norm).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelQuantization {
    pub level: usize,
    pub max_perturbation: f64,
    /// `½·step·√(stored coordinates)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantizeReport {
    pub step: f64,
    pub levels: Vec<LevelQuantization>,
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::analysis::curves::random_loop;
    use crate::geometry::{distance, Point};

    fn e1(v: &[f64]) -> PointSeq {
        PointSeq::periodic(v.iter().map(|&x| Point::euclidean(&[x]).unwrap()).collect()).unwrap()
    }

    fn values(d: &TangentSeq) -> Vec<f64> {
        d.vectors().iter().map(|v| v.as_slice()[0]).collect()
    }

    fn max_dist(a: &PointSeq, b: &PointSeq) -> f64 {
        a.points().iter().zip(b.points()).map(|(p, q)| distance(p, q).unwrap()).fold(0.0, f64::max)
    }

    #[test]
    fn haar_by_hand() {
        let c = e1(&[1.0, 3.0, 5.0, 7.0]);
        let p = Pyramid::decompose(&c, &Scheme::haar(), 2).unwrap();
        assert_eq!(p.coarse(), &e1(&[4.0]));
        assert_eq!(values(&p.details()[0]), vec![-2.0]);
        assert_eq!(values(&p.details()[1]), vec![-1.0, -1.0]);
        assert_eq!(p.reconstruct().unwrap(), c);

        let rebuilt = Pyramid::from_parts(
            Scheme::haar(),
            e1(&[4.0]),
            vec![
                TangentSeq::new(vec![Tangent::Euclidean(nalgebra::dvector![-2.0])]).unwrap(),
                TangentSeq::new(vec![Tangent::Euclidean(nalgebra::dvector![-1.0]); 2]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(rebuilt.reconstruct().unwrap(), c);
    }

    #[test]
    fn argument_errors() {
        let c = e1(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(Pyramid::decompose(&c, &Scheme::haar(), 2), Err(Error::IndivisibleLength { len: 6, levels: 2 }));
        assert!(Pyramid::decompose(&c, &Scheme::haar(), 0).is_err());
        let p = Pyramid::decompose(&c, &Scheme::haar(), 1).unwrap();
        assert!(p.threshold(ThresholdRule::Absolute { eps: -1.0 }).is_err());
        assert!(p.threshold(ThresholdRule::Geometric { eps: 1.0, mu: 1.0 }).is_err());
        assert!(p.quantize(0.0).is_err());
        let (scheme, coarse, mut details) = p.into_parts();
        details.push(details[0].clone());
        assert!(Pyramid::from_parts(scheme, coarse, details).unwrap_err().level() == Some(2));
    }

    #[test]
    fn failures_carry_the_level() {
        // antipodal neighbours at the finest level
        let pts = vec![
            Point::sphere_normalized(nalgebra::Vector3::new(1.0, 0.0, 0.0)).unwrap(),
            Point::sphere_normalized(nalgebra::Vector3::new(-1.0, 0.0, 0.0)).unwrap(),
        ];
        let c = PointSeq::periodic([pts.clone(), pts].concat()).unwrap();
        let err = Pyramid::decompose(&c, &Scheme::haar(), 2).unwrap_err();
        assert_eq!(err.level(), Some(2));
        assert_eq!(err.index(), Some(0));
        assert!(matches!(err.root(), Error::CutLocus(_)));
    }

    #[test]
    fn threshold_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_loop(Manifold::Sphere2, 16, 0.2, &mut rng).unwrap();
        let p = Pyramid::decompose(&c, &Scheme::haar(), 3).unwrap();
        let (same, report) = p.threshold(ThresholdRule::Absolute { eps: 0.0 }).unwrap();
        assert_eq!(same, p);
        assert_eq!(report.zeroed(), 0);
        let (none, report) = p.threshold(ThresholdRule::Absolute { eps: f64::INFINITY }).unwrap();
        assert_eq!(report.kept(), 0);
        let mut up = p.coarse().clone();
        for _ in 0..3 {
            up = p.scheme().upscale(&up).unwrap();
        }
        assert!(max_dist(&none.reconstruct().unwrap(), &up) < 1e-14);
        let levels: Vec<_> = report.levels.iter().map(|l| l.kept + l.zeroed).collect();
        assert_eq!(levels, vec![2, 4, 8]);
    }

    #[test]
    fn quantization() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in [Manifold::Euclidean(2), Manifold::Sphere2, Manifold::SO3] {
            let c = random_loop(m, 16, 0.3, &mut rng).unwrap();
            let p = Pyramid::decompose(&c, &Scheme::four_point(), 2).unwrap();
            let (q, report) = p.quantize(1e-3).unwrap();
            for l in &report.levels {
                assert!(l.max_perturbation <= l.bound + 1e-15);
            }
            for (a, b) in p.details().iter().zip(q.details()) {
                for (v, w) in a.vectors().iter().zip(b.vectors()) {
                    assert!(w.sub(v).unwrap().norm() <= report.levels[0].bound + 1e-15);
                }
            }
            let (_, tiny) = p.quantize(1e-300).unwrap();
            assert!(tiny.levels.iter().all(|l| l.max_perturbation < 1e-16));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn round_trip_and_level_sizes(seed in any::<u64>(), levels in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for m in [Manifold::Euclidean(3), Manifold::Sphere2, Manifold::SO3] {
                let c = random_loop(m, 16, 0.3, &mut rng).unwrap();
                for s in [Scheme::haar(), Scheme::four_point(), Scheme::midpoint_haar()] {
                    let p = Pyramid::decompose(&c, &s, levels).unwrap();
                    for (k, d) in p.details().iter().enumerate() {
                        prop_assert_eq!(d.len(), p.coarse().len() << k);
                    }
                    prop_assert!(max_dist(&p.reconstruct().unwrap(), &c) < 1e-9);
                }
            }
        }

        #[test]
        fn monotone_compression(seed in any::<u64>(), a in 0.0..0.3f64, b in 0.0..0.3f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_loop(Manifold::Sphere2, 32, 0.3, &mut rng).unwrap();
            let p = Pyramid::decompose(&c, &Scheme::haar(), 4).unwrap();
            let (lo, hi) = (a.min(b), a.max(b));
            let kept_lo = p.threshold(ThresholdRule::Absolute { eps: lo }).unwrap().1.kept();
            let kept_hi = p.threshold(ThresholdRule::Absolute { eps: hi }).unwrap().1.kept();
            prop_assert!(kept_hi <= kept_lo);
        }
    }
}
