//! Synthetic test data.

use std::f64::consts::TAU;

use clap::ValueEnum;
use geowave::analysis::curves::{great_circle, random_tangent, screw, small_circle, warped_great_circle};
use geowave::geometry::oplus;
use geowave::schemes::PointSeq;
use geowave::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// `(cos kθ, sin kθ, 0)`.
    GreatCircle,
    /// `rot_z(kθ)`.
    So3Screw,
    NoisyGreatCircle,
    NoisySo3Screw,
}

/// Default noise radius of the noisy kinds.
pub const DEFAULT_NOISE: f64 = 0.01;

/// `count` samples with spacing `step` (default `2π/count`, a closed loop).
///
/// Noisy kinds move each sample by a tangent vector in a uniform random
/// direction with norm uniform in `[0, noise]`.
pub fn synth(kind: SynthKind, count: usize, step: Option<f64>, noise: Option<f64>, seed: u64) -> CliResult<PointSeq> {
    if count == 0 {
        return Err(CliError::new("synth", "count must be positive"));
    }
    let theta = step.unwrap_or(TAU / count as f64);
    if !theta.is_finite() {
        return Err(CliError::new("synth", "step must be finite"));
    }
    let noisy = matches!(kind, SynthKind::NoisyGreatCircle | SynthKind::NoisySo3Screw);
    let noise = match (noisy, noise) {
        (true, n) => n.unwrap_or(DEFAULT_NOISE),
        (false, None) => 0.0,
        (false, Some(_)) => return Err(CliError::new("synth", "--noise needs a noisy-* kind")),
    };
    if !(0.0..1.0).contains(&noise) {
        return Err(CliError::new("synth", format!("noise must lie in [0, 1), got {noise}")));
    }
    let base = |k: usize| -> Point {
        let t = k as f64 * theta;
        match kind {
            SynthKind::GreatCircle | SynthKind::NoisyGreatCircle => great_circle(t),
            SynthKind::So3Screw | SynthKind::NoisySo3Screw => screw(t, 0.0),
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count)
        .map(|k| {
            let p = base(k);
            if noise == 0.0 {
                return Ok(p);
            }
            let r = noise * rng.random::<f64>();
            let v = random_tangent(&p, r, &mut rng);
            oplus(&p, &v).map_err(|e| CliError::core("synth", e.at_index(k)))
        })
        .collect::<CliResult<Vec<_>>>()?;
    PointSeq::periodic(points).map_err(|e| CliError::core("synth", e))
}

/// Closed analytic curves with period `2π` for the curve-based analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    GreatCircle,
    /// Great circle at speed `1 + 0.3 cos t`.
    WarpedGreatCircle,
    /// Latitude 45°.
    SmallCircle,
    /// `rot_z(t)·rot_x(t/2)`.
    So3Screw,
}

impl CurveKind {
    pub fn eval(self, t: f64) -> Point {
        match self {
            CurveKind::GreatCircle => great_circle(t),
            CurveKind::WarpedGreatCircle => warped_great_circle(t, 0.3),
            CurveKind::SmallCircle => small_circle(t, std::f64::consts::FRAC_PI_4),
            CurveKind::So3Screw => screw(t, 0.5),
        }
    }
}

#[cfg(test)]
mod tests {
    use geowave::geometry::{distance, so3};
    use nalgebra::Vector3;

    use super::*;

    #[test]
    fn great_circle_is_equispaced() {
        let c = synth(SynthKind::GreatCircle, 8, None, None, 0).unwrap();
        assert_eq!(c.len(), 8);
        for (k, p) in c.points().iter().enumerate() {
            let Point::Sphere(x) = p else { panic!() };
            assert!((x.norm() - 1.0).abs() < 1e-15);
            assert_eq!(x.z, 0.0);
            let next = &c.points()[(k + 1) % 8];
            assert!((distance(p, next).unwrap() - TAU / 8.0).abs() < 1e-12);
        }
        let Point::Sphere(x0) = &c.points()[0] else { panic!() };
        assert_eq!(*x0, Vector3::x());
    }

    #[test]
    fn screw_is_rot_z() {
        let c = synth(SynthKind::So3Screw, 4, Some(0.2), None, 0).unwrap();
        for (k, p) in c.points().iter().enumerate() {
            assert_eq!(*p, Point::Rotation(so3::rot_z(0.2 * k as f64)));
        }
    }

    #[test]
    fn zero_noise_is_noiseless() {
        assert_eq!(
            synth(SynthKind::NoisyGreatCircle, 8, None, Some(0.0), 9).unwrap(),
            synth(SynthKind::GreatCircle, 8, None, None, 0).unwrap()
        );
    }

    #[test]
    fn noise_is_bounded_and_seeded() {
        for (noisy, clean) in
            [(SynthKind::NoisyGreatCircle, SynthKind::GreatCircle), (SynthKind::NoisySo3Screw, SynthKind::So3Screw)]
        {
            let a = synth(noisy, 16, None, Some(0.05), 4).unwrap();
            let b = synth(noisy, 16, None, Some(0.05), 4).unwrap();
            let c = synth(clean, 16, None, None, 0).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, synth(noisy, 16, None, Some(0.05), 5).unwrap());
            for (p, q) in a.points().iter().zip(c.points()) {
                assert!(distance(p, q).unwrap() <= 0.05 + 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(synth(SynthKind::GreatCircle, 0, None, None, 0).is_err());
        assert!(synth(SynthKind::GreatCircle, 8, None, Some(0.1), 0).is_err());
        assert!(synth(SynthKind::NoisyGreatCircle, 8, None, Some(-0.1), 0).is_err());
    }
}
