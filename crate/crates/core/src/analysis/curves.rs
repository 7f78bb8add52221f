//! Test curves and random admissible data.

use std::f64::consts::TAU;

use nalgebra::{DVector, Vector3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use super::chart::{tangent_basis, Chart};
use crate::error::{Error, Result};
use crate::geometry::{so3, Manifold, Point, Tangent};
use crate::schemes::PointSeq;

/// Unit vector in `R^d`, uniformly distributed on the sphere.
fn random_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Tangent vector at `p` of norm `norm` in a uniformly random direction.
pub fn random_tangent<R: Rng + ?Sized>(p: &Point, norm: f64, rng: &mut R) -> Tangent {
    let basis = tangent_basis(p);
    let dir = random_direction(basis.len(), rng);
    let mut v = Tangent::zero(p);
    for (a, e) in dir.iter().zip(&basis) {
        v.axpy(norm * a, e).expect("basis shares the base point");
    }
    v
}

/// A random point: Gaussian in Euclidean space, uniform on the sphere, and
/// `exp(v)` with `‖v‖ ≤ 3` on SO3.
pub fn random_point<R: Rng + ?Sized>(manifold: Manifold, rng: &mut R) -> Point {
    match manifold {
        Manifold::Euclidean(n) => Point::Euclidean(DVector::from_fn(n, |_, _| rng.sample(StandardNormal))),
        Manifold::Sphere2 => Point::Sphere(Vector3::from_column_slice(&random_direction(3, rng))),
        Manifold::SO3 => {
            let axis = Vector3::from_column_slice(&random_direction(3, rng));
            let angle = Uniform::new(0.0, 3.0).expect("valid range").sample(rng);
            Point::Rotation(so3::exp(&(axis * angle)))
        }
    }
}

/// Random closed walk of `len` points around a random base point whose
/// steps (including the wrap-around step) are at most `max_step`.
///
/// Steps are drawn in a chart at the base and re-centred so the walk
/// closes; the backends have nonnegative curvature, so geodesic steps are
/// no longer than chart steps.
pub fn random_loop<R: Rng + ?Sized>(manifold: Manifold, len: usize, max_step: f64, rng: &mut R) -> Result<PointSeq> {
    if len == 0 {
        return Err(Error::EmptyInput);
    }
    if !(max_step >= 0.0 && max_step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step bound must be nonnegative, got {max_step}")));
    }
    let chart = Chart::new(random_point(manifold, rng));
    let d = chart.dim();
    let radius = Uniform::new_inclusive(0.0, 0.5 * max_step).expect("valid range");
    let mut steps: Vec<Vec<f64>> = (0..len)
        .map(|_| {
            let r = radius.sample(rng);
            random_direction(d, rng).into_iter().map(|x| r * x).collect()
        })
        .collect();
    let mean_step: Vec<f64> = (0..d).map(|i| steps.iter().map(|s| s[i]).sum::<f64>() / len as f64).collect();
    for s in &mut steps {
        for (x, m) in s.iter_mut().zip(&mean_step) {
            *x -= m;
        }
    }
    let mut pos = vec![vec![0.0; d]; len];
    for k in 1..len {
        pos[k] = pos[k - 1].iter().zip(&steps[k - 1]).map(|(a, b)| a + b).collect();
    }
    let centre: Vec<f64> = (0..d).map(|i| pos.iter().map(|x| x[i]).sum::<f64>() / len as f64).collect();
    let points = pos
        .iter()
        .map(|x| {
            let y: Vec<f64> = x.iter().zip(&centre).map(|(a, c)| a - c).collect();
            chart.point(&y)
        })
        .collect::<Result<Vec<_>>>()?;
    PointSeq::periodic(points)
}

/// Unit-speed great circle in the `xy`-plane.
pub fn great_circle(t: f64) -> Point {
    Point::Sphere(Vector3::new(t.cos(), t.sin(), 0.0))
}

/// The great circle traversed with non-uniform speed `φ(t) = t + a·sin t`
/// (`|a| < 1`); closed with period `2π`.
pub fn warped_great_circle(t: f64, amplitude: f64) -> Point {
    great_circle(t + amplitude * t.sin())
}

/// Circle of constant latitude `lat` (radians), period `2π`.
pub fn small_circle(t: f64, lat: f64) -> Point {
    Point::Sphere(Vector3::new(lat.cos() * t.cos(), lat.cos() * t.sin(), lat.sin()))
}

/// `rot_z(t)·rot_x(κt)`.
pub fn screw(t: f64, kappa: f64) -> Point {
    Point::Rotation(so3::rot_z(t) * so3::rot_x(kappa * t))
}

/// `len` samples `f(k·period/len)` as a periodic sequence.
pub fn sample_closed(f: impl Fn(f64) -> Point, period: f64, len: usize) -> Result<PointSeq> {
    PointSeq::periodic((0..len).map(|k| f(k as f64 * period / len as f64)).collect())
}

/// `len` equispaced samples of the warped great circle over one period.
pub fn warped_circle_samples(len: usize, amplitude: f64) -> Result<PointSeq> {
    sample_closed(|t| warped_great_circle(t, amplitude), TAU, len)
}

/// Closed curve through the entries of a periodic sequence, geodesic
/// between neighbours; entry `k` sits at `t = k/len` and the period is `1`.
#[derive(Debug, Clone)]
pub struct GeodesicPolygon {
    points: Vec<Point>,
    steps: Vec<Tangent>,
}

impl GeodesicPolygon {
    pub fn new(c: &PointSeq) -> Result<Self> {
        let pts = c.points();
        let n = pts.len();
        let steps = (0..n)
            .map(|k| crate::geometry::ominus(&pts[(k + 1) % n], &pts[k]).map_err(|e| e.at_index(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeodesicPolygon { points: pts.to_vec(), steps })
    }

    pub fn eval(&self, t: f64) -> Point {
        let n = self.points.len();
        let x = t.rem_euclid(1.0) * n as f64;
        let k = (x.floor() as usize).min(n - 1);
        let s = x - k as f64;
        crate::geometry::oplus(&self.points[k], &self.steps[k].scale(s))
            .expect("steps lie inside the injectivity radius")
    }
}
