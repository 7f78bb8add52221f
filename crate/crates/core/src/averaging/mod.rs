//! Weighted geometric averages.
//!
//! A weighted mean `m` of points `x_j` with affine weights `α_j` solves
//! `∑ α_j (x_j ⊖ m) = 0`. [`weighted_mean`] finds it by the fixed-point
//! iteration `m ← m ⊕ ∑ α_j (x_j ⊖ m)`; [`basepoint_mean`] evaluates the
//! single-step variant `x ⊕ ∑ α_j (x_j ⊖ x)` at a caller-chosen base.

mod kernel;

pub use kernel::{discretize, kernel_smooth, Kernel, KernelShape, Placement, SmoothingOptions};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, ominus, oplus, Point, Tangent};

/// Affine weights (sum 1 within `1e-12`); negative entries are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !sum.is_finite() || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights { sum });
        }
        Ok(WeightVector(weights))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(WeightVector(vec![1.0 / n as f64; n]))
    }

    /// Rescales arbitrary finite weights with nonzero sum to sum 1.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !sum.is_finite() || sum == 0.0 {
            return Err(Error::InvalidWeights { sum });
        }
        Ok(WeightVector(weights.into_iter().map(|w| w / sum).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Stopping rule for the Karcher fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KarcherOptions {
    /// Residual tolerance, scaled by `1 + diameter` of the data.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for KarcherOptions {
    fn default() -> Self {
        KarcherOptions { tolerance: 1e-12, max_iterations: 100 }
    }
}

fn check_inputs(points: &[Point], weights: &WeightVector) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.len() != weights.len() {
        return Err(Error::WeightCount { points: points.len(), weights: weights.len() });
    }
    let m = points[0].manifold();
    for (i, p) in points.iter().enumerate() {
        m.check(p.manifold()).map_err(|e| e.at_index(i))?;
    }
    Ok(())
}

fn affine_combination(points: &[Point], weights: &WeightVector) -> Option<Point> {
    let Point::Euclidean(first) = &points[0] else { return None };
    let mut acc = DVector::zeros(first.len());
    for (p, &w) in points.iter().zip(weights.as_slice()) {
        let Point::Euclidean(x) = p else { return None };
        acc.axpy(w, x, 1.0);
    }
    Some(Point::Euclidean(acc))
}

/// `∑ α_j (x_j ⊖ base)`, a tangent vector at `base`.
pub fn weighted_log_sum(points: &[Point], weights: &WeightVector, base: &Point) -> Result<Tangent> {
    let mut acc = Tangent::zero(base);
    for (i, (p, &w)) in points.iter().zip(weights.as_slice()).enumerate() {
        if w == 0.0 {
            continue;
        }
        let v = ominus(p, base).map_err(|e| e.at_index(i))?;
        acc.axpy(w, &v)?;
    }
    Ok(acc)
}

/// Karcher mean with default options; see [`weighted_mean_with`].
pub fn weighted_mean(points: &[Point], weights: &WeightVector, init: Option<&Point>) -> Result<Point> {
    weighted_mean_with(points, weights, init, &KarcherOptions::default())
}

/// Weighted geometric mean solving `∑ α_j (x_j ⊖ m) = 0`.
///
/// Starts from `init` (or the first point) and iterates
/// `m ← m ⊕ ∑ α_j (x_j ⊖ m)` until the residual norm is at most
/// `tolerance · (1 + diameter)`, then takes that last step. On Euclidean
/// data the affine average is returned directly.
pub fn weighted_mean_with(
    points: &[Point],
    weights: &WeightVector,
    init: Option<&Point>,
    opts: &KarcherOptions,
) -> Result<Point> {
    check_inputs(points, weights)?;
    if let Some(m) = affine_combination(points, weights) {
        return Ok(m);
    }
    let mut m = init.cloned().unwrap_or_else(|| points[0].clone());
    points[0].manifold().check(m.manifold())?;

    // 2·max dist(x_j, x_0) bounds the diameter from above
    let mut radius: f64 = 0.0;
    for (i, p) in points.iter().enumerate().skip(1) {
        radius = radius.max(distance(&points[0], p).map_err(|e| e.at_index(i))?);
    }
    let tol = opts.tolerance * (1.0 + 2.0 * radius);

    let mut residual = f64::INFINITY;
    for _ in 0..=opts.max_iterations {
        let step = weighted_log_sum(points, weights, &m)?;
        residual = step.norm();
        if residual <= tol {
            return oplus(&m, &step);
        }
        m = oplus(&m, &step)?;
    }
    Err(Error::KarcherNoConvergence { iterations: opts.max_iterations, residual })
}

/// Base-point mean `base ⊕ ∑ α_j (x_j ⊖ base)`; a single evaluation.
pub fn basepoint_mean(points: &[Point], weights: &WeightVector, base: &Point) -> Result<Point> {
    check_inputs(points, weights)?;
    points[0].manifold().check(base.manifold())?;
    if let Some(m) = affine_combination(points, weights) {
        return Ok(m);
    }
    oplus(base, &weighted_log_sum(points, weights, base)?)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use nalgebra::Vector3;
    use proptest::prelude::*;

    use super::*;
    use crate::geometry::{geodesic_midpoint, so3};

    fn e(v: &[f64]) -> Point {
        Point::euclidean(v).unwrap()
    }

    fn s(x: f64, y: f64, z: f64) -> Point {
        Point::sphere_normalized(Vector3::new(x, y, z)).unwrap()
    }

    #[test]
    fn weights_must_be_affine() {
        assert!(matches!(WeightVector::new(vec![0.5, 0.4]), Err(Error::InvalidWeights { .. })));
        assert!(WeightVector::new(vec![-0.5, 1.5]).is_ok());
        assert_eq!(WeightVector::normalized(vec![2.0, 2.0]).unwrap().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn euclidean_mean_is_affine_average() {
        let pts = [e(&[0.0, 0.0]), e(&[2.0, 0.0]), e(&[0.0, 2.0])];
        let m = weighted_mean(&pts, &WeightVector::uniform(3).unwrap(), None).unwrap();
        assert!(m.ambient_distance(&e(&[2.0 / 3.0, 2.0 / 3.0])) < 1e-15);
    }

    #[test]
    fn constant_data_mean() {
        for p in [e(&[1.0, -2.0]), s(0.2, 0.1, 0.9), Point::Rotation(so3::rot_x(0.4))] {
            let pts = vec![p.clone(); 4];
            let w = WeightVector::new(vec![0.1, 0.6, -0.2, 0.5]).unwrap();
            assert!(weighted_mean(&pts, &w, None).unwrap().ambient_distance(&p) < 1e-15);
        }
    }

    #[test]
    fn sphere_two_point_mean() {
        let pts = [s(1.0, 0.0, 0.0), s(0.0, 1.0, 0.0)];
        let m = weighted_mean(&pts, &WeightVector::uniform(2).unwrap(), None).unwrap();
        let h = 0.5f64.sqrt();
        assert!(m.ambient_distance(&s(h, h, 0.0)) < 1e-12);
    }

    #[test]
    fn basepoint_examples() {
        let w = WeightVector::uniform(2).unwrap();
        let m = basepoint_mean(&[e(&[1.0, 1.0]), e(&[3.0, 3.0])], &w, &e(&[-7.0, 4.0])).unwrap();
        assert_eq!(m, e(&[2.0, 2.0]));

        let pts = [s(0.3, 0.1, 0.9), s(0.0, 1.0, 0.2), s(1.0, 0.0, 0.0)];
        let full = WeightVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(basepoint_mean(&pts, &full, &pts[0]).unwrap().ambient_distance(&pts[0]) < 1e-15);

        let m = basepoint_mean(&[s(1.0, 0.0, 0.0), s(0.0, 1.0, 0.0)], &w, &s(1.0, 0.0, 0.0)).unwrap();
        assert!(m.ambient_distance(&s(FRAC_PI_4.cos(), FRAC_PI_4.sin(), 0.0)) < 1e-15);
    }

    #[test]
    fn non_convergence_is_reported() {
        let pts = [s(1.0, 0.0, 0.0), s(0.0, 1.0, 0.0), s(0.0, 0.0, 1.0)];
        let w = WeightVector::uniform(3).unwrap();
        let opts = KarcherOptions { tolerance: 1e-12, max_iterations: 1 };
        assert!(matches!(
            weighted_mean_with(&pts, &w, None, &opts),
            Err(Error::KarcherNoConvergence { iterations: 1, .. })
        ));
    }

    #[test]
    fn input_errors() {
        assert_eq!(weighted_mean(&[], &WeightVector::uniform(1).unwrap(), None), Err(Error::EmptyInput));
        let w = WeightVector::uniform(2).unwrap();
        assert!(matches!(weighted_mean(&[e(&[1.0])], &w, None), Err(Error::WeightCount { .. })));
        let mixed = [e(&[1.0, 0.0, 0.0]), s(1.0, 0.0, 0.0)];
        assert!(weighted_mean(&mixed, &w, None).unwrap_err().index() == Some(1));
        let antipodal = [s(1.0, 0.0, 0.0), s(-1.0, 0.0, 0.0)];
        assert!(matches!(weighted_mean(&antipodal, &w, None).unwrap_err().root(), Error::CutLocus(_)));
    }

    fn near_sphere_points(n: usize) -> impl Strategy<Value = Vec<Point>> {
        proptest::collection::vec((-0.4..0.4f64, -0.4..0.4f64), n)
            .prop_map(|offs| offs.into_iter().map(|(a, b)| s(a, b, 1.0)).collect())
    }

    proptest! {
        #[test]
        fn residual_vanishes_and_permutation_invariant(pts in near_sphere_points(5),
                                                        raw in proptest::collection::vec(0.05..1.0f64, 5)) {
            let w = WeightVector::normalized(raw.clone()).unwrap();
            let m = weighted_mean(&pts, &w, None).unwrap();
            prop_assert!(weighted_log_sum(&pts, &w, &m).unwrap().norm() <= 1e-12 * 3.0);
            let mut rev_p = pts.clone();
            rev_p.reverse();
            let mut rev_w = raw;
            rev_w.reverse();
            let m2 = weighted_mean(&rev_p, &WeightVector::normalized(rev_w).unwrap(), None).unwrap();
            prop_assert!(m.ambient_distance(&m2) < 1e-12);
        }

        #[test]
        fn two_point_mean_is_midpoint(pts in near_sphere_points(2)) {
            let m = weighted_mean(&pts, &WeightVector::uniform(2).unwrap(), None).unwrap();
            prop_assert!(m.ambient_distance(&geodesic_midpoint(&pts[0], &pts[1]).unwrap()) < 1e-10);
        }

        #[test]
        fn rotation_mean_residual(angles in proptest::collection::vec((-0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64), 4)) {
            let pts: Vec<Point> = angles.iter()
                .map(|&(a, b, c)| Point::Rotation(so3::exp(&Vector3::new(a, b, c))))
                .collect();
            let w = WeightVector::new(vec![-0.1, 0.4, 0.4, 0.3]).unwrap();
            let m = weighted_mean(&pts, &w, None).unwrap();
            prop_assert!(weighted_log_sum(&pts, &w, &m).unwrap().norm() <= 1e-12 * 4.0);
        }
    }
}
