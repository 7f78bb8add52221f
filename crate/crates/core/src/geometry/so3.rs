//! Closed-form exponential and logarithm on SO(3).
//!
//! Lie-algebra elements are axis-angle 3-vectors identified with skew
//! matrices through [`hat`] / [`vee`].

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use super::CUT_LOCUS_MARGIN;
use crate::error::{Error, Result};

/// Below this angle the Rodrigues coefficients are replaced by their series.
const SMALL_ANGLE: f64 = 1e-4;

/// Above this angle the logarithm reads the axis off the symmetric part.
const NEAR_PI: f64 = PI - 1e-2;

pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

pub fn vee(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(0.5 * (m[(2, 1)] - m[(1, 2)]), 0.5 * (m[(0, 2)] - m[(2, 0)]), 0.5 * (m[(1, 0)] - m[(0, 1)]))
}

/// `exp([v]×) = I + sinθ/θ [v]× + (1 − cosθ)/θ² [v]×²` with θ = ‖v‖.
pub fn exp(v: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = v.norm_squared();
    let theta = theta2.sqrt();
    let (a, b) = if theta < SMALL_ANGLE {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    let k = hat(v);
    Matrix3::identity() + k * a + k * k * b
}

/// Principal logarithm; rejects rotations whose angle is within
/// [`CUT_LOCUS_MARGIN`] of π.
pub fn log(r: &Matrix3<f64>) -> Result<Vector3<f64>> {
    let skew = vee(r); // sinθ · n
    let s = skew.norm();
    let c = 0.5 * (r.trace() - 1.0);
    let theta = s.atan2(c);
    if PI - theta < CUT_LOCUS_MARGIN {
        return Err(Error::CutLocus("rotation angle π"));
    }
    if theta < SMALL_ANGLE {
        return Ok(skew * (1.0 + theta * theta / 6.0));
    }
    if theta < NEAR_PI {
        return Ok(skew * (theta / s));
    }
    // (R + Rᵀ)/2 − cosθ·I = (1 − cosθ)·n nᵀ
    let sym = (r + r.transpose()) * 0.5 - Matrix3::identity() * c;
    let one_minus_c = 1.0 - c;
    let i = (0..3).max_by(|&a, &b| sym[(a, a)].total_cmp(&sym[(b, b)])).unwrap_or(0);
    let ni = (sym[(i, i)] / one_minus_c).max(0.0).sqrt();
    let mut axis: Vector3<f64> = sym.column(i) / (one_minus_c * ni);
    axis.normalize_mut();
    if axis.dot(&skew) < 0.0 {
        axis = -axis;
    }
    Ok(axis * theta)
}

/// Rotation angle of `r` in `[0, π]`.
pub fn angle(r: &Matrix3<f64>) -> f64 {
    vee(r).norm().atan2(0.5 * (r.trace() - 1.0))
}

pub fn rot_x(t: f64) -> Matrix3<f64> {
    exp(&Vector3::new(t, 0.0, 0.0))
}

pub fn rot_y(t: f64) -> Matrix3<f64> {
    exp(&Vector3::new(0.0, t, 0.0))
}

pub fn rot_z(t: f64) -> Matrix3<f64> {
    exp(&Vector3::new(0.0, 0.0, t))
}

/// Nearest rotation in Frobenius norm (polar factor).
pub fn orthonormalize(m: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let svd = m.svd(true, true);
    let u = svd.u?;
    let v_t = svd.v_t?;
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        return None;
    }
    // one Newton step tightens orthogonality to roundoff
    r = (r + r.transpose().try_inverse()?) * 0.5;
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rodrigues_oracle(v: &Vector3<f64>) -> Matrix3<f64> {
        let theta = v.norm();
        let n = v / theta;
        let k = hat(&n);
        Matrix3::identity() + k * theta.sin() + k * k * (1.0 - theta.cos())
    }

    #[test]
    fn exp_matches_rodrigues_oracle() {
        for v in [Vector3::new(0.0, 0.0, PI / 2.0), Vector3::new(0.3, -1.2, 0.7), Vector3::new(2.9, 0.1, -0.4)] {
            assert!((exp(&v) - rodrigues_oracle(&v)).norm() < 1e-14);
        }
    }

    #[test]
    fn small_angle_branch_is_continuous() {
        let dir = Vector3::new(0.6, -0.8, 0.0);
        let below = exp(&(dir * (SMALL_ANGLE * 0.999)));
        let above = exp(&(dir * (SMALL_ANGLE * 1.001)));
        assert!((below - above).norm() < 1e-6);
        let v = dir * 3e-5;
        assert!((log(&exp(&v)).unwrap() - v).norm() < 1e-17);
    }

    #[test]
    fn log_inverts_exp_up_to_near_pi() {
        let dir = Vector3::new(1.0, 2.0, -2.0).normalize();
        for theta in [1e-9, 1e-3, 0.5, 2.0, 3.0, 3.1, std::f64::consts::PI - 1e-3] {
            let v = dir * theta;
            let back = log(&exp(&v)).unwrap();
            assert!((back - v).norm() < 1e-10, "theta {theta}: {}", (back - v).norm());
        }
    }

    #[test]
    fn log_rejects_half_turn() {
        let r = rot_x(PI);
        assert_eq!(log(&r), Err(Error::CutLocus("rotation angle π")));
    }

    #[test]
    fn orthonormalize_repairs_drift() {
        let mut r = rot_z(0.4) * rot_x(1.1);
        r[(0, 1)] += 1e-7;
        let fixed = orthonormalize(&r).unwrap();
        assert!((fixed.transpose() * fixed - Matrix3::identity()).norm() < 1e-14);
        assert!((fixed - r).norm() < 1e-6);
    }
}
