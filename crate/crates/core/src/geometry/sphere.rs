//! Exponential map, logarithm and transport on the unit sphere S² ⊂ R³.

use std::f64::consts::PI;

use nalgebra::{Matrix3x2, Vector3};

use super::CUT_LOCUS_MARGIN;
use crate::error::{Error, Result};

/// Great-circle step `cos‖v‖·p + sin‖v‖·v/‖v‖`; `v` must be tangent at `p`.
pub fn exp(p: &Vector3<f64>, v: &Vector3<f64>) -> Result<Vector3<f64>> {
    let t = v.norm();
    if t >= PI {
        return Err(Error::StepTooLarge { norm: t });
    }
    if t == 0.0 {
        return Ok(*p);
    }
    let q = p * t.cos() + v * (t.sin() / t);
    Ok(q.normalize())
}

/// Inverse of [`exp`] at `p`; antipodal pairs are rejected.
pub fn log(p: &Vector3<f64>, q: &Vector3<f64>) -> Result<Vector3<f64>> {
    let c = p.dot(q);
    let w = q - p * c;
    let s = w.norm();
    let theta = s.atan2(c);
    if PI - theta < CUT_LOCUS_MARGIN {
        return Err(Error::CutLocus("antipodal points"));
    }
    if s == 0.0 {
        return Ok(Vector3::zeros());
    }
    let v = w * (theta / s);
    // remove the roundoff component along p
    Ok(v - p * p.dot(&v))
}

/// Parallel transport of `v ∈ T_p S²` along the geodesic from `p` to `q`.
pub fn transport(p: &Vector3<f64>, q: &Vector3<f64>, v: &Vector3<f64>) -> Result<Vector3<f64>> {
    let denom = 1.0 + p.dot(q);
    if denom < 1e-12 {
        return Err(Error::CutLocus("antipodal points"));
    }
    let out = v - (p + q) * (v.dot(q) / denom);
    Ok(out - q * q.dot(&out))
}

/// Orthonormal basis of the tangent plane at `p` (columns).
pub fn tangent_basis(p: &Vector3<f64>) -> Matrix3x2<f64> {
    let axis = if p.x.abs() <= p.y.abs() && p.x.abs() <= p.z.abs() {
        Vector3::x()
    } else if p.y.abs() <= p.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let e1 = (axis - p * p.dot(&axis)).normalize();
    let e2 = p.cross(&e1);
    Matrix3x2::from_columns(&[e1, e2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transport_preserves_norm_and_tangency() {
        let p = Vector3::new(1.0, 0.0, 0.0);
        let q = Vector3::new(0.6, 0.8, 0.0);
        let v = Vector3::new(0.0, 0.3, -0.4);
        let w = transport(&p, &q, &v).unwrap();
        assert!((w.norm() - v.norm()).abs() < 1e-15);
        assert!(w.dot(&q).abs() < 1e-15);
        // along the equator the normal direction is untouched
        assert!((w.z + 0.4).abs() < 1e-15);
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        for p in [Vector3::new(0.0, 0.0, 1.0), Vector3::new(1.0, 2.0, 3.0).normalize()] {
            let b = tangent_basis(&p);
            let gram = b.transpose() * b;
            assert!((gram - nalgebra::Matrix2::identity()).norm() < 1e-15);
            assert!((b.transpose() * p).norm() < 1e-15);
        }
    }

    #[test]
    fn exp_rejects_half_circle_steps() {
        let p = Vector3::z();
        assert!(matches!(exp(&p, &Vector3::new(PI, 0.0, 0.0)), Err(Error::StepTooLarge { .. })));
    }
}
