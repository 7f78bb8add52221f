//! Points, tangent vectors, and the elementary operations `⊕`, `⊖`, midpoint,
//! reflection, adjoint and distance on the three supported backends.
//!
//! * `Euclidean(n)`: `p ⊕ v = p + v`, `q ⊖ p = q − p`.
//! * `Sphere2`: Riemannian exponential map of the unit sphere; tangent
//!   vectors are ambient 3-vectors orthogonal to their stored base point.
//! * `SO3`: `p ⊕ v = p·exp([v]×)`, `q ⊖ p = log(pᵀq)`; tangent vectors are
//!   left-trivialized axis-angle vectors and carry no base point.
//!
//! Logarithms are only taken inside the injectivity domain: antipodal sphere
//! points and half-turn rotations are rejected instead of wrapped.

pub mod so3;
pub mod sphere;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from π at which a logarithm is considered to hit the cut locus.
pub const CUT_LOCUS_MARGIN: f64 = 1e-8;

/// Maximal offset between a sphere tangent's base and the point it is applied at.
pub const BASE_TOLERANCE: f64 = 1e-9;

/// Geometry backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Manifold {
    Euclidean(usize),
    Sphere2,
    SO3,
}

impl Manifold {
    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        match self {
            Manifold::Euclidean(n) => *n,
            Manifold::Sphere2 => 2,
            Manifold::SO3 => 3,
        }
    }

    /// Number of stored point coordinates (`9` for row-major rotations).
    pub fn point_len(&self) -> usize {
        match self {
            Manifold::Euclidean(n) => *n,
            Manifold::Sphere2 => 3,
            Manifold::SO3 => 9,
        }
    }

    /// Number of stored tangent coordinates.
    pub fn tangent_len(&self) -> usize {
        match self {
            Manifold::Euclidean(n) => *n,
            Manifold::Sphere2 | Manifold::SO3 => 3,
        }
    }

    /// A fixed reference point: the origin, the north pole, or the identity.
    pub fn reference_point(&self) -> Point {
        match self {
            Manifold::Euclidean(n) => Point::Euclidean(DVector::zeros(*n)),
            Manifold::Sphere2 => Point::Sphere(Vector3::z()),
            Manifold::SO3 => Point::Rotation(Matrix3::identity()),
        }
    }

    pub fn check(&self, other: Manifold) -> Result<()> {
        if *self == other {
            Ok(())
        } else {
            Err(Error::ManifoldMismatch { expected: *self, found: other })
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Manifold::Euclidean(n) => write!(f, "euclidean:{n}"),
            Manifold::Sphere2 => f.write_str("sphere2"),
            Manifold::SO3 => f.write_str("so3"),
        }
    }
}

impl FromStr for Manifold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "sphere2" | "sphere" | "s2" => Ok(Manifold::Sphere2),
            "so3" | "rotation" | "rotations" => Ok(Manifold::SO3),
            _ => {
                let dim = lower
                    .strip_prefix("euclidean:")
                    .or_else(|| lower.strip_prefix("euclidean"))
                    .or_else(|| lower.strip_prefix('r'))
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&d| d > 0);
                dim.map(Manifold::Euclidean).ok_or_else(|| Error::InvalidArgument(format!("unknown manifold `{s}`")))
            }
        }
    }
}

/// A point on one of the backends.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Euclidean(DVector<f64>),
    Sphere(Vector3<f64>),
    Rotation(Matrix3<f64>),
}

impl Point {
    pub fn euclidean(coords: &[f64]) -> Result<Point> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("euclidean point needs at least one coordinate".into()));
        }
        Ok(Point::Euclidean(DVector::from_column_slice(coords)))
    }

    /// Unit vector; the norm must already be 1 within `1e-12`.
    pub fn sphere(v: Vector3<f64>) -> Result<Point> {
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPoint(format!("sphere point has norm {}", v.norm())));
        }
        Ok(Point::Sphere(v))
    }

    /// Projects a nonzero vector onto the sphere.
    pub fn sphere_normalized(v: Vector3<f64>) -> Result<Point> {
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidPoint("cannot normalize a zero vector".into()));
        }
        Ok(Point::Sphere(v / n))
    }

    /// Rotation matrix with `‖RᵀR − I‖_F ≤ 1e-9` and positive determinant.
    pub fn rotation(r: Matrix3<f64>) -> Result<Point> {
        let drift = (r.transpose() * r - Matrix3::identity()).norm();
        if drift > 1e-9 || r.determinant() <= 0.0 {
            return Err(Error::InvalidPoint(format!(
                "not a rotation (orthogonality drift {drift:e}, det {})",
                r.determinant()
            )));
        }
        Ok(Point::Rotation(r))
    }

    pub fn manifold(&self) -> Manifold {
        match self {
            Point::Euclidean(x) => Manifold::Euclidean(x.len()),
            Point::Sphere(_) => Manifold::Sphere2,
            Point::Rotation(_) => Manifold::SO3,
        }
    }

    /// Stored coordinates; rotations are row-major.
    pub fn coords(&self) -> Vec<f64> {
        match self {
            Point::Euclidean(x) => x.as_slice().to_vec(),
            Point::Sphere(x) => x.as_slice().to_vec(),
            Point::Rotation(r) => r.transpose().as_slice().to_vec(),
        }
    }

    /// Ambient Euclidean distance between coordinate representations.
    pub fn ambient_distance(&self, other: &Point) -> f64 {
        match (self, other) {
            (Point::Euclidean(a), Point::Euclidean(b)) => (a - b).norm(),
            (Point::Sphere(a), Point::Sphere(b)) => (a - b).norm(),
            (Point::Rotation(a), Point::Rotation(b)) => (a - b).norm(),
            _ => f64::INFINITY,
        }
    }
}

/// A tangent vector, `q ⊖ p` for some pair of points.
#[derive(Debug, Clone, PartialEq)]
pub enum Tangent {
    Euclidean(DVector<f64>),
    Sphere { base: Vector3<f64>, vec: Vector3<f64> },
    Rotation(Vector3<f64>),
}

impl Tangent {
    /// Zero vector in the tangent space at `p`.
    pub fn zero(p: &Point) -> Tangent {
        match p {
            Point::Euclidean(x) => Tangent::Euclidean(DVector::zeros(x.len())),
            Point::Sphere(x) => Tangent::Sphere { base: *x, vec: Vector3::zeros() },
            Point::Rotation(_) => Tangent::Rotation(Vector3::zeros()),
        }
    }

    /// Builds a tangent at `p` from stored coordinates.
    ///
    /// Sphere coordinates must be orthogonal to `p` within `1e-12`.
    pub fn from_coords(p: &Point, coords: &[f64]) -> Result<Tangent> {
        let expected = p.manifold().tangent_len();
        if coords.len() != expected {
            return Err(Error::LengthMismatch { expected, found: coords.len() });
        }
        match p {
            Point::Euclidean(_) => Ok(Tangent::Euclidean(DVector::from_column_slice(coords))),
            Point::Sphere(base) => {
                let vec = Vector3::from_column_slice(coords);
                if vec.dot(base).abs() > 1e-12 * (1.0 + vec.norm()) {
                    return Err(Error::InvalidTangent("vector is not tangent to the sphere".into()));
                }
                Ok(Tangent::Sphere { base: *base, vec })
            }
            Point::Rotation(_) => Ok(Tangent::Rotation(Vector3::from_column_slice(coords))),
        }
    }

    pub fn manifold(&self) -> Manifold {
        match self {
            Tangent::Euclidean(x) => Manifold::Euclidean(x.len()),
            Tangent::Sphere { .. } => Manifold::Sphere2,
            Tangent::Rotation(_) => Manifold::SO3,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        match self {
            Tangent::Euclidean(x) => x.as_slice(),
            Tangent::Sphere { vec, .. } => vec.as_slice(),
            Tangent::Rotation(v) => v.as_slice(),
        }
    }

    /// Base point for sphere tangents; `None` where vectors are base-free.
    pub fn base(&self) -> Option<Point> {
        match self {
            Tangent::Sphere { base, .. } => Some(Point::Sphere(*base)),
            _ => None,
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Tangent::Euclidean(x) => x.norm(),
            Tangent::Sphere { vec, .. } => vec.norm(),
            Tangent::Rotation(v) => v.norm(),
        }
    }

    pub fn scale(&self, a: f64) -> Tangent {
        self.map(|x| x * a)
    }

    pub fn neg(&self) -> Tangent {
        self.map(|x| -x)
    }

    /// Sum of two vectors in the same tangent space.
    pub fn add(&self, other: &Tangent) -> Result<Tangent> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tangent) -> Result<Tangent> {
        self.zip(other, |a, b| a - b)
    }

    /// `self + a·x`, in place.
    pub fn axpy(&mut self, a: f64, x: &Tangent) -> Result<()> {
        *self = self.zip(x, |s, t| s + a * t)?;
        Ok(())
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Tangent {
        match self {
            Tangent::Euclidean(x) => Tangent::Euclidean(x.map(f)),
            Tangent::Sphere { base, vec } => Tangent::Sphere { base: *base, vec: vec.map(f) },
            Tangent::Rotation(v) => Tangent::Rotation(v.map(f)),
        }
    }

    fn zip(&self, other: &Tangent, f: impl Fn(f64, f64) -> f64) -> Result<Tangent> {
        match (self, other) {
            (Tangent::Euclidean(a), Tangent::Euclidean(b)) if a.len() == b.len() => {
                Ok(Tangent::Euclidean(a.zip_map(b, f)))
            }
            (Tangent::Sphere { base, vec: a }, Tangent::Sphere { base: b2, vec: b }) => {
                let offset = (base - b2).norm();
                if offset > BASE_TOLERANCE {
                    return Err(Error::BaseMismatch { offset });
                }
                Ok(Tangent::Sphere { base: *base, vec: a.zip_map(b, f) })
            }
            (Tangent::Rotation(a), Tangent::Rotation(b)) => Ok(Tangent::Rotation(a.zip_map(b, f))),
            _ => Err(Error::ManifoldMismatch { expected: self.manifold(), found: other.manifold() }),
        }
    }

    /// Re-attaches the vector at `base`.
    ///
    /// Sphere vectors are parallel transported along the connecting geodesic;
    /// Euclidean and Lie-algebra vectors are unchanged.
    pub fn transported_to(&self, base: &Point) -> Result<Tangent> {
        base.manifold().check(self.manifold())?;
        match (self, base) {
            (Tangent::Sphere { base: from, vec }, Point::Sphere(to)) => {
                if (from - to).norm() == 0.0 {
                    return Ok(self.clone());
                }
                Ok(Tangent::Sphere { base: *to, vec: sphere::transport(from, to, vec)? })
            }
            _ => Ok(self.clone()),
        }
    }
}

/// `p ⊕ v`.
pub fn oplus(p: &Point, v: &Tangent) -> Result<Point> {
    match (p, v) {
        (Point::Euclidean(x), Tangent::Euclidean(w)) if x.len() == w.len() => Ok(Point::Euclidean(x + w)),
        (Point::Sphere(x), Tangent::Sphere { base, vec }) => {
            let offset = (x - base).norm();
            if offset > BASE_TOLERANCE {
                return Err(Error::BaseMismatch { offset });
            }
            Ok(Point::Sphere(sphere::exp(x, vec)?))
        }
        (Point::Rotation(r), Tangent::Rotation(w)) => Ok(Point::Rotation(r * so3::exp(w))),
        _ => Err(Error::ManifoldMismatch { expected: p.manifold(), found: v.manifold() }),
    }
}

/// `q ⊖ p`, a tangent vector at `p` with `p ⊕ (q ⊖ p) = q`.
pub fn ominus(q: &Point, p: &Point) -> Result<Tangent> {
    match (q, p) {
        (Point::Euclidean(a), Point::Euclidean(b)) if a.len() == b.len() => Ok(Tangent::Euclidean(a - b)),
        (Point::Sphere(a), Point::Sphere(b)) => Ok(Tangent::Sphere { base: *b, vec: sphere::log(b, a)? }),
        (Point::Rotation(a), Point::Rotation(b)) => Ok(Tangent::Rotation(so3::log(&(b.transpose() * a))?)),
        _ => Err(Error::ManifoldMismatch { expected: p.manifold(), found: q.manifold() }),
    }
}

/// `μ(x0, x1) = x0 ⊕ ½(x1 ⊖ x0)`.
pub fn geodesic_midpoint(x0: &Point, x1: &Point) -> Result<Point> {
    match (x0, x1) {
        (Point::Euclidean(a), Point::Euclidean(b)) if a.len() == b.len() => Ok(Point::Euclidean((a + b) * 0.5)),
        _ => oplus(x0, &ominus(x1, x0)?.scale(0.5)),
    }
}

/// Geodesic reflection `σ_x(y) = x ⊕ (−(y ⊖ x))`.
pub fn geodesic_reflection(x: &Point, y: &Point) -> Result<Point> {
    match (x, y) {
        (Point::Euclidean(a), Point::Euclidean(b)) if a.len() == b.len() => Ok(Point::Euclidean(a * 2.0 - b)),
        _ => oplus(x, &ominus(y, x)?.neg()),
    }
}

/// `Ad_g(v)`: the axis-angle vector of `g [v]× g⁻¹`.
pub fn adjoint(g: &Point, v: &Tangent) -> Result<Tangent> {
    match (g, v) {
        (Point::Rotation(r), Tangent::Rotation(w)) => Ok(Tangent::Rotation(r * w)),
        (Point::Rotation(_), _) => Err(Error::NotRotationGroup(v.manifold())),
        _ => Err(Error::NotRotationGroup(g.manifold())),
    }
}

/// `‖q ⊖ p‖`.
pub fn distance(p: &Point, q: &Point) -> Result<f64> {
    match (p, q) {
        (Point::Euclidean(a), Point::Euclidean(b)) if a.len() == b.len() => Ok((a - b).norm()),
        _ => Ok(ominus(q, p)?.norm()),
    }
}
