//! Coordinates on a neighbourhood of a base point via `⊖`/`⊕`.

use nalgebra::{DVector, Vector3};

use crate::averaging::{weighted_mean, WeightVector};
use crate::error::{Error, Result};
use crate::geometry::{ominus, oplus, sphere, Point, Tangent};

/// Orthonormal basis of the tangent space at `p`.
pub fn tangent_basis(p: &Point) -> Vec<Tangent> {
    match p {
        Point::Euclidean(x) => (0..x.len())
            .map(|i| {
                let mut e = DVector::zeros(x.len());
                e[i] = 1.0;
                Tangent::Euclidean(e)
            })
            .collect(),
        Point::Sphere(x) => {
            let b = sphere::tangent_basis(x);
            (0..2).map(|i| Tangent::Sphere { base: *x, vec: b.column(i).into_owned() }).collect()
        }
        Point::Rotation(_) => (0..3).map(|i| Tangent::Rotation(Vector3::ith(i, 1.0))).collect(),
    }
}

/// The chart `x ↦ b ⊕ ∑ x_i e_i` for an orthonormal basis `e` at `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    base: Point,
    basis: Vec<Tangent>,
}

impl Chart {
    pub fn new(base: Point) -> Self {
        let basis = tangent_basis(&base);
        Chart { base, basis }
    }

    /// Chart centred at the Karcher mean of `points`.
    pub fn at_mean(points: &[Point]) -> Result<Self> {
        let w = WeightVector::uniform(points.len())?;
        Ok(Chart::new(weighted_mean(points, &w, None)?))
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn point(&self, x: &[f64]) -> Result<Point> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), found: x.len() });
        }
        let mut v = Tangent::zero(&self.base);
        for (xi, e) in x.iter().zip(&self.basis) {
            v.axpy(*xi, e)?;
        }
        oplus(&self.base, &v)
    }

    pub fn coords(&self, p: &Point) -> Result<Vec<f64>> {
        self.tangent_coords(&ominus(p, &self.base)?)
    }

    /// Coordinates of a tangent vector after identifying its tangent space
    /// with the one at the base: sphere vectors are transported to the base,
    /// group and Euclidean vectors are used as they are.
    pub fn tangent_coords(&self, v: &Tangent) -> Result<Vec<f64>> {
        let v = v.transported_to(&self.base)?;
        Ok(self.basis.iter().map(|e| dot(e.as_slice(), v.as_slice())).collect())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
