//! Linear filter rules on vector-valued sequences.
//!
//! `(S_α c)_k = ∑_l α_{k−2l} c_l`, `(D_β c)_k = ∑_l β_{l−2k} c_l`,
//! `(L c)_k = c_{k+1}`. Sequences are either periodic or finitely supported
//! (zero outside a window).

use nalgebra::DVector;

use super::filter::Filter;
use crate::error::{Error, Result};

/// Values that can be linearly combined.
pub trait VectorLike: Clone {
    fn zero_like(&self) -> Self;
    /// `self += a·x`
    fn axpy(&mut self, a: f64, x: &Self);
}

impl VectorLike for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
}

impl VectorLike for DVector<f64> {
    fn zero_like(&self) -> Self {
        DVector::zeros(self.len())
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        nalgebra::Matrix::axpy(self, a, x, 1.0);
    }
}

/// A periodic sequence, or a finitely supported one starting at `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq<T> {
    pub start: i64,
    pub values: Vec<T>,
    pub periodic: bool,
}

impl<T: VectorLike> Seq<T> {
    pub fn periodic(values: Vec<T>) -> Self {
        Seq { start: 0, values, periodic: true }
    }

    pub fn finite(start: i64, values: Vec<T>) -> Self {
        Seq { start, values, periodic: false }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entry `k`; `None` stands for zero outside a finite window.
    pub fn get(&self, k: i64) -> Option<&T> {
        if self.periodic {
            let n = self.values.len() as i64;
            self.values.get(k.rem_euclid(n) as usize)
        } else {
            let j = k - self.start;
            if j < 0 {
                None
            } else {
                self.values.get(j as usize)
            }
        }
    }

    fn zero(&self) -> Result<T> {
        self.values.first().map(T::zero_like).ok_or(Error::EmptyInput)
    }

    /// `a·self + b·other`, aligned by index.
    pub fn lincomb(&self, a: f64, other: &Seq<T>, b: f64) -> Result<Seq<T>> {
        let zero = self.zero()?;
        if self.periodic != other.periodic {
            return Err(Error::InvalidArgument("cannot combine periodic and finite sequences".into()));
        }
        let (lo, hi) = if self.periodic {
            if self.len() != other.len() {
                return Err(Error::LengthMismatch { expected: self.len(), found: other.len() });
            }
            (0, self.len() as i64)
        } else {
            let lo = self.start.min(other.start);
            let hi = (self.start + self.len() as i64).max(other.start + other.len() as i64);
            (lo, hi)
        };
        let values = (lo..hi)
            .map(|k| {
                let mut v = zero.clone();
                if let Some(x) = self.get(k) {
                    v.axpy(a, x);
                }
                if let Some(y) = other.get(k) {
                    v.axpy(b, y);
                }
                v
            })
            .collect();
        Ok(Seq { start: if self.periodic { 0 } else { lo }, values, periodic: self.periodic })
    }

    pub fn scaled(&self, a: f64) -> Seq<T> {
        let values = self
            .values
            .iter()
            .map(|x| {
                let mut v = x.zero_like();
                v.axpy(a, x);
                v
            })
            .collect();
        Seq { values, ..*self }
    }
}

impl<T> Seq<T> {
    fn with_values<U>(&self, values: Vec<U>) -> Seq<U> {
        Seq { start: self.start, values, periodic: self.periodic }
    }
}

/// `S_α c`.
pub fn linear_upscale<T: VectorLike>(filter: &Filter, c: &Seq<T>) -> Result<Seq<T>> {
    let zero = c.zero()?;
    let n = c.len() as i64;
    let (lo, hi) = filter.support();
    if c.periodic {
        let m = 2 * n;
        let mut out = vec![zero; m as usize];
        for (l, x) in c.values.iter().enumerate() {
            for i in lo..=hi {
                let a = filter.coeff(i);
                if a != 0.0 {
                    out[(2 * l as i64 + i).rem_euclid(m) as usize].axpy(a, x);
                }
            }
        }
        Ok(Seq::periodic(out))
    } else {
        let start = 2 * c.start + lo;
        let len = 2 * (n - 1) + (hi - lo + 1);
        let mut out = vec![zero; len as usize];
        for (j, x) in c.values.iter().enumerate() {
            let l = c.start + j as i64;
            for i in lo..=hi {
                out[(2 * l + i - start) as usize].axpy(filter.coeff(i), x);
            }
        }
        Ok(Seq::finite(start, out))
    }
}

/// `D_β c`; periodic input must have even length.
pub fn linear_downscale<T: VectorLike>(filter: &Filter, c: &Seq<T>) -> Result<Seq<T>> {
    let zero = c.zero()?;
    let n = c.len() as i64;
    let (lo, hi) = filter.support();
    if c.periodic {
        if n % 2 != 0 {
            return Err(Error::OddLength(n as usize));
        }
        let out = (0..n / 2)
            .map(|k| {
                let mut v = zero.clone();
                for i in lo..=hi {
                    let b = filter.coeff(i);
                    if b != 0.0 {
                        v.axpy(b, &c.values[(2 * k + i).rem_euclid(n) as usize]);
                    }
                }
                v
            })
            .collect();
        Ok(Seq::periodic(out))
    } else {
        let first = (c.start - hi).div_euclid(2) + i64::from((c.start - hi).rem_euclid(2) != 0);
        let last = (c.start + n - 1 - lo).div_euclid(2);
        let out = (first..=last)
            .map(|k| {
                let mut v = zero.clone();
                for i in lo..=hi {
                    if let Some(x) = c.get(2 * k + i) {
                        v.axpy(filter.coeff(i), x);
                    }
                }
                v
            })
            .collect();
        Ok(Seq::finite(first, out))
    }
}

/// `L^k c`, i.e. `(L^k c)_i = c_{i+k}`.
pub fn shift<T: Clone>(c: &Seq<T>, k: i64) -> Seq<T> {
    if c.periodic {
        let mut values = c.values.clone();
        if !values.is_empty() {
            let r = k.rem_euclid(values.len() as i64) as usize;
            values.rotate_left(r);
        }
        c.with_values(values)
    } else {
        Seq { start: c.start - k, values: c.values.clone(), periodic: false }
    }
}

/// Which linear biorthogonal family a [`LinearScheme`] belongs to.
#[derive(Debug, Clone, PartialEq)]
enum Family {
    Haar,
    Interpolating,
    Midpoint,
}

/// The four linear operators `S, D, Q, R` of a scheme, assembled from
/// `S_δ`, `D_δ`, `L` and filter rules.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearScheme {
    family: Family,
    up: Filter,
    down: Filter,
}

impl LinearScheme {
    /// `S = S_{(1,1)}`, `D = ½D_δ(L + id)`, `Q = ½D_δ(id − L)`, `R = (id − L⁻¹)S_δ`.
    pub fn haar() -> Self {
        LinearScheme { family: Family::Haar, up: Filter::haar_upscale(), down: Filter::haar_downscale() }
    }

    /// `S = S_α`, `D = D_δ`, `Q = D_δ L (id − SD)`, `R = L⁻¹ S_δ`.
    pub fn interpolating(mask: Filter) -> Self {
        LinearScheme { family: Family::Interpolating, up: mask, down: Filter::delta() }
    }

    /// `S = S_α`, `D` as for Haar, `Q = D_δ(id − SD)`, `R = (id − L⁻¹)S_δ`.
    pub fn midpoint(mask: Filter) -> Self {
        LinearScheme { family: Family::Midpoint, up: mask, down: Filter::haar_downscale() }
    }

    pub fn upscale<T: VectorLike>(&self, c: &Seq<T>) -> Result<Seq<T>> {
        linear_upscale(&self.up, c)
    }

    pub fn downscale<T: VectorLike>(&self, c: &Seq<T>) -> Result<Seq<T>> {
        linear_downscale(&self.down, c)
    }

    /// `Q c`.
    pub fn details<T: VectorLike>(&self, c: &Seq<T>) -> Result<Seq<T>> {
        let delta = Filter::delta();
        match self.family {
            Family::Haar => {
                let diff = c.lincomb(0.5, &shift(c, 1), -0.5)?;
                linear_downscale(&delta, &diff)
            }
            Family::Interpolating => {
                let resid = c.lincomb(1.0, &self.upscale(&self.downscale(c)?)?, -1.0)?;
                linear_downscale(&delta, &shift(&resid, 1))
            }
            Family::Midpoint => {
                let resid = c.lincomb(1.0, &self.upscale(&self.downscale(c)?)?, -1.0)?;
                linear_downscale(&delta, &resid)
            }
        }
    }

    /// `R d`.
    pub fn detail_upscale<T: VectorLike>(&self, d: &Seq<T>) -> Result<Seq<T>> {
        let spread = linear_upscale(&Filter::delta(), d)?;
        match self.family {
            Family::Interpolating => Ok(shift(&spread, -1)),
            Family::Haar | Family::Midpoint => spread.lincomb(1.0, &shift(&spread, -1), -1.0),
        }
    }

    /// `S c + R d`.
    pub fn reconstruct<T: VectorLike>(&self, coarse: &Seq<T>, d: &Seq<T>) -> Result<Seq<T>> {
        self.upscale(coarse)?.lincomb(1.0, &self.detail_upscale(d)?, 1.0)
    }
}
