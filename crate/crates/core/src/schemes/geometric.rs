//! Geometric up/downscaling, detail extraction and detail reconstruction.
//!
//! Every linear rule `∑ α_j x_j` is replaced by an average satisfying
//! `∑ α_j (x_j ⊖ m) = 0` (or its base-point version), so that on Euclidean
//! data the geometric schemes coincide with the linear ones.

use serde::{Deserialize, Serialize};

use super::filter::Filter;
use super::linear::{linear_downscale, linear_upscale, LinearScheme, Seq};
use crate::averaging::{basepoint_mean, weighted_log_sum, weighted_mean_with, KarcherOptions, WeightVector};
use crate::error::{Error, Result};
use crate::geometry::{adjoint, geodesic_midpoint, geodesic_reflection, ominus, oplus, so3, Manifold, Point, Tangent};

/// Points sharing one manifold, either periodic or on a finite window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSeq {
    manifold: Manifold,
    points: Vec<Point>,
    periodic: bool,
}

impl PointSeq {
    pub fn new(points: Vec<Point>, periodic: bool) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let manifold = first.manifold();
        for (i, p) in points.iter().enumerate() {
            manifold.check(p.manifold()).map_err(|e| e.at_index(i))?;
        }
        Ok(PointSeq { manifold, points, periodic })
    }

    pub fn periodic(points: Vec<Point>) -> Result<Self> {
        Self::new(points, true)
    }

    pub fn window(points: Vec<Point>) -> Result<Self> {
        Self::new(points, false)
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Entry `k`, wrapping around for periodic sequences.
    pub fn get(&self, k: i64) -> Option<&Point> {
        if self.periodic {
            self.points.get(k.rem_euclid(self.points.len() as i64) as usize)
        } else if k < 0 {
            None
        } else {
            self.points.get(k as usize)
        }
    }

    /// `L^k c`; periodic sequences only.
    pub fn shifted(&self, k: i64) -> Result<PointSeq> {
        if !self.periodic {
            return Err(Error::Unsupported("shifting a finite window".into()));
        }
        let mut points = self.points.clone();
        let r = k.rem_euclid(points.len() as i64) as usize;
        points.rotate_left(r);
        Ok(PointSeq { points, ..*self })
    }

    /// `max_k ‖c_{k+1} ⊖ c_k‖`, including the wrap-around step when periodic.
    pub fn max_step(&self) -> Result<f64> {
        let n = self.points.len();
        let steps = if self.periodic { n } else { n - 1 };
        let mut out: f64 = 0.0;
        for k in 0..steps {
            let d = crate::geometry::distance(&self.points[k], &self.points[(k + 1) % n]).map_err(|e| e.at_index(k))?;
            out = out.max(d);
        }
        Ok(out)
    }

    fn with_points(&self, points: Vec<Point>) -> PointSeq {
        PointSeq { points, ..*self }
    }

    fn at(&self, k: i64) -> Result<&Point> {
        self.get(k)
            .ok_or_else(|| Error::Unsupported(format!("index {k} lies outside the finite window; use periodic data")))
    }
}

/// Detail vectors of one pyramid level.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentSeq {
    manifold: Manifold,
    vectors: Vec<Tangent>,
}

impl TangentSeq {
    pub fn new(vectors: Vec<Tangent>) -> Result<Self> {
        let manifold = vectors.first().ok_or(Error::EmptyInput)?.manifold();
        for (i, v) in vectors.iter().enumerate() {
            manifold.check(v.manifold()).map_err(|e| e.at_index(i))?;
        }
        Ok(TangentSeq { manifold, vectors })
    }

    /// Zero vectors at the given points.
    pub fn zeros(bases: &[Point]) -> Result<Self> {
        Self::new(bases.iter().map(Tangent::zero).collect())
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn vectors(&self) -> &[Tangent] {
        &self.vectors
    }

    pub fn vectors_mut(&mut self) -> &mut [Tangent] {
        &mut self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `sup_k ‖d_k‖`.
    pub fn sup_norm(&self) -> f64 {
        self.vectors.iter().map(Tangent::norm).fold(0.0, f64::max)
    }
}

/// The three scheme families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Repetition upscaling, midpoint decimation.
    Haar,
    /// `(Sc)_{2k} = c_k`, odd slots by Karcher means; decimation `D_δ`.
    Interpolating { mask: Filter },
    /// Both slots by base-point means at `c_k`; midpoint decimation.
    MidpointInterpolating { mask: Filter },
}

impl SchemeKind {
    pub fn four_point() -> Self {
        SchemeKind::Interpolating { mask: Filter::four_point() }
    }

    /// Midpoint-interpolating scheme with the Haar mask `(Sc)_{2k} = (Sc)_{2k+1} = c_k`.
    pub fn midpoint_haar() -> Self {
        SchemeKind::MidpointInterpolating { mask: Filter::haar_upscale() }
    }

    pub fn interpolating(mask: Filter) -> Result<Self> {
        let kind = SchemeKind::Interpolating { mask };
        kind.validate()?;
        Ok(kind)
    }

    pub fn midpoint(mask: Filter) -> Result<Self> {
        let kind = SchemeKind::MidpointInterpolating { mask };
        kind.validate()?;
        Ok(kind)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SchemeKind::Haar => Ok(()),
            SchemeKind::Interpolating { mask } => mask.validate_interpolating(),
            SchemeKind::MidpointInterpolating { mask } => validate_midpoint_mask(mask),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Haar => "haar",
            SchemeKind::Interpolating { .. } => "interpolating",
            SchemeKind::MidpointInterpolating { .. } => "midpoint",
        }
    }

    /// The linear scheme this one reduces to on Euclidean data.
    pub fn linear(&self) -> LinearScheme {
        match self {
            SchemeKind::Haar => LinearScheme::haar(),
            SchemeKind::Interpolating { mask } => LinearScheme::interpolating(mask.clone()),
            SchemeKind::MidpointInterpolating { mask } => LinearScheme::midpoint(mask.clone()),
        }
    }

    /// Upscaling mask of the linear counterpart.
    pub fn upscale_mask(&self) -> Filter {
        match self {
            SchemeKind::Haar => Filter::haar_upscale(),
            SchemeKind::Interpolating { mask } | SchemeKind::MidpointInterpolating { mask } => mask.clone(),
        }
    }
}

/// Checks `D S = id` with `D` the midpoint decimation on a basis of delta sequences.
fn validate_midpoint_mask(mask: &Filter) -> Result<()> {
    mask.validate_upscale()?;
    let n = mask.coeffs.len() + 2;
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let ds = linear_downscale(&Filter::haar_downscale(), &linear_upscale(mask, &Seq::periodic(e.clone()))?)?;
        if ds.values.iter().zip(&e).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(Error::InvalidFilter("mask does not satisfy DS = id against midpoint decimation".into()));
        }
    }
    Ok(())
}

/// `S̃ = ½(L + id) S`: the interpolatory mask `α̃_i = ½(α_{i+1} + α_i)`.
pub fn interpolatory_from_midpoint(mask: &Filter) -> Result<Filter> {
    validate_midpoint_mask(mask)?;
    let (lo, hi) = mask.support();
    let coeffs = (lo - 1..=hi).map(|i| 0.5 * (mask.coeff(i + 1) + mask.coeff(i))).collect();
    let out = Filter::new(lo - 1, coeffs)?.trimmed();
    out.validate_interpolating()?;
    Ok(out)
}

/// A scheme together with the Karcher settings used by its averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    pub kind: SchemeKind,
    #[serde(default)]
    pub karcher: KarcherOptions,
}

impl Scheme {
    pub fn new(kind: SchemeKind) -> Result<Self> {
        kind.validate()?;
        Ok(Scheme { kind, karcher: KarcherOptions::default() })
    }

    pub fn haar() -> Self {
        Scheme { kind: SchemeKind::Haar, karcher: KarcherOptions::default() }
    }

    pub fn four_point() -> Self {
        Scheme { kind: SchemeKind::four_point(), karcher: KarcherOptions::default() }
    }

    pub fn midpoint_haar() -> Self {
        Scheme { kind: SchemeKind::midpoint_haar(), karcher: KarcherOptions::default() }
    }

    pub fn with_karcher(self, karcher: KarcherOptions) -> Self {
        Scheme { karcher, ..self }
    }

    fn require_periodic(&self, c: &PointSeq) -> Result<()> {
        if !c.periodic && self.kind != SchemeKind::Haar {
            return Err(Error::Unsupported(format!("{} scheme requires periodic data", self.kind.name())));
        }
        Ok(())
    }

    /// Geometric `S c`.
    pub fn upscale(&self, c: &PointSeq) -> Result<PointSeq> {
        self.require_periodic(c)?;
        let n = c.len() as i64;
        let mut out = Vec::with_capacity(2 * c.len());
        for k in 0..n {
            let ck = &c.points[k as usize];
            let pair = match &self.kind {
                SchemeKind::Haar => (ck.clone(), ck.clone()),
                SchemeKind::Interpolating { mask } => {
                    let (pts, w) = slot_terms(mask, c, k, 1)?;
                    let odd = weighted_mean_with(&pts, &w, Some(ck), &self.karcher);
                    (ck.clone(), odd.map_err(|e| e.at_index(2 * k as usize + 1))?)
                }
                SchemeKind::MidpointInterpolating { mask } => {
                    let mut slots = [0, 1].into_iter().map(|e| {
                        let (pts, w) = slot_terms(mask, c, k, e)?;
                        basepoint_mean(&pts, &w, ck).map_err(|err| err.at_index((2 * k + e) as usize))
                    });
                    (slots.next().unwrap()?, slots.next().unwrap()?)
                }
            };
            out.push(pair.0);
            out.push(pair.1);
        }
        Ok(c.with_points(out))
    }

    /// Geometric `D c`.
    pub fn downscale(&self, c: &PointSeq) -> Result<PointSeq> {
        self.require_periodic(c)?;
        if !c.len().is_multiple_of(2) {
            return Err(Error::OddLength(c.len()));
        }
        let out = c
            .points
            .chunks_exact(2)
            .enumerate()
            .map(|(k, pair)| match self.kind {
                SchemeKind::Interpolating { .. } => Ok(pair[0].clone()),
                _ => geodesic_midpoint(&pair[0], &pair[1]).map_err(|e| e.at_index(2 * k)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(c.with_points(out))
    }

    fn check_pair(&self, fine: &PointSeq, coarse: &PointSeq) -> Result<()> {
        coarse.manifold.check(fine.manifold)?;
        if fine.len() != 2 * coarse.len() {
            return Err(Error::LengthMismatch { expected: 2 * coarse.len(), found: fine.len() });
        }
        if fine.periodic != coarse.periodic {
            return Err(Error::InvalidArgument("fine and coarse data disagree on periodicity".into()));
        }
        Ok(())
    }

    /// Details `d^j = Q(c ⊖ S D c)` given `coarse = D fine`.
    pub fn details(&self, fine: &PointSeq, coarse: &PointSeq) -> Result<TangentSeq> {
        self.check_pair(fine, coarse)?;
        let vectors = match self.kind {
            SchemeKind::Haar => (0..coarse.len())
                .map(|k| ominus(&fine.points[2 * k], &coarse.points[k]).map_err(|e| e.at_index(k)))
                .collect::<Result<Vec<_>>>()?,
            SchemeKind::Interpolating { .. } | SchemeKind::MidpointInterpolating { .. } => {
                let slot = usize::from(matches!(self.kind, SchemeKind::Interpolating { .. }));
                let pred = self.upscale(coarse)?;
                (0..coarse.len())
                    .map(|k| ominus(&fine.points[2 * k + slot], &pred.points[2 * k + slot]).map_err(|e| e.at_index(k)))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        TangentSeq::new(vectors)
    }

    fn check_details(&self, coarse: &PointSeq, d: &TangentSeq) -> Result<()> {
        coarse.manifold.check(d.manifold)?;
        if d.len() != coarse.len() {
            return Err(Error::LengthMismatch { expected: coarse.len(), found: d.len() });
        }
        Ok(())
    }

    /// `S c ⊕ R d`.
    ///
    /// Sphere details attached elsewhere (after thresholding or
    /// perturbation) are transported to the point they are applied at.
    pub fn detail_recon(&self, coarse: &PointSeq, d: &TangentSeq) -> Result<PointSeq> {
        self.check_details(coarse, d)?;
        let mut out = Vec::with_capacity(2 * coarse.len());
        match self.kind {
            SchemeKind::Haar => {
                for (k, (m, v)) in coarse.points.iter().zip(&d.vectors).enumerate() {
                    let step = || -> Result<(Point, Point)> {
                        let v = v.transported_to(m)?;
                        Ok((oplus(m, &v)?, oplus(m, &v.neg())?))
                    };
                    let (a, b) = step().map_err(|e| e.at_index(k))?;
                    out.push(a);
                    out.push(b);
                }
            }
            SchemeKind::Interpolating { .. } => {
                let pred = self.upscale(coarse)?;
                for (k, (pair, v)) in pred.points.chunks_exact(2).zip(&d.vectors).enumerate() {
                    let odd = v.transported_to(&pair[1]).and_then(|v| oplus(&pair[1], &v));
                    out.push(pair[0].clone());
                    out.push(odd.map_err(|e| e.at_index(2 * k + 1))?);
                }
            }
            SchemeKind::MidpointInterpolating { .. } => {
                let pred = self.upscale(coarse)?;
                for (k, (pair, v)) in pred.points.chunks_exact(2).zip(&d.vectors).enumerate() {
                    let step = || -> Result<(Point, Point)> {
                        let even = oplus(&pair[0], &v.transported_to(&pair[0])?)?;
                        let odd = geodesic_reflection(&coarse.points[k], &even)?;
                        Ok((even, odd))
                    };
                    let (a, b) = step().map_err(|e| e.at_index(2 * k))?;
                    out.push(a);
                    out.push(b);
                }
            }
        }
        Ok(coarse.with_points(out))
    }

    /// Midpoint-scheme reconstruction on SO3 with odd slots given by
    /// `(Sc)_{2k+1} ⊕ (−Ad_{exp(a_k)} d_k)`, `a_k = (S_lin(c ⊖ c_k))_{2k}`.
    pub fn detail_recon_adjoint(&self, coarse: &PointSeq, d: &TangentSeq) -> Result<PointSeq> {
        self.check_details(coarse, d)?;
        let SchemeKind::MidpointInterpolating { mask } = &self.kind else {
            return Err(Error::Unsupported("the adjoint formula applies to midpoint-interpolating schemes".into()));
        };
        if coarse.manifold != Manifold::SO3 {
            return Err(Error::NotRotationGroup(coarse.manifold));
        }
        self.require_periodic(coarse)?;
        let mut out = Vec::with_capacity(2 * coarse.len());
        for (k, v) in d.vectors.iter().enumerate() {
            let ck = &coarse.points[k];
            let step = || -> Result<(Point, Point)> {
                let (pe, we) = slot_terms(mask, coarse, k as i64, 0)?;
                let (po, wo) = slot_terms(mask, coarse, k as i64, 1)?;
                let a = weighted_log_sum(&pe, &we, ck)?;
                let b = weighted_log_sum(&po, &wo, ck)?;
                let Tangent::Rotation(a_vec) = &a else { unreachable!("SO3 tangent") };
                let g = Point::Rotation(so3::exp(a_vec));
                let even = oplus(&oplus(ck, &a)?, v)?;
                let odd = oplus(&oplus(ck, &b)?, &adjoint(&g, v)?.neg())?;
                Ok((even, odd))
            };
            let (a, b) = step().map_err(|e| e.at_index(2 * k))?;
            out.push(a);
            out.push(b);
        }
        Ok(coarse.with_points(out))
    }
}

/// Points `c_{k−r}` and weights `α_{2r+e}` contributing to output slot `2k+e`.
fn slot_terms(mask: &Filter, c: &PointSeq, k: i64, e: i64) -> Result<(Vec<Point>, WeightVector)> {
    let (lo, hi) = mask.support();
    let mut pts = Vec::new();
    let mut w = Vec::new();
    for i in (lo..=hi).filter(|i| i.rem_euclid(2) == e) {
        let a = mask.coeff(i);
        if a == 0.0 {
            continue;
        }
        let r = (i - e).div_euclid(2);
        pts.push(c.at(k - r)?.clone());
        w.push(a);
    }
    Ok((pts, WeightVector::new(w)?))
}

/// Fully geometric `S_α`: every output slot `2k+e` is the Karcher mean of
/// `c_{k−r}` with weights `α_{2r+e}`, started at `c_k`.
pub fn average_upscale(mask: &Filter, c: &PointSeq, opts: &KarcherOptions) -> Result<PointSeq> {
    mask.validate_upscale()?;
    if !c.periodic {
        return Err(Error::Unsupported("averaging rules require periodic data".into()));
    }
    let mut out = Vec::with_capacity(2 * c.len());
    for k in 0..c.len() as i64 {
        for e in [0, 1] {
            let (pts, w) = slot_terms(mask, c, k, e)?;
            let m = weighted_mean_with(&pts, &w, Some(&c.points[k as usize]), opts);
            out.push(m.map_err(|err| err.at_index((2 * k + e) as usize))?);
        }
    }
    Ok(c.with_points(out))
}

/// Fully geometric `D_β`: `(Dc)_k` is the Karcher mean of `c_{2k+i}` with
/// weights `β_i`, started at `c_{2k}`.
pub fn average_downscale(mask: &Filter, c: &PointSeq, opts: &KarcherOptions) -> Result<PointSeq> {
    mask.validate_downscale()?;
    if !c.periodic {
        return Err(Error::Unsupported("averaging rules require periodic data".into()));
    }
    if !c.len().is_multiple_of(2) {
        return Err(Error::OddLength(c.len()));
    }
    let (lo, hi) = mask.support();
    let mut out = Vec::with_capacity(c.len() / 2);
    for k in 0..(c.len() / 2) as i64 {
        let mut pts = Vec::new();
        let mut w = Vec::new();
        for i in lo..=hi {
            if mask.coeff(i) != 0.0 {
                pts.push(c.at(2 * k + i)?.clone());
                w.push(mask.coeff(i));
            }
        }
        let m = weighted_mean_with(&pts, &WeightVector::new(w)?, Some(&c.points[2 * k as usize]), opts);
        out.push(m.map_err(|err| err.at_index(k as usize))?);
    }
    Ok(c.with_points(out))
}
