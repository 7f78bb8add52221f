//! Text formats: point data files, pyramid files and filter files.
//!
//! A data file is a one-line JSON header followed by one point per line as
//! whitespace-separated floats:
//!
//! ```text
//! {"manifold":"sphere2","count":2}
//! 1.0000000000000000e0 0.0000000000000000e0 0.0000000000000000e0
//! 0.0000000000000000e0 1.0000000000000000e0 0.0000000000000000e0
//! ```
//!
//! Rotations are row-major 9-tuples. Floats are written with 17 significant
//! digits, which reproduces every `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use geowave::averaging::KarcherOptions;
use geowave::pyramid::Pyramid;
use geowave::schemes::{Filter, PointSeq, Scheme, SchemeKind, TangentSeq};
use geowave::{Manifold, Point, Tangent};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Sphere records within this distance of unit norm are normalized on load.
pub const SPHERE_LOAD_TOLERANCE: f64 = 1e-9;
/// Rotation records with `‖RᵀR − I‖_F` up to this are re-orthonormalized on load.
pub const ROTATION_LOAD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub manifold: String,
    pub count: usize,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub periodic: bool,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn parse_manifold(s: &str) -> CliResult<Manifold> {
    s.parse().map_err(|e| CliError::core("input", e))
}

/// Validates one record against `m`, applying the load-time repairs.
pub fn point_from_record(m: Manifold, v: &[f64]) -> Result<Point, String> {
    if v.len() != m.point_len() {
        return Err(format!("expected {} values for {m}, found {}", m.point_len(), v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("non-finite value".into());
    }
    match m {
        Manifold::Euclidean(_) => Point::euclidean(v).map_err(|e| e.to_string()),
        Manifold::Sphere2 => {
            let x = Vector3::from_column_slice(v);
            let dev = (x.norm() - 1.0).abs();
            if dev <= 4.0 * f64::EPSILON {
                Point::sphere(x).map_err(|e| e.to_string())
            } else if dev <= SPHERE_LOAD_TOLERANCE {
                Point::sphere_normalized(x).map_err(|e| e.to_string())
            } else {
                Err(format!("sphere point has norm {}", x.norm()))
            }
        }
        Manifold::SO3 => {
            let r = Matrix3::from_row_slice(v);
            let drift = (r.transpose() * r - Matrix3::identity()).norm();
            if r.determinant() <= 0.0 {
                return Err("rotation has nonpositive determinant".into());
            }
            if drift <= 1e-12 {
                Point::rotation(r).map_err(|e| e.to_string())
            } else if drift <= ROTATION_LOAD_TOLERANCE {
                let r = geowave::geometry::so3::orthonormalize(&r).ok_or("cannot orthonormalize rotation")?;
                Point::rotation(r).map_err(|e| e.to_string())
            } else {
                Err(format!("orthogonality drift {drift:e} exceeds {ROTATION_LOAD_TOLERANCE:e}"))
            }
        }
    }
}

pub fn parse_points(text: &str) -> CliResult<PointSeq> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| CliError::new("input", "empty data file"))?;
    let header: Header = serde_json::from_str(first).map_err(|e| CliError::new("input", format!("bad header: {e}")))?;
    let m = parse_manifold(&header.manifold)?;
    let mut points = Vec::with_capacity(header.count);
    for (k, (line_no, line)) in lines.enumerate() {
        let values = line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::new("input", format!("line {}: {e}", line_no + 1)).at_index(k))?;
        let p = point_from_record(m, &values)
            .map_err(|e| CliError::new("input", format!("line {}: {e}", line_no + 1)).at_index(k))?;
        points.push(p);
    }
    if points.len() != header.count {
        return Err(CliError::new(
            "input",
            format!("header declares {} points, file has {}", header.count, points.len()),
        ));
    }
    PointSeq::new(points, header.periodic).map_err(|e| CliError::core("input", e))
}

pub fn render_points(c: &PointSeq) -> String {
    let header = Header { manifold: c.manifold().to_string(), count: c.len(), periodic: c.is_periodic() };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for p in c.points() {
        let mut first = true;
        for x in p.coords() {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{x:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io("input", path, e))
}

pub fn read_points(path: &Path) -> CliResult<PointSeq> {
    parse_points(&read_text(path)?)
}

/// Pyramid on disk: coarse points as stored coordinates, `details[k − 1]`
/// holding level `k`. Sphere details are `[base, vec]` 6-tuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PyramidFile {
    pub manifold: String,
    pub scheme: SchemeKind,
    #[serde(default)]
    pub karcher: KarcherOptions,
    pub periodic: bool,
    pub coarse: Vec<Vec<f64>>,
    pub details: Vec<Vec<Vec<f64>>>,
}

fn tangent_record(v: &Tangent) -> Vec<f64> {
    match v {
        Tangent::Sphere { base, vec } => base.iter().chain(vec.iter()).copied().collect(),
        _ => v.as_slice().to_vec(),
    }
}

fn tangent_from_record(m: Manifold, v: &[f64]) -> Result<Tangent, String> {
    let bad = |e: geowave::Error| e.to_string();
    match m {
        Manifold::Euclidean(n) if v.len() == n => {
            Tangent::from_coords(&Point::euclidean(&vec![0.0; n]).map_err(bad)?, v).map_err(bad)
        }
        Manifold::Sphere2 if v.len() == 6 => {
            let base = Point::sphere(Vector3::from_column_slice(&v[..3])).map_err(bad)?;
            Tangent::from_coords(&base, &v[3..]).map_err(bad)
        }
        Manifold::SO3 if v.len() == 3 => Ok(Tangent::Rotation(Vector3::from_column_slice(v))),
        _ => Err(format!("wrong detail record length {} for {m}", v.len())),
    }
}

impl PyramidFile {
    pub fn from_pyramid(p: &Pyramid) -> Self {
        PyramidFile {
            manifold: p.manifold().to_string(),
            scheme: p.scheme().kind.clone(),
            karcher: p.scheme().karcher,
            periodic: p.coarse().is_periodic(),
            coarse: p.coarse().points().iter().map(Point::coords).collect(),
            details: p.details().iter().map(|d| d.vectors().iter().map(tangent_record).collect()).collect(),
        }
    }

    pub fn into_pyramid(self) -> CliResult<Pyramid> {
        let m = parse_manifold(&self.manifold)?;
        let coarse = self
            .coarse
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let p = point_from_record(m, v).map_err(|e| CliError::new("input", e).at_index(k))?;
                // stored pyramids are taken verbatim; anything off the manifold is rejected
                if p.coords() != *v {
                    return Err(CliError::new("input", "coarse point is not exactly on the manifold").at_index(k));
                }
                Ok(p)
            })
            .collect::<CliResult<Vec<_>>>()?;
        let coarse = PointSeq::new(coarse, self.periodic).map_err(|e| CliError::core("input", e))?;
        let details = self
            .details
            .iter()
            .enumerate()
            .map(|(i, level)| {
                let vectors = level
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        tangent_from_record(m, v).map_err(|e| {
                            let mut err = CliError::new("input", e).at_index(k);
                            err.level = Some(i + 1);
                            err
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                if vectors.is_empty() {
                    let mut err = CliError::new("input", "empty detail level");
                    err.level = Some(i + 1);
                    return Err(err);
                }
                TangentSeq::new(vectors).map_err(|e| CliError::core("input", e.at_level(i + 1)))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let scheme = Scheme::new(self.scheme).map_err(|e| CliError::core("input", e))?.with_karcher(self.karcher);
        Pyramid::from_parts(scheme, coarse, details).map_err(|e| CliError::core("input", e))
    }
}

pub fn render_pyramid(p: &Pyramid) -> String {
    let mut s = serde_json::to_string_pretty(&PyramidFile::from_pyramid(p)).expect("pyramid serializes");
    s.push('\n');
    s
}

pub fn parse_pyramid(text: &str) -> CliResult<Pyramid> {
    let file: PyramidFile =
        serde_json::from_str(text).map_err(|e| CliError::new("input", format!("bad pyramid file: {e}")))?;
    file.into_pyramid()
}

/// Filter file `{"offset": i, "coeffs": [...]}`.
pub fn read_filter(path: &Path) -> CliResult<Filter> {
    let raw: Filter = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::new("config", format!("bad mask file {}: {e}", path.display())))?;
    Filter::new(raw.offset, raw.coeffs).map_err(|e| CliError::core("config", e))
}
