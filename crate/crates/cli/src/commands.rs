use std::f64::consts::TAU;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use geowave::analysis::curves::{sample_closed, GeodesicPolygon};
use geowave::analysis::{
    contractivity_estimate, detail_decay, halving_ratios, proximity_ratio, rank_experiment, smoothing_convergence,
    stability_experiment, RankPair,
};
use geowave::averaging::kernel_smooth;
use geowave::geometry::distance;
use geowave::pyramid::{LevelThreshold, Pyramid, QuantizeReport, ThresholdRule};
use geowave::schemes::PointSeq;
use geowave::{Manifold, Point};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::format::{parse_pyramid, read_points, read_text, render_points, render_pyramid};
use crate::synth::{synth, CurveKind, SynthKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    Decay,
    Proximity,
    Contractivity,
    Stability,
    Rank,
    Smoothing,
}

/// Resolved settings shared by all commands.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: RunConfig,
    pub manifold: Option<Manifold>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Where the analyses take their data from.
#[derive(Debug, Clone, Default)]
pub struct Source {
    pub input: Option<PathBuf>,
    pub curve: Option<CurveKind>,
    pub count: Option<usize>,
}

impl Context {
    fn write(&self, text: &str) -> CliResult<()> {
        write_to(self.out.as_deref(), text)
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(match self.out.as_deref().and_then(Path::extension) {
            Some(ext) if ext == "json" => Format::Json,
            _ => Format::Csv,
        })
    }

    fn check_manifold(&self, found: Manifold) -> CliResult<()> {
        match self.manifold {
            Some(m) if m != found => {
                Err(CliError::new("input", format!("--manifold {m} does not match data on {found}")))
            }
            _ => Ok(()),
        }
    }

    fn read_points(&self, path: &Path) -> CliResult<PointSeq> {
        let c = read_points(path)?;
        self.check_manifold(c.manifold())?;
        Ok(c)
    }
}

fn write_to(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io("output", path, e)),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| CliError::new("output", e.to_string())),
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn to_csv<R: Serialize>(rows: &[R]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::new("output", e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::new("output", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn emit<R: Serialize, J: Serialize>(ctx: &Context, rows: &[R], full: &J) -> CliResult<()> {
    let text = match ctx.format() {
        Format::Csv => to_csv(rows)?,
        Format::Json => to_json(full),
    };
    ctx.write(&text)
}

pub fn run_synth(ctx: &Context, kind: SynthKind, count: usize, step: Option<f64>, noise: Option<f64>) -> CliResult<()> {
    let c = synth(kind, count, step, noise, ctx.cfg.seed)?;
    ctx.check_manifold(c.manifold())?;
    ctx.write(&render_points(&c))
}

pub fn run_decompose(ctx: &Context, input: &Path) -> CliResult<()> {
    let c = ctx.read_points(input)?;
    let p = Pyramid::decompose(&c, &ctx.cfg.scheme()?, ctx.cfg.levels).map_err(|e| CliError::core("decompose", e))?;
    ctx.write(&render_pyramid(&p))
}

pub fn run_reconstruct(ctx: &Context, input: &Path) -> CliResult<()> {
    let p = parse_pyramid(&read_text(input)?)?;
    ctx.check_manifold(p.manifold())?;
    let c = p.reconstruct().map_err(|e| CliError::core("reconstruct", e))?;
    ctx.write(&render_points(&c))
}

#[derive(Debug, Serialize)]
pub struct CompressReport {
    pub scheme: &'static str,
    pub manifold: String,
    pub count: usize,
    pub levels: usize,
    pub rule: ThresholdRule,
    pub kept: usize,
    pub zeroed: usize,
    pub perturbation_budget: f64,
    pub thresholds: Vec<LevelThreshold>,
    pub quantization: Option<QuantizeReport>,
    /// `sup_k dist(c_k, c̃_k)`.
    pub max_error: f64,
}

pub fn run_compress(ctx: &Context, input: &Path, report: Option<&Path>) -> CliResult<()> {
    let out = ctx.out.as_deref().ok_or_else(|| CliError::new("config", "compress needs --out"))?;
    let c = ctx.read_points(input)?;
    let scheme = ctx.cfg.scheme()?;
    let pyramid = Pyramid::decompose(&c, &scheme, ctx.cfg.levels).map_err(|e| CliError::core("decompose", e))?;
    let rule = ctx.cfg.threshold();
    let (mut pyramid, thresholds) = pyramid.threshold(rule).map_err(|e| CliError::core("threshold", e))?;
    let mut quantization = None;
    if let Some(step) = ctx.cfg.quantize {
        let (q, r) = pyramid.quantize(step).map_err(|e| CliError::core("quantize", e))?;
        pyramid = q;
        quantization = Some(r);
    }
    let back = pyramid.reconstruct().map_err(|e| CliError::core("reconstruct", e))?;
    let mut max_error = 0.0f64;
    for (k, (p, q)) in c.points().iter().zip(back.points()).enumerate() {
        max_error = max_error.max(distance(p, q).map_err(|e| CliError::core("reconstruct", e.at_index(k)))?);
    }
    write_to(Some(out), &render_points(&back))?;
    let summary = CompressReport {
        scheme: scheme.kind.name(),
        manifold: c.manifold().to_string(),
        count: c.len(),
        levels: ctx.cfg.levels,
        rule,
        kept: thresholds.kept(),
        zeroed: thresholds.zeroed(),
        perturbation_budget: thresholds.perturbation_budget(),
        thresholds: thresholds.levels,
        quantization,
        max_error,
    };
    write_to(report, &to_json(&summary))
}

/// Smooths the closed geodesic polygon through the data with radius `ρ`
/// (in units of the whole loop) and resamples it at the data parameters.
pub fn run_smooth(ctx: &Context, input: &Path) -> CliResult<()> {
    let c = ctx.read_points(input)?;
    let poly = polygon(&c)?;
    let (kernel, opts, n) = (ctx.cfg.kernel(), ctx.cfg.smoothing(), c.len());
    let points = (0..n)
        .map(|k| {
            kernel_smooth(|t| poly.eval(t), &kernel, ctx.cfg.rho, k as f64 / n as f64, &opts)
                .map_err(|e| CliError::core("smooth", e.at_index(k)))
        })
        .collect::<CliResult<Vec<_>>>()?;
    ctx.write(&render_points(&PointSeq::periodic(points).map_err(|e| CliError::core("smooth", e))?))
}

fn polygon(c: &PointSeq) -> CliResult<GeodesicPolygon> {
    if !c.is_periodic() {
        return Err(CliError::new("input", "closed-curve operations need periodic data"));
    }
    GeodesicPolygon::new(c).map_err(|e| CliError::core("input", e))
}

/// A closed curve and its period.
enum Curve {
    Analytic(CurveKind),
    Polygon(GeodesicPolygon),
}

impl Curve {
    fn eval(&self, t: f64) -> Point {
        match self {
            Curve::Analytic(k) => k.eval(t),
            Curve::Polygon(p) => p.eval(t),
        }
    }

    fn period(&self) -> f64 {
        match self {
            Curve::Analytic(_) => TAU,
            Curve::Polygon(_) => 1.0,
        }
    }
}

impl Source {
    fn check(&self) -> CliResult<()> {
        if self.input.is_some() && self.curve.is_some() {
            return Err(CliError::new("config", "give either --in or --curve, not both"));
        }
        if let Some(0) = self.count {
            return Err(CliError::new("config", "--count must be positive"));
        }
        Ok(())
    }

    /// Data file, or `count` samples of the curve (default 64).
    fn sequence(&self, ctx: &Context, default_curve: CurveKind) -> CliResult<PointSeq> {
        self.check()?;
        match &self.input {
            Some(path) => ctx.read_points(path),
            None => {
                let kind = self.curve.unwrap_or(default_curve);
                let c = sample_closed(|t| kind.eval(t), TAU, self.count.unwrap_or(64))
                    .map_err(|e| CliError::core("input", e))?;
                ctx.check_manifold(c.manifold())?;
                Ok(c)
            }
        }
    }

    fn curve(&self, ctx: &Context, default_curve: CurveKind) -> CliResult<Curve> {
        self.check()?;
        match &self.input {
            Some(path) => Ok(Curve::Polygon(polygon(&ctx.read_points(path)?)?)),
            None => {
                let kind = self.curve.unwrap_or(default_curve);
                ctx.check_manifold(kind.eval(0.0).manifold())?;
                Ok(Curve::Analytic(kind))
            }
        }
    }
}

#[derive(Debug, Serialize)]
struct StepRow {
    iteration: usize,
    step: f64,
}

#[derive(Debug, Serialize)]
struct StabilityRow {
    level: usize,
    budget: f64,
    deviation: f64,
}

#[derive(Debug, Serialize)]
struct RankRow<'a> {
    pair: &'a str,
    manifold: &'a str,
    n: usize,
    dim: usize,
    target: usize,
    rank: usize,
    projection_rank: usize,
    identity_rank: usize,
    verdict: &'a str,
}

#[derive(Debug, Serialize)]
struct SmoothingReportRow {
    rho: f64,
    point_error: f64,
    derivative_error: f64,
    point_ratio: Option<f64>,
    derivative_ratio: Option<f64>,
}

pub fn run_analyze(ctx: &Context, what: Analysis, source: &Source, generic: bool) -> CliResult<()> {
    let cfg = &ctx.cfg;
    let stage = "analyze";
    let fail = |e| CliError::core(stage, e);
    match what {
        Analysis::Decay => {
            let c = source.sequence(ctx, CurveKind::WarpedGreatCircle)?;
            let report = detail_decay(&c, &cfg.scheme()?, cfg.levels).map_err(fail)?;
            emit(ctx, &report.levels, &report)
        }
        Analysis::Proximity => {
            let curve = source.curve(ctx, CurveKind::SmallCircle)?;
            let len = source.count.unwrap_or(8);
            let rows =
                proximity_ratio(|t| curve.eval(t), curve.period(), len, &cfg.scheme()?, cfg.halvings).map_err(fail)?;
            emit(ctx, &rows, &rows)
        }
        Analysis::Contractivity => {
            let c = source.sequence(ctx, CurveKind::SmallCircle)?;
            let report = contractivity_estimate(&cfg.scheme()?, &c, cfg.iterations).map_err(fail)?;
            let rows: Vec<StepRow> =
                report.steps.iter().enumerate().map(|(iteration, &step)| StepRow { iteration, step }).collect();
            emit(ctx, &rows, &report)
        }
        Analysis::Stability => {
            let c = source.sequence(ctx, CurveKind::SmallCircle)?;
            let report = stability_experiment(&c, &cfg.scheme()?, &cfg.stability()).map_err(fail)?;
            let rows: Vec<StabilityRow> = report
                .budget
                .iter()
                .zip(&report.deviation)
                .enumerate()
                .map(|(level, (&budget, &deviation))| StabilityRow { level, budget, deviation })
                .collect();
            emit(ctx, &rows, &report)
        }
        Analysis::Rank => {
            let pair = if generic { RankPair::GenericAveraging } else { RankPair::Scheme(cfg.scheme()?) };
            let manifold = ctx.manifold.unwrap_or(Manifold::Sphere2);
            let r = rank_experiment(&pair, manifold, &cfg.rank()).map_err(fail)?;
            let row = RankRow {
                pair: &r.pair,
                manifold: &r.manifold,
                n: r.n,
                dim: r.dim,
                target: r.target,
                rank: r.rank,
                projection_rank: r.projection_rank,
                identity_rank: r.identity_rank,
                verdict: &r.verdict,
            };
            emit(ctx, &[row], &r)
        }
        Analysis::Smoothing => {
            let curve = source.curve(ctx, CurveKind::So3Screw)?;
            let count = source.count.unwrap_or(8);
            let params: Vec<f64> = (0..count).map(|k| k as f64 * curve.period() / count as f64).collect();
            let f = |t: f64| curve.eval(t);
            let rows = smoothing_convergence(f, &cfg.kernel(), &cfg.rhos, &params, &cfg.smoothing()).map_err(fail)?;
            let ratios = halving_ratios(&rows);
            let out: Vec<SmoothingReportRow> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| SmoothingReportRow {
                    rho: r.rho,
                    point_error: r.point_error,
                    derivative_error: r.derivative_error,
                    point_ratio: i.checked_sub(1).map(|j| ratios[j].0),
                    derivative_ratio: i.checked_sub(1).map(|j| ratios[j].1),
                })
                .collect();
            emit(ctx, &out, &out)
        }
    }
}
