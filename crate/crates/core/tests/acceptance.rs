//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geowave::analysis::curves::{
    random_loop, random_point, random_tangent, screw, small_circle, warped_circle_samples,
};
use geowave::analysis::{
    detail_decay, halving_ratios, proximity_ratio, rank_experiment, smoothing_convergence, stability_experiment,
    RankConfig, RankPair, StabilityConfig,
};
use geowave::averaging::{weighted_mean, Kernel, SmoothingOptions, WeightVector};
use geowave::geometry::{distance, oplus};
use geowave::pyramid::Pyramid;
use geowave::schemes::{Filter, LinearScheme, PointSeq, Scheme, SchemeKind, Seq, TangentSeq};
use geowave::{Manifold, Point, Tangent};

type Outcome = Result<(bool, String), String>;

fn max_dist(a: &PointSeq, b: &PointSeq) -> f64 {
    a.points().iter().zip(b.points()).map(|(p, q)| distance(p, q).unwrap()).fold(0.0, f64::max)
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Perfect reconstruction, 3 schemes × 3 backends × 100 sequences.
fn perfect_reconstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for scheme in [Scheme::haar(), Scheme::four_point(), Scheme::midpoint_haar()] {
        for m in [Manifold::Euclidean(3), Manifold::Sphere2, Manifold::SO3] {
            for _ in 0..100 {
                let c = random_loop(m, 16, 0.3, &mut rng).map_err(|e| e.to_string())?;
                let p = Pyramid::decompose(&c, &scheme, 3).map_err(|e| e.to_string())?;
                worst = worst.max(max_dist(&p.reconstruct().map_err(|e| e.to_string())?, &c));
            }
        }
    }
    Ok((worst <= 1e-9, format!("max error {worst:.2e} (limit 1e-9)")))
}

fn to_seq(c: &PointSeq) -> Seq<DVector<f64>> {
    Seq::periodic(c.points().iter().map(|p| DVector::from_vec(p.coords())).collect())
}

fn tangents(d: &TangentSeq) -> Seq<DVector<f64>> {
    Seq::periodic(d.vectors().iter().map(|v| DVector::from_column_slice(v.as_slice())).collect())
}

fn seq_diff(a: &Seq<DVector<f64>>, b: &Seq<DVector<f64>>) -> f64 {
    assert_eq!(a.len(), b.len());
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).amax()).fold(0.0, f64::max)
}

/// Euclidean pyramids against explicit linear filter computations.
fn linear_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let schemes = [
        Scheme::haar(),
        Scheme::four_point(),
        Scheme::midpoint_haar(),
        Scheme::new(SchemeKind::midpoint(Filter::average_interpolating()).unwrap()).unwrap(),
    ];
    let (mut geo, mut qmf, mut qs): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let c = PointSeq::periodic((0..16).map(|_| random_point(Manifold::Euclidean(3), &mut rng)).collect()).unwrap();
        let coarse_in =
            Seq::periodic((0..8).map(|_| DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0))).collect());
        for s in &schemes {
            let lin: LinearScheme = s.kind.linear();
            let p = Pyramid::decompose(&c, s, 3).map_err(|e| e.to_string())?;
            // linear analysis c^{j−1} = D c^j, d^j = Q c^j
            let mut cur = to_seq(&c);
            for j in (1..=3).rev() {
                geo = geo.max(seq_diff(&lin.details(&cur).unwrap(), &tangents(&p.details()[j - 1])));
                let next = lin.downscale(&cur).unwrap();
                qmf = qmf.max(seq_diff(&lin.reconstruct(&next, &lin.details(&cur).unwrap()).unwrap(), &cur));
                cur = next;
            }
            geo = geo.max(seq_diff(&cur, &to_seq(p.coarse())));
            // linear synthesis c^j = S c^{j−1} + R d^j
            for d in p.details() {
                cur = lin.reconstruct(&cur, &tangents(d)).unwrap();
            }
            geo = geo.max(seq_diff(&cur, &to_seq(&p.reconstruct().map_err(|e| e.to_string())?)));
            qs = qs.max(
                lin.details(&lin.upscale(&coarse_in).unwrap())
                    .unwrap()
                    .values
                    .iter()
                    .map(|v| v.amax())
                    .fold(0.0, f64::max),
            );
        }
    }
    let pass = geo <= 1e-12 && qmf <= 1e-12 && qs <= 1e-12;
    Ok((pass, format!("geometric vs linear {geo:.2e}, |SD+RQ-id| {qmf:.2e}, |QS| {qs:.2e} (limit 1e-12)")))
}

/// Detail decay on a great circle traversed with non-uniform speed.
fn detail_decay_rates() -> Outcome {
    let c = warped_circle_samples(8 << 7, 0.3).map_err(|e| e.to_string())?;
    let haar = detail_decay(&c, &Scheme::haar(), 7).map_err(|e| e.to_string())?;
    let four = detail_decay(&c, &Scheme::four_point(), 7).map_err(|e| e.to_string())?;
    let pick = |r: &geowave::analysis::DecayReport| -> Vec<f64> {
        r.ratios().into_iter().filter(|(j, _)| *j >= 3).map(|(_, q)| q).collect()
    };
    let (h, f) = (pick(&haar), pick(&four));
    let pass = h.len() == 4 && f.len() == 4 && h.iter().all(|q| (0.4..=0.6).contains(q)) && f.iter().all(|&q| q <= 0.3);
    Ok((pass, format!("haar ratios {} in [0.4, 0.6], four-point ratios {} <= 0.3", fmt_list(&h), fmt_list(&f))))
}

/// Proximity ratios over 4 refinements of a latitude-45° circle.
fn proximity() -> Outcome {
    let f = |t: f64| small_circle(t, FRAC_PI_4);
    let haar = proximity_ratio(f, TAU, 32, &Scheme::haar(), 4).map_err(|e| e.to_string())?;
    let four = proximity_ratio(f, TAU, 32, &Scheme::four_point(), 4).map_err(|e| e.to_string())?;
    let series = [
        ("haar S", haar.iter().map(|r| r.upscale_ratio).collect::<Vec<_>>()),
        ("haar D", haar.iter().map(|r| r.downscale_ratio).collect()),
        ("four-point S", four.iter().map(|r| r.upscale_ratio).collect()),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, s) in &series {
        let bounded = s.iter().all(|&r| r <= 1.5 * s[0]);
        pass &= bounded;
        parts.push(format!("{name} {}", fmt_list(s)));
    }
    Ok((pass, format!("{} (each <= 1.5 x first)", parts.join("; "))))
}

/// J-uniformity of the fitted stability constant.
fn stability() -> Outcome {
    let mut d_hat = Vec::new();
    let mut excluded = 0;
    for j in 3..=8usize {
        let c = PointSeq::periodic(
            (0..(8usize << j)).map(|k| small_circle(k as f64 * TAU / (8usize << j) as f64, FRAC_PI_4)).collect(),
        )
        .unwrap();
        let cfg = StabilityConfig { levels: j, trials: 50, e1: 1e-3, e2: 1e-3, mu: 0.5, seed: 1000 + j as u64 };
        let r = stability_experiment(&c, &Scheme::midpoint_haar(), &cfg).map_err(|e| e.to_string())?;
        excluded += r.excluded;
        d_hat.push(r.d_hat);
    }
    let max = d_hat.iter().copied().fold(0.0, f64::max);
    let min = d_hat.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max / min;
    Ok((
        spread <= 2.0 && excluded == 0,
        format!("D(J=3..8) {}, max/min {spread:.3} (limit 2), excluded {excluded}", fmt_list(&d_hat)),
    ))
}

/// Numerical rank of c ↦ c ⊖ SDc.
fn rank() -> Outcome {
    let cfg4 = RankConfig { n: 4, seed: 6, ..RankConfig::default() };
    let cfg8 = RankConfig { n: 8, seed: 6, ..RankConfig::default() };
    let haar =
        rank_experiment(&RankPair::Scheme(Scheme::haar()), Manifold::Sphere2, &cfg4).map_err(|e| e.to_string())?;
    let four = rank_experiment(&RankPair::Scheme(Scheme::four_point()), Manifold::Sphere2, &cfg8)
        .map_err(|e| e.to_string())?;
    let generic = rank_experiment(&RankPair::GenericAveraging, Manifold::Sphere2, &cfg4).map_err(|e| e.to_string())?;
    let identity_ok = haar.identity_rank == 16 && generic.identity_rank == 16 && four.identity_rank == 32;
    let pass = identity_ok && haar.rank == 8 && four.rank == 16 && generic.rank >= 9;
    Ok((
        pass,
        format!(
            "identity {}/{}/{}; haar n=4 rank {}, four-point n=8 rank {}, generic pair n=4 rank {} (want 16/32/16; 8, 16, >= 9)",
            haar.identity_rank, four.identity_rank, generic.identity_rank, haar.rank, four.rank, generic.rank
        ),
    ))
}

/// Linear convergence of cell-average smoothing on an SO3 screw curve.
fn smoothing() -> Outcome {
    let params: Vec<f64> = (0..8).map(|i| 0.4 * i as f64).collect();
    let rows = smoothing_convergence(
        |t| screw(t, 0.5),
        &Kernel::cell_average(),
        &[0.2, 0.1, 0.05],
        &params,
        &SmoothingOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let ratios = halving_ratios(&rows);
    let pass = ratios.iter().all(|(p, d)| (0.35..=0.65).contains(p) && (0.35..=0.65).contains(d));
    let p: Vec<f64> = ratios.iter().map(|r| r.0).collect();
    let d: Vec<f64> = ratios.iter().map(|r| r.1).collect();
    Ok((pass, format!("point ratios {}, derivative ratios {} in [0.35, 0.65]", fmt_list(&p), fmt_list(&d))))
}

/// Projected gradient descent on `∑ α_j arccos(⟨x_j, m⟩)²` in ambient coordinates.
fn brute_force_sphere_mean(xs: &[Vector3<f64>], w: &[f64]) -> Vector3<f64> {
    let mut m = xs.iter().zip(w).map(|(x, a)| x * *a).sum::<Vector3<f64>>().normalize();
    for _ in 0..100_000 {
        let mut g = Vector3::zeros();
        for (x, a) in xs.iter().zip(w) {
            let c = x.dot(&m).clamp(-1.0, 1.0);
            let theta = c.acos();
            let factor = if theta < 1e-12 { 1.0 } else { theta / theta.sin() };
            g -= 2.0 * a * factor * x;
        }
        let g = g - m * m.dot(&g);
        if g.norm() < 1e-8 {
            break;
        }
        m = (m - 0.25 * g).normalize();
    }
    m
}

fn karcher() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let centre = random_point(Manifold::Sphere2, &mut rng);
        let pts: Vec<Point> = (0..3)
            .map(|_| {
                let r = rng.random_range(0.0..1.0);
                oplus(&centre, &random_tangent(&centre, r, &mut rng)).unwrap()
            })
            .collect();
        let w = WeightVector::normalized((0..3).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap();
        let m = weighted_mean(&pts, &w, None).map_err(|e| e.to_string())?;
        let xs: Vec<Vector3<f64>> = pts.iter().map(|p| Vector3::from_vec(p.coords())).collect();
        let oracle = Point::sphere_normalized(brute_force_sphere_mean(&xs, w.as_slice())).unwrap();
        worst = worst.max(distance(&m, &oracle).unwrap());
    }
    Ok((worst <= 1e-6, format!("max distance to brute-force minimizer {worst:.2e} (limit 1e-6)")))
}

/// Reflection path vs adjoint formula for midpoint reconstruction on SO3.
fn adjoint_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let scheme = Scheme::new(SchemeKind::midpoint(Filter::average_interpolating()).unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let coarse = random_loop(Manifold::SO3, 8, 0.3, &mut rng).map_err(|e| e.to_string())?;
        let id = Manifold::SO3.reference_point();
        let d: Vec<Tangent> = (0..8).map(|_| random_tangent(&id, rng.random_range(0.0..0.3), &mut rng)).collect();
        let d = TangentSeq::new(d).unwrap();
        let a = scheme.detail_recon(&coarse, &d).map_err(|e| e.to_string())?;
        let b = scheme.detail_recon_adjoint(&coarse, &d).map_err(|e| e.to_string())?;
        worst = worst.max(max_dist(&a, &b));
    }
    Ok((worst <= 1e-10, format!("max disagreement {worst:.2e} (limit 1e-10)")))
}

/// Name, check, runtime limit.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 perfect reconstruction", perfect_reconstruction, Some(Duration::from_secs(5))),
        ("2 linear reduction", linear_reduction, None),
        ("3 detail decay", detail_decay_rates, Some(Duration::from_secs(5))),
        ("4 proximity", proximity, None),
        ("5 stability", stability, Some(Duration::from_secs(30))),
        ("6 rank obstruction", rank, None),
        ("7 smoothing convergence", smoothing, Some(Duration::from_secs(10))),
        ("8 Karcher mean", karcher, None),
        ("9 adjoint formula", adjoint_formula, None),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        if let Some(limit) = limit {
            if elapsed > limit {
                pass = false;
                detail.push_str(&format!("; runtime {:.2}s exceeds {}s", elapsed.as_secs_f64(), limit.as_secs()));
            }
        }
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {detail} ({:.2}s)", elapsed.as_secs_f64());
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
