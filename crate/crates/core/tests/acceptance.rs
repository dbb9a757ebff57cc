//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Oracles are written out here rather than taken from the
//! library's reference tables.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use holder_lab::convergence::{fit_holder, gh_upper_bound, uniform_distance, DistanceModel};
use holder_lab::experiments::{holder_lambda_search, run_experiment, ExperimentConfig};
use holder_lab::field::{density_estimate, volume};
use holder_lab::geodesic::{distance_matrix_on, DistanceMatrix, Grid, GridGraph, Stencil};
use holder_lab::metric::{MetricModel, ParamPoint, Rect, WarpingFunction};
use holder_lab::Result;

const SEED: u64 = 7_140_221;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn node_pairs(rng: &mut ChaCha8Rng, grid: &Grid, count: usize) -> Vec<ParamPoint> {
    let d = grid.domain();
    let mut pts = Vec::with_capacity(2 * count);
    while pts.len() < 2 * count {
        let mut draw = || {
            let p = ParamPoint::new(rng.random_range(d.u_min..d.u_max), rng.random_range(d.v_min..d.v_max));
            grid.point(grid.nearest_node(p))
        };
        let (a, b) = (draw(), draw());
        if a != b {
            pts.extend([a, b]);
        }
    }
    pts
}

fn pair_distance(graph: &GridGraph, p: ParamPoint, q: ParamPoint) -> Result<f64> {
    let g = graph.grid();
    Ok(graph.single_source(g.node_at(p)?).distance(g.node_at(q)?))
}

fn flat_exactness() -> Result<Outcome> {
    let start = Instant::now();
    let model = MetricModel::flat(Rect::unit())?;
    let grid = Grid::new(Rect::unit(), 256, 256)?.with_stencil(Stencil::Sixteen);
    let graph = GridGraph::build(&model, &grid)?;
    let pts = node_pairs(&mut ChaCha8Rng::seed_from_u64(SEED), &grid, 50);
    let d = distance_matrix_on(&graph, &pts)?;
    let ratios: Vec<f64> = (0..50).map(|i| d.get(2 * i, 2 * i + 1) / (pts[2 * i] - pts[2 * i + 1]).norm()).collect();
    let secs = start.elapsed().as_secs_f64();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    outcome(
        lo >= 1.0 - 1e-9 && hi <= 1.03 && secs < 30.0,
        format!("ratio in [{lo:.6}, {hi:.6}], {secs:.2}s"),
    )
}

/// d_j and d_inf of the plateau points `(-a, π)` and `(a, π + a)`,
/// `a = 1/(8j²)`, on a 513² window of side `4a`.
fn bump_pair(j: u32) -> Result<(f64, f64)> {
    let a = 1.0 / (8.0 * (j as f64).powi(2));
    let window = Rect::new(-2.0 * a, 2.0 * a, PI - 2.0 * a, PI + 2.0 * a);
    let grid = Grid::new(window, 513, 513)?;
    let (p, q) = (ParamPoint::new(-a, PI), ParamPoint::new(a, PI + a));
    let bump = MetricModel::warped(WarpingFunction::nonuniform(j, 0.5)?);
    let cylinder = MetricModel::warped(WarpingFunction::constant(1.0, -1.0, 1.0)?);
    Ok((
        pair_distance(&GridGraph::build(&bump, &grid)?, p, q)?,
        pair_distance(&GridGraph::build(&cylinder, &grid)?, p, q)?,
    ))
}

/// Straight plateau path: horizontal run `2a`, vertical run `a` at radius
/// `j^η + 1`.
fn plateau_length(j: u32, eta: f64) -> f64 {
    let a = 1.0 / (8.0 * (j as f64).powi(2));
    let radius = (j as f64).powf(eta) + 1.0;
    ((2.0 * a).powi(2) + (radius * a).powi(2)).sqrt()
}

fn bump_distance() -> Result<Outcome> {
    let (d2, _) = bump_pair(2)?;
    let (d4, _) = bump_pair(4)?;
    let want2 = (2.0 + 2.0 * SQRT_2 + 5.0f64).sqrt() / 8.0 / 4.0;
    let (e2, e4) = (rel(d2, want2), rel(d4, plateau_length(4, 0.5)));
    outcome(e2 <= 0.03 && e4 <= 0.05, format!("j=2 rel err {e2:.2e}, j=4 rel err {e4:.2e}"))
}

fn bump_ratio() -> Result<Outcome> {
    let mut ratios = Vec::new();
    let mut worst: f64 = 0.0;
    for j in [2, 4] {
        let (dj, dinf) = bump_pair(j)?;
        let je = (j as f64).sqrt();
        let want = (je * je + 2.0 * je + 5.0).sqrt() / 5f64.sqrt();
        worst = worst.max(rel(dj / dinf, want));
        ratios.push(dj / dinf);
    }
    let increasing = ratios[1] > ratios[0];
    outcome(worst <= 0.05 && increasing, format!("ratios {:.6} < {:.6}, max rel err {worst:.2e}", ratios[0], ratios[1]))
}

fn simpson(f: &dyn Fn(f64) -> f64, (a, b): (f64, f64), (fa, fm, fb): (f64, f64, f64), whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, (a, m), (fa, flm, fm), left, tol / 2.0, depth - 1) + simpson(f, (m, b), (fm, frm, fb), right, tol / 2.0, depth - 1)
}

fn adaptive_integral(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, (a, b), (fa, fm, fb), whole, 1e-12, 40)
}

fn bump_volume() -> Result<Outcome> {
    let mut worst_err: f64 = 0.0;
    let mut worst_vol: f64 = 0.0;
    for j in 1..=10 {
        let w = WarpingFunction::nonuniform(j, 0.5)?;
        let (a, b) = w.interval();
        let mut cuts = vec![a];
        cuts.extend(w.breakpoints().into_iter().filter(|&x| x > a && x < b));
        cuts.push(b);
        let f = |r: f64| w.value(r).expect("inside the interval");
        let oracle = 2.0 * PI * cuts.windows(2).map(|c| adaptive_integral(&f, c[0], c[1])).sum::<f64>();
        let model = MetricModel::warped(w);
        let vol = volume(&model, &Grid::for_model(&model, 8193, 8)?)?;
        worst_err = worst_err.max(rel(vol, oracle));
        worst_vol = worst_vol.max(vol);
    }
    outcome(
        worst_vol <= 16.0 * PI && worst_err <= 1e-6,
        format!("max volume {worst_vol:.4} vs 16pi, max rel err vs quadrature {worst_err:.2e}"),
    )
}

/// Arclength position along the unit square's perimeter, counterclockwise
/// from the origin.
fn perimeter(p: ParamPoint) -> f64 {
    let eps = 1e-12;
    if p.v <= eps {
        p.u
    } else if p.u >= 1.0 - eps {
        1.0 + p.v
    } else if p.v >= 1.0 - eps {
        3.0 - p.u
    } else {
        4.0 - p.v
    }
}

fn block_metric(matrices: &mut Vec<DistanceMatrix>) -> Result<Outcome> {
    let mut ok = true;
    let mut notes = Vec::new();
    for h in [2.0, 5.0] {
        let model = MetricModel::block(h)?;
        let grid = Grid::new(Rect::unit(), 257, 257)?;
        let graph = GridGraph::build(&model, &grid)?;
        let vol_err = rel(volume(&model, &grid)?, 1.0 + 4.0 * h);

        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ h as u64);
        let mut pts = Vec::new();
        while pts.len() < 40 {
            let t = rng.random_range(0.0..4.0);
            let p = match t {
                t if t < 1.0 => ParamPoint::new(t, 0.0),
                t if t < 2.0 => ParamPoint::new(1.0, t - 1.0),
                t if t < 3.0 => ParamPoint::new(3.0 - t, 1.0),
                t => ParamPoint::new(0.0, 4.0 - t),
            };
            let p = grid.point(grid.nearest_node(p));
            if pts.len() % 2 == 0 || pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        let d = distance_matrix_on(&graph, &pts)?;
        let path_err = (0..20)
            .map(|i| {
                let gap = (perimeter(pts[2 * i]) - perimeter(pts[2 * i + 1])).abs();
                rel(d.get(2 * i, 2 * i + 1), gap.min(4.0 - gap))
            })
            .fold(0.0, f64::max);

        let rim: Vec<usize> = (0..grid.node_count())
            .filter(|&n| {
                let p = grid.point(n);
                p.u.min(p.v).min(1.0 - p.u).min(1.0 - p.v).abs() < 1e-12
            })
            .collect();
        let far = graph.multi_source(&rim).eccentricity();
        ok &= vol_err <= 0.01 && path_err <= 0.03 && far <= 1.03 * (h + SQRT_2);
        notes.push(format!("h={h}: vol err {vol_err:.1e}, path err {path_err:.1e}, far {far:.3}"));
        matrices.push(d);
    }
    outcome(ok, notes.join("; "))
}

fn tiled_metric(matrices: &mut Vec<DistanceMatrix>) -> Result<Outcome> {
    let mut ok = true;
    let mut notes = Vec::new();
    for j in [2u32, 3] {
        let h = j as f64;
        let model = MetricModel::tiled(j, h)?;
        let tiles = 1usize << j;
        let side = 1.0 / tiles as f64;
        let n = 32 * 8 + 1;
        let grid = Grid::new(Rect::unit(), n, n)?;
        let graph = GridGraph::build(&model, &grid)?;

        let tile = Rect::new(side, 2.0 * side, 0.0, side);
        let tgrid = Grid::new(tile, 65, 65)?;
        let tile_err = rel(volume(&model, &tgrid)?, side * side * (1.0 + 4.0 * h));

        // Tile corners lie on the grid lines; the graph distance there is the
        // taxi distance.
        let corners: Vec<ParamPoint> = (0..=tiles)
            .flat_map(|a| (0..=tiles).map(move |b| ParamPoint::new(a as f64 * side, b as f64 * side)))
            .collect();
        let d = distance_matrix_on(&graph, &corners)?;
        let taxi_err = d
            .pairs()
            .map(|(a, b)| {
                let (p, q) = (corners[a], corners[b]);
                rel(d.get(a, b), (p.u - q.u).abs() + (p.v - q.v).abs())
            })
            .fold(0.0, f64::max);
        matrices.push(d);

        let mut rng = ChaCha8Rng::seed_from_u64(SEED + j as u64);
        let mixed = node_pairs(&mut rng, &grid, 24);
        let d = distance_matrix_on(&graph, &mixed)?;
        let gh = gh_upper_bound(&d, &DistanceModel::Taxi.to_matrix(&mixed)?)?;
        let delta = (h + SQRT_2 + 1.0) / 2f64.powi(j as i32);
        let flat = distance_matrix_on(&GridGraph::build(&MetricModel::flat(Rect::unit())?, &grid)?, &mixed)?;
        matrices.push(d);
        matrices.push(flat);

        ok &= tile_err <= 0.01 && taxi_err <= 0.03 && gh <= 1.03 * delta;
        notes.push(format!("j={j}: tile err {tile_err:.1e}, corner taxi err {taxi_err:.1e}, gh {gh:.3} vs delta {delta:.3}"));
    }
    outcome(ok, notes.join("; "))
}

fn holder_lambda() -> Result<Outcome> {
    let alpha = 0.5;
    let mut ok = true;
    let mut notes = Vec::new();
    for j in 2..=6u32 {
        let h = j as f64;
        let delta = (h + SQRT_2 + 1.0) / 2f64.powi(j as i32);
        let f = |s: f64| ((2.0 + h) * s).min(2.0 * s + delta);
        let found = holder_lambda_search(j, h, alpha)?;
        let kink = delta / h;
        let grid = (1..=10_000).map(|i| 2.0 * i as f64 / 10_000.0);
        let below = grid.clone().all(|s| f(s) <= found.lambda * s.powf(alpha) * (1.0 + 1e-12));
        let brute = grid.chain([kink]).map(|s| f(s) / s.powf(alpha)).fold(0.0, f64::max);
        let kink_ok = found.kink.is_some_and(|k| rel(k, kink) < 1e-12) && f(kink) <= found.lambda * kink.powf(alpha);
        ok &= below && kink_ok && rel(found.lambda, brute) < 1e-12;
        notes.push(format!("j={j} lambda={:.4}", found.lambda));
    }
    outcome(ok, notes.join(", "))
}

fn power_collapse() -> Result<Outcome> {
    let n = 64;
    let samples: Vec<ParamPoint> = (0..n).map(|i| ParamPoint::new(i as f64 / (n - 1) as f64, 0.0)).collect();
    let discrete = DistanceModel::Discrete.to_matrix(&samples)?;
    let sep = 1.0 / (n - 1) as f64;
    let mut worst: f64 = 0.0;
    let mut smallest = f64::INFINITY;
    let mut fixed = Vec::new();
    for j in 1..=40u32 {
        let sup = uniform_distance(&DistanceModel::Power(j).to_matrix(&samples)?, &discrete)?;
        worst = worst.max((sup - (1.0 - sep.powf(1.0 / j as f64))).abs());
        smallest = smallest.min(sup);
        fixed.push(1.0 - 0.5f64.powf(1.0 / j as f64));
    }
    let shrinking = fixed.windows(2).all(|w| w[1] < w[0]) && *fixed.last().unwrap() < 0.02;
    outcome(
        worst <= 1e-12 && smallest > 0.09 && shrinking,
        format!("max err {worst:.1e}, sup deviation stays >= {smallest:.3}, pair (0,1/2) -> {:.4}", fixed.last().unwrap()),
    )
}

fn pole_ratios(w: WarpingFunction, radii: &[f64]) -> Result<Vec<f64>> {
    let model = MetricModel::warped(w);
    let grid = Grid::for_model(&model, 1024, 32)?;
    let pole = grid.pole_max_node().expect("sphere profile");
    Ok(density_estimate(&model, &grid, pole, radii)?.ratios)
}

fn density_dichotomy() -> Result<Outcome> {
    let cone = pole_ratios(WarpingFunction::cone(None)?, &[0.1])?[0];
    let cusp = pole_ratios(WarpingFunction::cusp(None)?, &[0.4, 0.1])?;
    let model = MetricModel::flat(Rect::unit())?;
    let grid = Grid::new(Rect::unit(), 256, 256)?;
    let flat = density_estimate(&model, &grid, grid.nearest_node(ParamPoint::new(0.5, 0.5)), &[0.1])?.ratios[0];
    let cusp_ratio = cusp[1] / cusp[0];
    outcome(
        rel(cone, 2.0) <= 0.1 && cusp_ratio <= 0.5 && rel(flat, PI) <= 0.05,
        format!("cone {cone:.4}, cusp ratio {cusp_ratio:.4}, flat {flat:.4}"),
    )
}

fn cinch_distance(n_u: usize, n_v: usize, samples: &[ParamPoint]) -> Result<(DistanceMatrix, DistanceMatrix)> {
    let base = MetricModel::warped_torus(WarpingFunction::constant(1.0, -PI, PI)?)?;
    let model = MetricModel::warped_torus(WarpingFunction::cinch(32, 0.5)?)?;
    let grid = Grid::for_model(&model, n_u, n_v)?;
    let pts: Vec<ParamPoint> = samples.iter().map(|&p| grid.point(grid.nearest_node(p))).collect();
    Ok((
        distance_matrix_on(&GridGraph::build(&model, &grid)?, &pts)?,
        distance_matrix_on(&GridGraph::build(&base, &grid)?, &pts)?,
    ))
}

fn cinched_torus(matrices: &mut Vec<DistanceMatrix>) -> Result<Outcome> {
    let h0 = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut samples = vec![ParamPoint::new(0.0, 0.0), ParamPoint::new(0.0, PI)];
    samples.extend((0..24).map(|_| ParamPoint::new(rng.random_range(-PI..PI), rng.random_range(0.0..2.0 * PI))));
    let (dj, d0) = cinch_distance(512, 256, &samples)?;
    let (fine, _) = cinch_distance(1024, 512, &samples[..2])?;
    let (coarse, oracle) = (dj.get(0, 1), fine.get(0, 1));
    let c_hat = fit_holder(&dj, &d0, 1.0)?.c_hat;
    matrices.extend([dj, d0]);
    outcome(
        rel(coarse, oracle) <= 0.1 && rel(coarse, h0 * PI) <= 0.1 && c_hat <= h0 + 0.1,
        format!("d_j {coarse:.6}, double resolution {oracle:.6}, h0*pi {:.6}, min ratio {c_hat:.4}", h0 * PI),
    )
}

fn rows(name: &str) -> Result<Vec<(String, f64)>> {
    let report = run_experiment(&ExperimentConfig::new(name))?;
    Ok(report.rows.into_iter().map(|r| (r.quantity, r.computed)).collect())
}

fn trace_stability() -> Result<Outcome> {
    let maxima: Vec<f64> = rows("trace")?.into_iter().filter(|(q, _)| q == "max trace ratio").map(|(_, x)| x).collect();
    let change = rel(maxima[1], maxima[0]);
    outcome(
        maxima.len() == 2 && maxima.iter().all(|m| m.is_finite() && *m > 0.0) && change <= 0.25,
        format!("max ratio {:.4} -> {:.4}, change {:.1}%", maxima[0], maxima[1], 100.0 * change),
    )
}

fn trace_counterexample() -> Result<Outcome> {
    let out = rows("trace-counterexample")?;
    let pick = |name: &str| -> Vec<f64> { out.iter().filter(|(q, _)| q == name).map(|(_, x)| *x).collect() };
    let (traces, norms) = (pick("trace along gamma"), pick("L2 norm"));
    // γ sits half a column from x = 0 on an n-column grid of [-1/2, 1/2],
    // where |ln x| is constant: trace = 1/2 · ln(2(n - 1)).
    let trace_err = traces
        .iter()
        .enumerate()
        .map(|(k, t)| rel(*t, 0.5 * (2.0 * ((64usize << k) - 1) as f64).ln()))
        .fold(0.0, f64::max);
    // ‖ln x‖² over [0, 1/4] × [-1/4, 1/4] is (1/2) x (ln²x - 2 ln x + 2) at x = 1/4.
    let l = 0.25f64.ln();
    let exact = (0.5 * 0.25 * (l * l - 2.0 * l + 2.0)).sqrt();
    let growth: Vec<f64> = traces.windows(2).map(|w| w[1] / w[0]).collect();
    let norm_change = norms.windows(2).map(|w| rel(w[1], w[0])).fold(0.0, f64::max);
    let norm_err = norms.iter().map(|n| rel(*n, exact)).fold(0.0, f64::max);
    outcome(
        growth.len() == 3 && growth.iter().all(|g| *g >= 1.1) && norm_change <= 0.02 && trace_err < 1e-9 && norm_err <= 0.02,
        format!(
            "growth {}, norm change <= {:.2}%, trace vs closed form {trace_err:.1e}, norm vs exact {norm_err:.1e}",
            growth.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>().join("/"),
            100.0 * norm_change
        ),
    )
}

fn axioms_and_domination(matrices: &[DistanceMatrix]) -> Result<Outcome> {
    let broken = matrices.iter().filter(|m| !m.axioms().is_metric()).count();

    let cylinder = MetricModel::warped(WarpingFunction::constant(1.0, -1.0, 1.0)?);
    let grid = Grid::for_model(&cylinder, 128, 128)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let samples: Vec<ParamPoint> = (0..16)
        .map(|_| grid.point(grid.nearest_node(ParamPoint::new(rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI)))))
        .collect();
    let d1 = distance_matrix_on(&GridGraph::build(&cylinder, &grid)?, &samples)?;
    let mut dominated = true;
    let mut checked = matrices.len() + 1;
    for j in [2, 4, 8] {
        let dj = distance_matrix_on(&GridGraph::build(&MetricModel::warped(WarpingFunction::nonuniform(j, 0.5)?), &grid)?, &samples)?;
        dominated &= dj.pairs().all(|(a, b)| dj.get(a, b) >= d1.get(a, b));
        dominated &= dj.axioms().is_metric();
        checked += 1;
    }
    outcome(
        broken == 0 && d1.axioms().is_metric() && dominated,
        format!("{checked} matrices, {broken} failing axioms, domination {}", if dominated { "holds" } else { "violated" }),
    )
}

fn main() -> ExitCode {
    let mut matrices = Vec::new();
    let mut results: Vec<(&str, Result<Outcome>)> = vec![
        ("1 flat exactness", flat_exactness()),
        ("2 plateau distance", bump_distance()),
        ("3 plateau ratio growth", bump_ratio()),
        ("4 bump volume", bump_volume()),
    ];
    results.push(("5 block metric", block_metric(&mut matrices)));
    results.push(("6 tiled metric", tiled_metric(&mut matrices)));
    results.push(("7 holder lambda", holder_lambda()));
    results.push(("8 power collapse", power_collapse()));
    results.push(("9 density dichotomy", density_dichotomy()));
    results.push(("10 cinched torus", cinched_torus(&mut matrices)));
    results.push(("11 trace stability", trace_stability()));
    results.push(("12 trace counterexample", trace_counterexample()));
    let axioms = axioms_and_domination(&matrices);
    results.push(("13 axioms and domination", axioms));

    let mut failed = 0;
    for (name, result) in &results {
        match result {
            Ok(o) => {
                println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
                failed += !o.pass as usize;
            }
            Err(e) => {
                println!("FAIL {name}: error: {e}");
                failed += 1;
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
