use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convergence::{fit_holder, gh_upper_bound, pointwise_convergence_report, uniform_distance, DistanceModel};
use crate::error::Result;
use crate::field::{
    density_estimate, lq_norm, sample_geodesics, sobolev_w1p_norm, tensor_norm_field, trace_integral,
    trace_ratio_for_field, trace_ratio_test, volume, ScalarField,
};
use crate::geodesic::{distance_matrix_on, path_to_node, DistanceMatrix, Grid, GridGraph, Stencil};
use crate::metric::{MetricModel, ParamPoint, Rect, WarpingFunction};

use super::params::Params;
use super::reference::{
    bump_limit_distance, bump_path_length, bump_volume, holder_lambda_search, majorant, tiled_delta,
};
use super::report::ExperimentReport;

/// `r`-rows used for warped-product volumes.
const VOLUME_ROWS: usize = 8193;

/// Slack below 1 allowed for ratios that are ≥ 1 in exact arithmetic but
/// pass through quantized edge weights.
const QUANTIZATION_SLACK: f64 = 1e-9;

/// Smallest `m ≥ n` with `m - 1` a multiple of `k`, so that lines at
/// multiples of `1/k` fall on nodes.
fn aligned(n: usize, k: usize) -> usize {
    (n - 1).div_ceil(k) * k + 1
}

/// `2/4/8` style list for case labels (no commas, so CSV fields stay bare).
fn join(js: &[u32]) -> String {
    js.iter().map(u32::to_string).collect::<Vec<_>>().join("/")
}

fn even(n: usize) -> usize {
    n + n % 2
}

fn random_point(rng: &mut ChaCha8Rng, d: Rect) -> ParamPoint {
    ParamPoint::new(rng.random_range(d.u_min..d.u_max), rng.random_range(d.v_min..d.v_max))
}

fn axioms(report: &mut ExperimentReport, case: &str, name: &str, m: &DistanceMatrix) {
    report.flag(case, &format!("metric axioms {name}"), m.axioms().is_metric());
}

fn distance_between(graph: &GridGraph, p: ParamPoint, q: ParamPoint) -> Result<f64> {
    let g = graph.grid();
    Ok(graph.single_source(g.node_at(p)?).distance(g.node_at(q)?))
}

fn overshoot_budget(stencil: Stencil) -> f64 {
    1.03f64.max(stencil.overshoot_bound())
}

pub(super) fn flat_check(prm: &Params, rep: &mut ExperimentReport) -> Result<()> {
    let model = MetricModel::flat(Rect::unit())?;
    let grid = Grid::new(Rect::unit(), prm.grid, prm.grid)?.with_stencil(prm.stencil);
    let graph = GridGraph::build(&model, &grid)?;
    let case = format!("n={} stencil={}", prm.grid, prm.stencil);

    let mut rng = ChaCha8Rng::seed_from_u64(prm.seed);
    let mut pts = Vec::with_capacity(2 * prm.pairs);
    while pts.len() < 2 * prm.pairs {
        let a = grid.nearest_node(random_point(&mut rng, grid.domain()));
        let b = grid.nearest_node(random_point(&mut rng, grid.domain()));
        if a != b {
            pts.push(grid.point(a));
            pts.push(grid.point(b));
        }
    }
    let d = distance_matrix_on(&graph, &pts)?;
    let ratios: Vec<f64> = (0..prm.pairs).map(|i| d.get(2 * i, 2 * i + 1) / (pts[2 * i] - pts[2 * i + 1]).norm()).collect();
    let pair_case = format!("{case} pairs={}", prm.pairs);
    rep.upper(&pair_case, "max d/euclid", ratios.iter().copied().fold(0.0, f64::max), overshoot_budget(prm.stencil));
    rep.lower(&pair_case, "min d/euclid", ratios.iter().copied().fold(f64::INFINITY, f64::min), 1.0 - QUANTIZATION_SLACK);
    axioms(rep, &pair_case, "flat", &d);

    rep.check(&case, "volume", volume(&model, &grid)?, 1.0, 1e-10);
    let center = grid.nearest_node(ParamPoint::new(0.5, 0.5));
    let est = density_estimate(&model, &grid, center, &[0.2, 0.1])?;
    rep.check(&format!("{case} r=0.1"), "ball density", est.ratios[1], PI, 0.05);

    let cyl = MetricModel::warped(WarpingFunction::constant(1.0, -1.0, 1.0)?);
    let cgrid = Grid::for_model(&cyl, VOLUME_ROWS, 8)?;
    rep.check("f=1 on [-1,1]xS1", "volume", volume(&cyl, &cgrid)?, 4.0 * PI, 1e-6);
    Ok(())
}

pub(super) fn nonuniform(prm: &Params, rep: &mut ExperimentReport) -> Result<()> {
    let eta = prm.eta;
    let alpha = 1.0 - eta / 2.0;
    let base = MetricModel::warped(WarpingFunction::constant(1.0, -1.0, 1.0)?);
    let mut ratios = Vec::new();

    // Global sample avoiding every bump: |r| in [1/2, 1], both sides.
    let n_u = prm.n_u.unwrap_or(prm.grid);
    let n_v = prm.n_v.unwrap_or(prm.grid);
    let ggrid = Grid::for_model(&base, n_u, n_v)?.with_stencil(prm.stencil);
    let mut rng = ChaCha8Rng::seed_from_u64(prm.seed);
    let samples: Vec<ParamPoint> = (0..prm.samples)
        .map(|i| {
            let r = rng.random_range(0.5..1.0) * if i % 2 == 0 { 1.0 } else { -1.0 };
            ParamPoint::new(r, rng.random_range(0.0..2.0 * PI))
        })
        .collect();
    let d_base = distance_matrix_on(&GridGraph::build(&base, &ggrid)?, &samples)?;
    let global_case = format!("n={n_u}x{n_v} samples={}", prm.samples);
    axioms(rep, &global_case, "f=1", &d_base);
    let mut sequence = Vec::new();

    for &j in &prm.j {
        let case = format!("j={j} eta={eta}");
        let warping = WarpingFunction::nonuniform(j, eta)?;
        let model = MetricModel::warped(warping);

        // Local window on the plateau, critical points on nodes.
        let a = 1.0 / (8.0 * (j as f64).powi(2));
        let m = (prm.local_grid / 4).max(2);
        let window = Rect::new(-2.0 * a, 2.0 * a, PI - 2.0 * a, PI + 2.0 * a);
        let local = Grid::new(window, 4 * m + 1, 4 * m + 1)?.with_stencil(prm.stencil);
        let (p, q) = (ParamPoint::new(-a, PI), ParamPoint::new(a, PI + a));
        let dj = distance_between(&GridGraph::build(&model, &local)?, p, q)?;
        let dinf = distance_between(&GridGraph::build(&base, &local)?, p, q)?;
        let local_case = format!("{case} window={}", 4 * m + 1);
        let l = bump_path_length(j, eta);
        let linf = bump_limit_distance(j);
        rep.check(&local_case, "d_j(p_j,q_j)", dj, l, prm.tolerance);
        rep.check(&local_case, "d_inf(p_j,q_j)", dinf, linf, prm.tolerance);
        rep.check(&local_case, "d_j/d_inf", dj / dinf, l / linf, 0.05);
        rep.info(&local_case, &format!("d_j/d_inf^{alpha}"), dj / dinf.powf(alpha));
        ratios.push(dj / dinf);

        let vgrid = Grid::for_model(&model, VOLUME_ROWS, 8)?;
        let vol = volume(&model, &vgrid)?;
        rep.check(&case, "volume", vol, bump_volume(j, eta), 1e-6);
        rep.upper(&case, "volume bound", vol, 16.0 * PI);

        let tn = tensor_norm_field(&model, &base, &ggrid)?;
        rep.info(&format!("{case} n={n_u}x{n_v}"), "W12 norm of |g_j|_g0", sobolev_w1p_norm(&tn, &base, 2.0)?);

        let d = distance_matrix_on(&GridGraph::build(&model, &ggrid)?, &samples)?;
        let gcase = format!("{global_case} j={j} eta={eta}");
        axioms(rep, &gcase, "d_j", &d);
        let fit = fit_holder(&d, &d_base, alpha)?;
        rep.info(&gcase, &format!("sample lower bound of lambda (alpha={alpha})"), fit.lambda_hat);
        rep.lower(&gcase, "min d_j/d_1", fit.c_hat, 1.0);
        rep.info(&gcase, "uniform distance to f=1", uniform_distance(&d, &d_base)?);
        sequence.push((j, d));
    }
    rep.flag(&format!("j={}", join(&prm.j)), "d_j/d_inf strictly increasing", ratios.windows(2).all(|w| w[1] > w[0]));
    let conv = pointwise_convergence_report(&sequence, &d_base)?;
    rep.flag(&global_case, "uniform distance nonincreasing in j", conv.sup.windows(2).all(|w| w[1] <= w[0]));
    Ok(())
}

pub(super) fn power_holder(prm: &Params, rep: &mut ExperimentReport) -> Result<()> {
    let n = prm.samples.max(2);
    // dyadic-friendly nodes i/n keep the j = 1 distances exact
    let samples: Vec<ParamPoint> = (0..n).map(|i| ParamPoint::new(i as f64 / n as f64, 0.0)).collect();
    let discrete = DistanceModel::Discrete.to_matrix(&samples)?;
    let mut sequence = Vec::new();
    for &j in &prm.j {
        let case = format!("j={j} n={n}");
        let d = DistanceModel::Power(j).to_matrix(&samples)?;
        axioms(rep, &case, "power", &d);
        rep.check(&case, "sup deviation", uniform_distance(&d, &discrete)?, 1.0 - (1.0 / n as f64).powf(1.0 / j as f64), 1e-12);
        sequence.push((j, d));
    }
    let conv = pointwise_convergence_report(&sequence, &discrete)?;
    let case = format!("j={} n={n}", join(&prm.j));
    let decreasing = conv.pairs.iter().all(|p| p.deviations.windows(2).all(|w| w[1] < w[0]));
    rep.flag(&case, "every pair deviation strictly decreasing in j", decreasing);
    rep.info(&case, "smallest sup deviation", conv.sup.iter().copied().fold(f64::INFINITY, f64::min));
    let mid = conv.pair(0, n / 2).map(|p| *p.deviations.last().unwrap_or(&0.0)).unwrap_or(0.0);
    rep.info(&case, "deviation of (0, 1/2) at last j", mid);

    let d1 = DistanceModel::Power(1).to_matrix(&samples)?;
    let d2 = DistanceModel::Power(2).to_matrix(&samples)?;
    rep.check(&format!("n={n} alpha=0.5"), "lambda_hat power(2) vs power(1)", fit_holder(&d2, &d1, 0.5)?.lambda_hat, 1.0, 1e-12);
    Ok(())
}

#[derive(Clone, Copy)]
pub(super) enum Tip {
    Cusp,
    Cone,
}

pub(super) fn sphere_tip(prm: &Params, rep: &mut ExperimentReport, tip: Tip) -> Result<()> {
    let radii = [0.4, 0.2, 0.1];
    let make = |j: Option<u32>| match tip {
        Tip::Cusp => WarpingFunction::cusp(j),
        Tip::Cone => WarpingFunction::cone(j),
    };
    let n_u = prm.n_u.unwrap_or(4 * prm.grid);
    let n_v = prm.n_v.unwrap_or(32);
    let estimate = |w: WarpingFunction| -> Result<(Vec<f64>, f64)> {
        let model = MetricModel::warped(w);
        let grid = Grid::for_model(&model, n_u, n_v)?.with_stencil(prm.stencil);
        let pole = grid.pole_max_node().expect("sphere profiles have poles");
        let est = density_estimate(&model, &grid, pole, &radii)?;
        Ok((est.ratios, volume(&model, &grid)?))
    };
    let (limit, _) = estimate(make(None)?)?;
    let case = format!("limit n={n_u}x{n_v}");
    for (r, x) in radii.iter().zip(&limit) {
        rep.info(&format!("{case} r={r}"), "ball density", *x);
    }
    match tip {
        Tip::Cone => rep.check(&format!("{case} r=0.1"), "ball density", limit[2], 2.0, 0.1),
        Tip::Cusp => rep.upper(&case, "density ratio r=0.1/r=0.4", limit[2] / limit[0], 0.5),
    }
    for &j in &prm.j {
        let (ratios, vol) = estimate(make(Some(j))?)?;
        let case = format!("j={j} n={n_u}x{n_v}");
        rep.info(&format!("{case} r=0.1"), "ball density", ratios[2]);
        rep.info(&case, "volume", vol);
    }
    Ok(())
}

pub(super) fn cinch(prm: &Params, rep: &mut ExperimentReport) -> Result<()> {
    let base = MetricModel::warped_torus(WarpingFunction::constant(1.0, -PI, PI)?)?;
    let n_u = even(prm.n_u.unwrap_or(2 * prm.grid));
    let n_v = even(prm.n_v.unwrap_or(prm.grid));
    let grid = Grid::for_model(&base, n_u, n_v)?.with_stencil(prm.stencil);
    let (p, q) = (ParamPoint::new(0.0, 0.0), ParamPoint::new(0.0, PI));
    let mut rng = ChaCha8Rng::seed_from_u64(prm.seed);
    let mut samples = vec![p, q];
    samples.extend((0..prm.samples).map(|_| random_point(&mut rng, grid.domain())));
    let d0 = distance_matrix_on(&GridGraph::build(&base, &grid)?, &samples)?;
    let case0 = format!("n={n_u}x{n_v}");
    rep.check(&case0, "d_0((0,0),(0,pi))", d0.get(0, 1), PI, prm.tolerance);
    axioms(rep, &case0, "d_0", &d0);
    for &j in &prm.j {
        let model = MetricModel::warped_torus(WarpingFunction::cinch(j, prm.h0)?)?;
        let d = distance_matrix_on(&GridGraph::build(&model, &grid)?, &samples)?;
        let case = format!("j={j} h0={} n={n_u}x{n_v}", prm.h0);
        rep.check(&case, "d_j((0,0),(0,pi))", d.get(0, 1), prm.h0 * PI, 0.1);
        let fit = fit_holder(&d, &d0, 1.0)?;
        rep.upper(&case, "min pair ratio d_j/d_0", fit.c_hat, prm.h0 + 0.1);
        rep.info(&case, "sample lower bound of lambda (alpha=1)", fit.lambda_hat);
        axioms(rep, &case, "d_j", &d);
    }
    Ok(())
}

/// Arclength position of a boundary point along the square's perimeter.
fn perimeter_position(p: ParamPoint) -> f64 {
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

fn perimeter_point(t: f64) -> ParamPoint {
    match t {
        t if t < 1.0 => ParamPoint::new(t, 0.0),
        t if t < 2.0 => ParamPoint::new(1.0, t - 1.0),
        t if t < 3.0 => ParamPoint::new(3.0 - t, 1.0),
        t => ParamPoint::new(0.0, 4.0 - t),
    }
}

pub(super) fn blocks(prm: &Params, rep: &mut ExperimentReport) -> Result<()> {
    let n = aligned(prm.grid, 4);
    for &h in &prm.h {
        let model = MetricModel::block(h)?;
        let grid = Grid::new(Rect::unit(), n, n)?.with_stencil(prm.stencil);
        let graph = GridGraph::build(&model, &grid)?;
        let case = format!("h={h} n={n}");
        rep.check(&case, "volume", volume(&model, &grid)?, 1.0 + 4.0 * h, 0.01);

        let mut rng = ChaCha8Rng::seed_from_u64(prm.seed);
        let mut pts = Vec::with_capacity(2 * prm.pairs);
        while pts.len() < 2 * prm.pairs {
            let a = grid.point(grid.nearest_node(perimeter_point(rng.random_range(0.0..4.0))));
            let b = grid.point(grid.nearest_node(perimeter_point(rng.random_range(0.0..4.0))));
            if a != b {
                pts.extend([a, b]);
            }
        }
        let d = distance_matrix_on(&graph, &pts)?;
        let worst = (0..prm.pairs)
            .map(|i| {
                let gap = (perimeter_position(pts[2 * i]) - perimeter_position(pts[2 * i + 1])).abs();
                let along = gap.min(4.0 - gap);
                (d.get(2 * i, 2 * i + 1) - along).abs() / along
            })
            .fold(0.0, f64::max);
        rep.upper(&format!("{case} pairs={}", prm.pairs), "max rel deviation from boundary path", worst, prm.tolerance);
        axioms(rep, &case, "block", &d);

        let boundary: Vec<usize> = (0..grid.node_count())
            .filter(|&v| {
                let p = grid.point(v);
                [p.u, p.v, 1.0 - p.u, 1.0 - p.v].iter().any(|x| x.abs() < 1e-12)
            })
            .collect();
        let far = graph.multi_source(&boundary).eccentricity();
        rep.info(&case, "max distance to boundary", far);
        rep.upper(&case, "max distance to boundary vs 1.03(h+sqrt2)", far, 1.03 * (h + SQRT_2));
    }
    Ok(())
}

/// A uniformly random node on the tile lines `x = k/2^j` or `y = k/2^j`.
fn grid_line_point(rng: &mut ChaCha8Rng, grid: &Grid, tiles: usize) -> ParamPoint {
    let line = rng.random_range(0..=tiles) as f64 / tiles as f64;
    let t = rng.random_range(0.0..1.0);
    let p = if rng.random_bool(0.5) { ParamPoint::new(line, t) } else { ParamPoint::new(t, line) };
    grid.point(grid.nearest_node(p))
}

pub(super) fn tiled(prm: &Params, rep: &mut ExperimentReport) -> Result<()> {
    for (&j, &h) in prm.j.iter().zip(&prm.h) {
        let model = MetricModel::tiled(j, h)?;
        let tiles = 1usize << j;
        let n = aligned(prm.grid, 4 * tiles);
        let grid = Grid::new(Rect::unit(), n, n)?.with_stencil(prm.stencil);
        let case = format!("j={j} h={h} n={n}");
        rep.check(&case, "volume", volume(&model, &grid)?, 1.0 + 4.0 * h, 0.01);
        let side = 1.0 / tiles as f64;
        for (l, m) in [(0, 0), (tiles - 1, tiles / 2)] {
            let rect = Rect::new(l as f64 * side, (l + 1) as f64 * side, m as f64 * side, (m + 1) as f64 * side);
            let tgrid = Grid::new(rect, 65, 65)?;
            let tile_case = format!("j={j} h={h} tile=({l},{m})");
            rep.check(&tile_case, "tile volume", volume(&model, &tgrid)?, (1.0 + 4.0 * h) * side * side, 0.01);
        }

        let graph = GridGraph::build(&model, &grid)?;
        let mut rng = ChaCha8Rng::seed_from_u64(prm.seed ^ j as u64);

        // Tile corners: graph distance should be the taxi distance.
        let corners = (tiles + 1) * (tiles + 1);
        let mut vertex_pts: Vec<ParamPoint> = Vec::new();
        while vertex_pts.len() < prm.samples.clamp(2, corners) {
            let (l, m) = (rng.random_range(0..=tiles), rng.random_range(0..=tiles));
            let p = grid.point(grid.nearest_node(ParamPoint::new(l as f64 * side, m as f64 * side)));
            if !vertex_pts.contains(&p) {
                vertex_pts.push(p);
            }
        }
        let d = distance_matrix_on(&graph, &vertex_pts)?;
        let taxi = DistanceModel::Taxi.to_matrix(d.samples())?;
        let worst = d.pairs().map(|(a, b)| (d.get(a, b) - taxi.get(a, b)).abs() / taxi.get(a, b)).fold(0.0, f64::max);
        let vertex_case = format!("{case} corners={}", vertex_pts.len());
        rep.upper(&vertex_case, "max rel deviation from taxi at tile corners", worst, prm.tolerance);
        axioms(rep, &vertex_case, "tile corners", &d);

        // Anywhere else on the tile lines a path may detour to a corner:
        // taxi ≤ d_j ≤ taxi + 2/2^j.
        let mut line_pts: Vec<ParamPoint> = Vec::new();
        while line_pts.len() < prm.samples.max(2) {
            let p = grid_line_point(&mut rng, &grid, tiles);
            if !line_pts.contains(&p) {
                line_pts.push(p);
            }
        }
        let d = distance_matrix_on(&graph, &line_pts)?;
        let taxi = DistanceModel::Taxi.to_matrix(d.samples())?;
        let excess: Vec<f64> = d.pairs().map(|(a, b)| d.get(a, b) - taxi.get(a, b)).collect();
        let line_case = format!("{case} samples={}", line_pts.len());
        rep.upper(&line_case, "max d_j - taxi on tile lines", excess.iter().copied().fold(f64::MIN, f64::max), 1.03 * 2.0 * side);
        rep.lower(&line_case, "min d_j - taxi on tile lines", excess.iter().copied().fold(f64::MAX, f64::min), -QUANTIZATION_SLACK);
        axioms(rep, &line_case, "tile lines", &d);

        let mut mixed = line_pts.clone();
        while mixed.len() < 2 * line_pts.len() {
            let p = grid.point(grid.nearest_node(random_point(&mut rng, grid.domain())));
            if !mixed.contains(&p) {
                mixed.push(p);
            }
        }
        let dm = distance_matrix_on(&graph, &mixed)?;
        let taxi_m = DistanceModel::Taxi.to_matrix(dm.samples())?;
        let delta = tiled_delta(j, h);
        let mixed_case = format!("{case} samples={}", mixed.len());
        rep.upper(&mixed_case, "gh upper bound vs taxi (bound 1.03 delta_j)", gh_upper_bound(&dm, &taxi_m)?, 1.03 * delta);
        axioms(rep, &mixed_case, "mixed", &dm);
        let flat = distance_matrix_on(&GridGraph::build(&MetricModel::flat(Rect::unit())?, &grid)?, &mixed)?;
        rep.lower(&mixed_case, "min d_j/d_0", fit_holder(&dm, &flat, 1.0)?.c_hat, 1.0 - QUANTIZATION_SLACK);
    }
    Ok(())
}

pub(super) fn holder_lambda(prm: &Params, rep: &mut ExperimentReport) -> Result<()> {
    let alpha = prm.alpha;
    let mut worst: f64 = 0.0;
    for (&j, &h) in prm.j.iter().zip(&prm.h) {
        let s = holder_lambda_search(j, h, alpha)?;
        let case = format!("j={j} h={h} alpha={alpha}");
        rep.info(&case, "lambda_alpha", s.lambda);
        worst = worst.max(s.lambda);
        let violation = (1..=super::reference::LAMBDA_GRID)
            .map(|i| 2.0 * i as f64 / super::reference::LAMBDA_GRID as f64)
            .map(|x| majorant(h, s.delta, x) - s.lambda * x.powf(alpha))
            .fold(f64::NEG_INFINITY, f64::max);
        rep.upper(&case, "max of f_j(s) - lambda s^alpha on grid", violation, 1e-12);
        rep.upper(&case, "f_j(2) - lambda 2^alpha", majorant(h, s.delta, 2.0) - s.lambda * 2f64.powf(alpha), 1e-12);
        if let (Some(k), Some(kr)) = (s.kink, s.kink_ratio(h, alpha)) {
            rep.info(&case, "kink s=delta_j/h_j", k);
            rep.lower(&case, "lambda vs ratio at kink", s.lambda, kr);
            let exact = kr.max(majorant(h, s.delta, 2.0) / 2f64.powf(alpha));
            rep.check(&case, "lambda vs max(kink, s=2)", s.lambda, exact, 1e-12);
            rep.upper(&case, "h_j vs lambda (1/2^j)^(alpha-1)", h, s.lambda * 2f64.powf(j as f64 * (1.0 - alpha)));
        }
    }
    rep.info(&format!("j={} alpha={alpha}", join(&prm.j)), "max lambda over j", worst);
    Ok(())
}

pub(super) fn trace(prm: &Params, rep: &mut ExperimentReport) -> Result<()> {
    let model = MetricModel::flat(Rect::unit())?;
    let mut maxima = Vec::new();
    for n in [prm.grid, 2 * prm.grid] {
        let grid = Grid::new(Rect::unit(), n, n)?.with_stencil(prm.stencil);
        let out = trace_ratio_test(&model, &grid, prm.p, prm.fields, prm.pairs, prm.seed)?;
        let case = format!("n={n} p={} fields={} paths={}", prm.p, prm.fields, prm.pairs);
        rep.info(&case, "max trace ratio", out.max_ratio);
        rep.flag(&case, "max trace ratio finite", out.max_ratio.is_finite() && out.max_ratio > 0.0);
        maxima.push(out.max_ratio);

        let paths = sample_geodesics(&model, &grid, prm.pairs, prm.seed)?;
        let (norm, tr) = trace_ratio_for_field(&ScalarField::constant(&grid, 1.0), &model, &paths, prm.p)?;
        let lmax = paths.iter().map(|p| p.length()).fold(0.0, f64::max);
        let vol = volume(&model, &grid)?;
        rep.check(&case, "constant field ratio", tr / norm, (lmax / vol).powf(1.0 / prm.p), 1e-9);
    }
    let change = (maxima[1] - maxima[0]).abs() / maxima[0];
    rep.upper(&format!("n={}->{}", prm.grid, 2 * prm.grid), "relative change of max ratio", change, 0.25);
    Ok(())
}

/// `log` of the distance to `γ = {0} × [-1/4, 1/4]` on the strip
/// `[0, 1/4] × [-1/4, 1/4]`, zero elsewhere.
fn log_distance(p: ParamPoint) -> f64 {
    let in_strip = p.u >= 0.0 && p.u <= 0.25 && p.v.abs() <= 0.25;
    if !in_strip {
        return 0.0;
    }
    let dy = (p.v.abs() - 0.25).max(0.0);
    (p.u * p.u + dy * dy).sqrt().ln()
}

pub(super) fn trace_counterexample(prm: &Params, rep: &mut ExperimentReport) -> Result<()> {
    let domain = Rect::new(-0.5, 0.5, -0.5, 0.5);
    let model = MetricModel::flat(domain)?;
    let base = prm.grid.div_ceil(4) * 4;
    let mut traces = Vec::new();
    let mut norms = Vec::new();
    for level in 0..4 {
        // even column count keeps x = 0 off the lattice; rows hit y = ±1/4
        let n = base << level;
        let grid = Grid::new(domain, n, n + 1)?.with_stencil(prm.stencil);
        let field = ScalarField::from_fn(&grid, "log-distance", log_distance);
        let graph = GridGraph::build(&model, &grid)?;
        let col = n / 2;
        let start = grid.node_at(ParamPoint::new(grid.u_coord(col), -0.25))?;
        let end = grid.node_at(ParamPoint::new(grid.u_coord(col), 0.25))?;
        let path = path_to_node(&graph.single_source(start), end)?;
        let case = format!("n={n}x{} p={} q={}", n + 1, prm.p, prm.q);
        let t = trace_integral(&field, &path, prm.p)?;
        let norm = lq_norm(&field, &model, prm.q)?;
        rep.info(&case, "trace along gamma", t);
        rep.info(&case, &format!("L{} norm", prm.q), norm);
        rep.info(&case, "trace / norm", t / norm);
        traces.push(t);
        norms.push(norm);
    }
    for k in 1..traces.len() {
        let case = format!("n={}->{}", base << (k - 1), base << k);
        rep.lower(&case, "trace growth factor", traces[k] / traces[k - 1], 1.1);
        rep.upper(&case, "relative change of norm", (norms[k] - norms[k - 1]).abs() / norms[k - 1], 0.02);
    }
    Ok(())
}
