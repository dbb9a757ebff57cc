use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;

use holder_lab::field::{sample_geodesics, trace_integral, volume, ScalarField};
use holder_lab::geodesic::{distance_matrix_on, Grid, GridGraph};
use holder_lab::metric::{MetricModel, ParamPoint, Rect, WarpingFunction};

fn points(raw: &[(f64, f64)], grid: &Grid) -> Vec<ParamPoint> {
    let d = grid.domain();
    let mut out: Vec<ParamPoint> = Vec::new();
    for &(a, b) in raw {
        let p = grid.point(grid.nearest_node(ParamPoint::new(d.u_min + a * d.width(), d.v_min + b * d.height())));
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bump_distances_are_metrics_above_the_cylinder(
        j in 1u32..12,
        eta in 0.1..0.9f64,
        raw in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 3..8),
    ) {
        let bump = MetricModel::warped(WarpingFunction::nonuniform(j, eta).unwrap());
        let cylinder = MetricModel::warped(WarpingFunction::constant(1.0, -1.0, 1.0).unwrap());
        let grid = Grid::for_model(&bump, 48, 48).unwrap();
        let pts = points(&raw, &grid);
        let dj = distance_matrix_on(&GridGraph::build(&bump, &grid).unwrap(), &pts).unwrap();
        let d1 = distance_matrix_on(&GridGraph::build(&cylinder, &grid).unwrap(), &pts).unwrap();
        prop_assert!(dj.axioms().is_metric());
        for (a, b) in dj.pairs() {
            prop_assert!(dj.get(a, b) >= d1.get(a, b));
        }
    }

    #[test]
    fn tiled_distances_sit_between_euclid_and_taxi_plus_two_delta(
        j in 1u32..4,
        h in 1.1..6.0f64,
        raw in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..8),
    ) {
        let model = MetricModel::tiled(j, h).unwrap();
        let n = 8 * (1 << j) + 1;
        let grid = Grid::new(Rect::unit(), n, n).unwrap();
        let pts = points(&raw, &grid);
        let d = distance_matrix_on(&GridGraph::build(&model, &grid).unwrap(), &pts).unwrap();
        let delta = (h + SQRT_2 + 1.0) / 2f64.powi(j as i32);
        prop_assert!(d.axioms().is_metric());
        for (a, b) in d.pairs() {
            let (p, q) = (pts[a], pts[b]);
            let taxi = (p.u - q.u).abs() + (p.v - q.v).abs();
            prop_assert!(d.get(a, b) >= (p - q).norm() - 1e-9);
            // each end detours at most delta_j to reach the tile lines
            prop_assert!(d.get(a, b) <= 1.03 * (taxi + 2.0 * delta));
        }
    }

    #[test]
    fn volume_is_additive_across_a_grid_line(j in 1u32..4, h in 1.1..6.0f64, k in 7usize..58) {
        let model = MetricModel::tiled(j, h).unwrap();
        let n = 65;
        let whole = Grid::new(Rect::unit(), n, n).unwrap();
        let x = whole.u_coord(k);
        let left = Grid::new(Rect::new(0.0, x, 0.0, 1.0), k + 1, n).unwrap();
        let right = Grid::new(Rect::new(x, 1.0, 0.0, 1.0), n - k, n).unwrap();
        let total = volume(&model, &whole).unwrap();
        let parts = volume(&model, &left).unwrap() + volume(&model, &right).unwrap();
        prop_assert!((total - parts).abs() <= 1e-9 * total);
    }

    #[test]
    fn tiling_keeps_the_block_volume(j in 1u32..4, h in 1.1..6.0f64) {
        let n = 16 * (1 << j) + 1;
        let vol = volume(&MetricModel::tiled(j, h).unwrap(), &Grid::new(Rect::unit(), n, n).unwrap()).unwrap();
        prop_assert!((vol - (1.0 + 4.0 * h)).abs() <= 0.01 * (1.0 + 4.0 * h));
    }

    #[test]
    fn constant_field_trace_is_length_scaled(c in -5.0..5.0f64, p in 1.0..4.0f64, seed in 0u64..1000) {
        let model = MetricModel::flat(Rect::unit()).unwrap();
        let grid = Grid::new(Rect::unit(), 24, 24).unwrap();
        let field = ScalarField::constant(&grid, c);
        for path in sample_geodesics(&model, &grid, 3, seed).unwrap() {
            let t = trace_integral(&field, &path, p).unwrap();
            let want = c.abs() * path.length().powf(1.0 / p);
            prop_assert!((t - want).abs() <= 1e-10 * (1.0 + want));
        }
    }

    #[test]
    fn cylinder_volume_scales_with_height(half in 0.1..3.0f64) {
        let model = MetricModel::warped(WarpingFunction::constant(1.0, -half, half).unwrap());
        let vol = volume(&model, &Grid::for_model(&model, 33, 8).unwrap()).unwrap();
        prop_assert!((vol - 4.0 * PI * half).abs() <= 1e-9 * vol);
    }
}
