use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geodesic::{path_to_node, GeodesicPath, Grid, GridGraph};
use crate::metric::{MetricKind, MetricModel, ParamPoint};

use super::{sobolev_w1p_norm, ScalarField};

/// `(∫_γ |f|^p ds)^{1/p}` by the trapezoid rule in the path's own
/// arclength. A non-finite node value (a pole of a tensor-norm field)
/// borrows the value of its neighbour on the segment.
pub fn trace_integral(field: &ScalarField, path: &GeodesicPath, p: f64) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(LabError::InvalidExponent(p));
    }
    if path.is_empty() {
        return Err(LabError::EmptyPath);
    }
    let grid = field.grid();
    for (&n, &pt) in path.nodes.iter().zip(&path.points) {
        if n >= grid.node_count() {
            return Err(LabError::GridMismatch);
        }
        if !grid.is_pole_node(n) && (grid.point(n) - pt).norm() > 1e-9 * (grid.du() + grid.dv()) {
            return Err(LabError::GridMismatch);
        }
    }
    let mut sum = 0.0;
    for w in path.nodes.windows(2).zip(path.arclength.windows(2)) {
        let (nodes, s) = w;
        let (mut a, mut b) = (field.value(nodes[0]).abs().powf(p), field.value(nodes[1]).abs().powf(p));
        if !a.is_finite() {
            a = b;
        }
        if !b.is_finite() {
            b = a;
        }
        sum += 0.5 * (a + b) * (s[1] - s[0]);
    }
    Ok(sum.powf(1.0 / p))
}

/// Graph geodesics between `count` pairs of uniformly random points,
/// snapped to nodes; coincident endpoints are redrawn.
pub fn sample_geodesics(background: &MetricModel, grid: &Grid, count: usize, seed: u64) -> Result<Vec<GeodesicPath>> {
    let graph = GridGraph::build(background, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.domain();
    let draw = |rng: &mut ChaCha8Rng| {
        grid.nearest_node(ParamPoint::new(rng.random_range(d.u_min..d.u_max), rng.random_range(d.v_min..d.v_max)))
    };
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        if a != b {
            pairs.push((a, b));
        }
    }
    pairs.par_iter().map(|&(a, b)| path_to_node(&graph.single_source(a), b)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRatio {
    pub seed: u64,
    pub sobolev_norm: f64,
    pub max_trace: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRatioReport {
    pub p: f64,
    pub max_ratio: f64,
    pub longest_path: f64,
    pub fields: Vec<FieldRatio>,
}

/// `max_γ trace_integral(f, γ) / ‖f‖_{W^{1,p}}` over the given paths.
pub fn trace_ratio_for_field(
    field: &ScalarField,
    background: &MetricModel,
    paths: &[GeodesicPath],
    p: f64,
) -> Result<(f64, f64)> {
    let norm = sobolev_w1p_norm(field, background, p)?;
    if norm.is_nan() || norm <= 1e-12 {
        return Err(LabError::InvalidConfig("field has vanishing Sobolev norm".into()));
    }
    let mut worst: f64 = 0.0;
    for path in paths {
        worst = worst.max(trace_integral(field, path, p)?);
    }
    Ok((norm, worst))
}

/// Per-field seed; independent of evaluation order.
fn field_seed(seed: u64, index: u64, attempt: u64) -> u64 {
    let mut z = seed ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ attempt.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Empirical trace constant: band-limited random fields against sampled
/// background geodesics.
pub fn trace_ratio_test(
    background: &MetricModel,
    grid: &Grid,
    p: f64,
    field_count: usize,
    path_count: usize,
    seed: u64,
) -> Result<TraceRatioReport> {
    if !matches!(background.kind(), MetricKind::Flat | MetricKind::Warped { .. }) {
        return Err(LabError::InvalidModel("trace test needs a smooth background".into()));
    }
    if field_count == 0 || path_count == 0 {
        return Err(LabError::InvalidConfig("need at least one field and one path".into()));
    }
    let paths = sample_geodesics(background, grid, path_count, seed)?;
    let fields = (0..field_count as u64)
        .into_par_iter()
        .map(|i| {
            for attempt in 0..8 {
                let s = field_seed(seed, i, attempt);
                let f = ScalarField::band_limited(grid, s);
                match trace_ratio_for_field(&f, background, &paths, p) {
                    Ok((norm, trace)) => {
                        return Ok(FieldRatio { seed: s, sobolev_norm: norm, max_trace: trace, ratio: trace / norm })
                    }
                    Err(LabError::InvalidConfig(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(LabError::InvalidConfig("could not draw a non-degenerate field".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = fields.iter().map(|f| f.ratio).fold(0.0, f64::max);
    let longest_path = paths.iter().map(GeodesicPath::length).fold(0.0, f64::max);
    Ok(TraceRatioReport { p, max_ratio, longest_path, fields })
}
