//! Scalar fields on grids and the integrals built from them: volumes, `L^q`
//! and `W^{1,p}` norms, line integrals along graph geodesics, and ball
//! densities.

mod density;
mod norms;
mod trace;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geodesic::{Grid, NodeId};
use crate::metric::{MetricKind, MetricModel, ParamPoint, GAUSS4};

pub use density::{density_estimate, DensityEstimate};
pub use norms::{gradient, lq_norm, sobolev_w1p_norm, tensor_norm_field};
pub use trace::{
    sample_geodesics, trace_integral, trace_ratio_for_field, trace_ratio_test, FieldRatio, TraceRatioReport,
};

/// Highest Fourier mode per axis in band-limited random fields.
pub const MAX_MODE: i32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FieldSource {
    Analytic(String),
    BandLimited { seed: u64 },
    TensorNorm { model_j: String, model_0: String },
}

impl fmt::Display for FieldSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Analytic(name) => write!(f, "analytic:{name}"),
            Self::BandLimited { seed } => write!(f, "band-limited(seed={seed})"),
            Self::TensorNorm { model_j, model_0 } => write!(f, "|{model_j}|_{{{model_0}}}"),
        }
    }
}

/// Values on every node of a grid (pole vertices included; tensor-norm
/// fields store `NaN` there).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    source: FieldSource,
}

impl ScalarField {
    pub fn from_fn(grid: &Grid, name: &str, f: impl Fn(ParamPoint) -> f64) -> Self {
        let values = (0..grid.node_count()).map(|n| f(grid.point(n))).collect();
        Self { grid: grid.clone(), values, source: FieldSource::Analytic(name.into()) }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self::from_fn(grid, &format!("constant({c})"), |_| c)
    }

    pub(crate) fn from_values(grid: &Grid, values: Vec<f64>, source: FieldSource) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Self { grid: grid.clone(), values, source }
    }

    /// Truncated Fourier series `Σ a_k cos(2π k·x) + b_k sin(2π k·x)` in
    /// coordinates normalized to the unit square, modes `|k_i| ≤ 8`, with
    /// independent `a_k, b_k ~ N(0, (1 + |k|)^{-3})`.
    pub fn band_limited(grid: &Grid, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        for kx in 0..=MAX_MODE {
            for ky in -MAX_MODE..=MAX_MODE {
                if kx == 0 && ky < 0 {
                    continue;
                }
                let k = ((kx * kx + ky * ky) as f64).sqrt();
                let sd = (1.0 + k).powf(-1.5);
                let normal = Normal::new(0.0, sd).expect("positive deviation");
                let a = normal.sample(&mut rng);
                let b = if kx == 0 && ky == 0 { 0.0 } else { normal.sample(&mut rng) };
                modes.push((kx as f64, ky as f64, a, b));
            }
        }
        let d = grid.domain();
        let tau = 2.0 * std::f64::consts::PI;
        let values = (0..grid.node_count())
            .map(|n| {
                let p = grid.point(n);
                let x = (p.u - d.u_min) / d.width();
                let y = (p.v - d.v_min) / d.height();
                modes
                    .iter()
                    .map(|&(kx, ky, a, b)| {
                        let phase = tau * (kx * x + ky * y);
                        a * phase.cos() + b * phase.sin()
                    })
                    .sum()
            })
            .collect();
        Self { grid: grid.clone(), values, source: FieldSource::BandLimited { seed } }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, n: NodeId) -> f64 {
        self.values[n]
    }

    pub fn source(&self) -> &FieldSource {
        &self.source
    }

    /// Pointwise map, keeping the grid.
    pub fn map(&self, name: &str, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&x| f(x)).collect(),
            source: FieldSource::Analytic(format!("{name}({})", self.source)),
        }
    }
}

/// Riemannian measure of each node's dual cell: parameter area times the
/// area element at the node. Pole vertices integrate the warping over their
/// half-row strip.
pub fn node_measures(model: &MetricModel, grid: &Grid) -> Result<Vec<f64>> {
    grid.check_model(model)?;
    let areas = grid.dual_cell_areas();
    let mut out = Vec::with_capacity(grid.node_count());
    for (n, area) in areas.iter().enumerate().take(grid.regular_count()) {
        out.push(area * model.sqrt_det(grid.point(n))?);
    }
    let half = 0.5 * grid.du();
    let pole_strip = |u0: f64, dir: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (x, w) in GAUSS4 {
            let u = u0 + dir * half * 0.5 * (x + 1.0);
            acc += 0.5 * w * half * model.sqrt_det(ParamPoint::new(u, grid.domain().v_min))?;
        }
        Ok(acc * grid.domain().height())
    };
    let d = grid.domain();
    if grid.pole_min_node().is_some() {
        out.push(pole_strip(d.u_min, 1.0)?);
    }
    if grid.pole_max_node().is_some() {
        out.push(pole_strip(d.u_max, -1.0)?);
    }
    Ok(out)
}

/// Subdivision per axis for cells that straddle a region edge of a
/// piecewise-flat model.
const SPLIT: usize = 8;

/// Key identifying the flat piece containing `p`.
fn piece_key(model: &MetricModel, p: ParamPoint) -> Option<(usize, usize, u8)> {
    match model.kind() {
        MetricKind::Block { block } => block.region_of(p).ok().map(|r| (0, 0, r as u8)),
        MetricKind::Tiled { tiled } => {
            let tile = tiled.tile_of(p).ok()?;
            let local = tiled.to_local(tile, p).clamp_unit();
            tiled.block().region_of(local).ok().map(|r| (tile.0, tile.1, r as u8))
        }
        _ => None,
    }
}

/// Riemannian area of the grid's domain: midpoint rule of `√det g` over
/// the lattice cells. For piecewise-flat models a cell whose corners lie in
/// different flat pieces is refined on an `8 × 8` sub-lattice.
pub fn volume(model: &MetricModel, grid: &Grid) -> Result<f64> {
    grid.check_model(model)?;
    let d = grid.domain();
    let (du, dv) = (grid.du(), grid.dv());
    let cells_u = if grid.periodic_u() {
        grid.n_u()
    } else {
        grid.n_u() - 1 + grid.poles().0 as usize + grid.poles().1 as usize
    };
    let cells_v = if grid.periodic_v() { grid.n_v() } else { grid.n_v() - 1 };
    let piecewise = model.is_piecewise_flat();
    let mut total = 0.0;
    for i in 0..cells_u {
        let u0 = d.u_min + i as f64 * du;
        let mut row = 0.0;
        for k in 0..cells_v {
            let v0 = d.v_min + k as f64 * dv;
            let straddles = piecewise && {
                let inset = 1e-9;
                let key = |a: f64, b: f64| piece_key(model, ParamPoint::new(u0 + a * du, v0 + b * dv));
                let k0 = key(inset, inset);
                [key(1.0 - inset, inset), key(inset, 1.0 - inset), key(1.0 - inset, 1.0 - inset), key(0.5, 0.5)]
                    .iter()
                    .any(|k| *k != k0)
            };
            if straddles {
                let (su, sv) = (du / SPLIT as f64, dv / SPLIT as f64);
                let mut acc = 0.0;
                for a in 0..SPLIT {
                    for b in 0..SPLIT {
                        let p = ParamPoint::new(u0 + (a as f64 + 0.5) * su, v0 + (b as f64 + 0.5) * sv);
                        acc += model.sqrt_det(p)?;
                    }
                }
                row += acc * su * sv;
            } else {
                row += model.sqrt_det(ParamPoint::new(u0 + 0.5 * du, v0 + 0.5 * dv))? * du * dv;
            }
        }
        total += row;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Rect, WarpingFunction};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn flat_unit_volume() {
        let m = MetricModel::flat(Rect::unit()).unwrap();
        let g = Grid::new(Rect::unit(), 65, 65).unwrap();
        assert_relative_eq!(volume(&m, &g).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn cylinder_volume() {
        let m = MetricModel::warped(WarpingFunction::constant(1.0, -1.0, 1.0).unwrap());
        let g = Grid::for_model(&m, 33, 32).unwrap();
        assert_relative_eq!(volume(&m, &g).unwrap(), 4.0 * PI, epsilon = 1e-6);
    }

    #[test]
    fn block_volume_close_to_one_plus_four_h() {
        let m = MetricModel::block(2.0).unwrap();
        let g = Grid::new(Rect::unit(), 129, 129).unwrap();
        let v = volume(&m, &g).unwrap();
        assert!((v - 9.0).abs() / 9.0 < 0.01, "{v}");
    }

    #[test]
    fn volume_is_additive() {
        // a 2x2 partition of the domain with matching node lattices
        let m = MetricModel::block(3.0).unwrap();
        let whole = volume(&m, &Grid::new(Rect::unit(), 65, 65).unwrap()).unwrap();
        let mut parts = 0.0;
        for (a, b) in [(0.0, 0.5), (0.5, 1.0)] {
            for (c, e) in [(0.0, 0.5), (0.5, 1.0)] {
                parts += volume(&m, &Grid::new(Rect::new(a, b, c, e), 33, 33).unwrap()).unwrap();
            }
        }
        assert_relative_eq!(whole, parts, epsilon = 1e-10);
    }

    #[test]
    fn node_measures_match_cell_volume() {
        let m = MetricModel::warped(WarpingFunction::cone(None).unwrap());
        let g = Grid::for_model(&m, 511, 16).unwrap();
        let sum: f64 = node_measures(&m, &g).unwrap().iter().sum();
        let vol = volume(&m, &g).unwrap();
        assert_relative_eq!(sum, vol, max_relative = 1e-4);
    }

    #[test]
    fn band_limited_is_deterministic() {
        let g = Grid::new(Rect::unit(), 16, 16).unwrap();
        let a = ScalarField::band_limited(&g, 7);
        let b = ScalarField::band_limited(&g, 7);
        let c = ScalarField::band_limited(&g, 8);
        assert_eq!(a, b);
        assert_ne!(a.values(), c.values());
        assert!(a.values().iter().all(|x| x.is_finite()));
    }
}
