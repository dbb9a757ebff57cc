use crate::error::{LabError, Result};
use crate::geodesic::Grid;
use crate::metric::MetricModel;

use super::{node_measures, FieldSource, ScalarField};

/// Coordinate partials `(∂_u, ∂_v)` at each regular node: central
/// differences inside, one-sided on non-periodic edges. Pole vertices get
/// `NaN`.
pub fn gradient(field: &ScalarField) -> Vec<(f64, f64)> {
    let g = field.grid();
    let (nu, nv) = (g.n_u(), g.n_v());
    let (du, dv) = (g.du(), g.dv());
    let f = |i: usize, k: usize| field.value(g.node(i, k));
    let diff = |lo: f64, hi: f64, steps: f64, h: f64| (hi - lo) / (steps * h);
    let mut out = Vec::with_capacity(g.node_count());
    for i in 0..nu {
        for k in 0..nv {
            let pu = if g.periodic_u() {
                diff(f((i + nu - 1) % nu, k), f((i + 1) % nu, k), 2.0, du)
            } else if i == 0 {
                diff(f(0, k), f(1, k), 1.0, du)
            } else if i == nu - 1 {
                diff(f(i - 1, k), f(i, k), 1.0, du)
            } else {
                diff(f(i - 1, k), f(i + 1, k), 2.0, du)
            };
            let pv = if g.periodic_v() {
                diff(f(i, (k + nv - 1) % nv), f(i, (k + 1) % nv), 2.0, dv)
            } else if k == 0 {
                diff(f(i, 0), f(i, 1), 1.0, dv)
            } else if k == nv - 1 {
                diff(f(i, k - 1), f(i, k), 1.0, dv)
            } else {
                diff(f(i, k - 1), f(i, k + 1), 2.0, dv)
            };
            out.push((pu, pv));
        }
    }
    out.resize(g.node_count(), (f64::NAN, f64::NAN));
    out
}

/// `|g_j|_{g_0} = √tr(G_0⁻¹ G_j G_0⁻¹ G_j)` at every node; `NaN` at poles.
pub fn tensor_norm_field(model_j: &MetricModel, model_0: &MetricModel, grid: &Grid) -> Result<ScalarField> {
    grid.check_model(model_j)?;
    grid.check_model(model_0)?;
    let mut values = Vec::with_capacity(grid.node_count());
    for n in 0..grid.node_count() {
        if grid.is_pole_node(n) {
            values.push(f64::NAN);
            continue;
        }
        let p = grid.point(n);
        let gj = model_j.form_matrix(p)?;
        let g0 = model_0.form_matrix(p)?;
        let det = g0[0][0] * g0[1][1] - g0[0][1] * g0[1][0];
        let inv = [[g0[1][1] / det, -g0[0][1] / det], [-g0[1][0] / det, g0[0][0] / det]];
        let mut a = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                a[r][c] = inv[r][0] * gj[0][c] + inv[r][1] * gj[1][c];
            }
        }
        let tr = a[0][0] * a[0][0] + 2.0 * a[0][1] * a[1][0] + a[1][1] * a[1][1];
        values.push(tr.max(0.0).sqrt());
    }
    let source = FieldSource::TensorNorm { model_j: model_j.id(), model_0: model_0.id() };
    Ok(ScalarField::from_values(grid, values, source))
}

fn check_exponent(p: f64, min: f64) -> Result<()> {
    if p.is_finite() && p >= min {
        Ok(())
    } else {
        Err(LabError::InvalidExponent(p))
    }
}

/// `(∫ |u|^q dvol)^{1/q}` by node quadrature. Non-finite values (pole
/// vertices of tensor-norm fields) are skipped.
pub fn lq_norm(field: &ScalarField, background: &MetricModel, q: f64) -> Result<f64> {
    check_exponent(q, 1.0)?;
    let w = node_measures(background, field.grid())?;
    let sum: f64 = field
        .values()
        .iter()
        .zip(&w)
        .filter(|(x, _)| x.is_finite())
        .map(|(x, m)| m * x.abs().powf(q))
        .sum();
    Ok(sum.powf(1.0 / q))
}

/// `(∫ |u|^p + |∇u|_{g_0}^p dvol)^{1/p}` over regular nodes.
pub fn sobolev_w1p_norm(field: &ScalarField, background: &MetricModel, p: f64) -> Result<f64> {
    check_exponent(p, 1.0)?;
    let grid = field.grid();
    let w = node_measures(background, grid)?;
    let grad = gradient(field);
    let mut sum = 0.0;
    for n in 0..grid.regular_count() {
        let g = background.form_matrix(grid.point(n))?;
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let (a, b) = grad[n];
        let sq = (g[1][1] * a * a - 2.0 * g[0][1] * a * b + g[0][0] * b * b) / det;
        sum += w[n] * (field.value(n).abs().powf(p) + sq.max(0.0).powf(0.5 * p));
    }
    Ok(sum.powf(1.0 / p))
}
