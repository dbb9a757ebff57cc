use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geodesic::{Grid, GridGraph, NodeId};
use crate::metric::{MetricModel, ParamPoint};

use super::node_measures;

/// `vol(B(center, r)) / r²` at a decreasing list of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub center: ParamPoint,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl DensityEstimate {
    pub fn ratio_at(&self, r: f64) -> Option<f64> {
        self.radii.iter().position(|&x| x == r).map(|i| self.ratios[i])
    }
}

/// Ball volumes by node membership: the dual-cell measures of every node
/// whose graph distance from `center` is below `r`.
pub fn density_estimate(model: &MetricModel, grid: &Grid, center: NodeId, radii: &[f64]) -> Result<DensityEstimate> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LabError::InvalidRadii);
    }
    if center >= grid.node_count() {
        return Err(LabError::InvalidGrid(format!("no node {center}")));
    }
    let graph = GridGraph::build(model, grid)?;
    let field = graph.single_source(center);
    let ecc = field.eccentricity();
    if radii[0] > 2.0 * ecc {
        return Err(LabError::RadiusTooLarge(radii[0]));
    }
    let mass = node_measures(model, grid)?;
    let dist = field.distances();
    let ratios = radii
        .iter()
        .map(|&r| {
            let v: f64 = dist.iter().zip(&mass).filter(|(d, _)| **d < r).map(|(_, m)| m).sum();
            v / (r * r)
        })
        .collect();
    Ok(DensityEstimate { center: grid.point(center), radii: radii.to_vec(), ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Rect, WarpingFunction};
    use std::f64::consts::PI;

    #[test]
    fn flat_disk() {
        let m = MetricModel::flat(Rect::unit()).unwrap();
        let g = Grid::new(Rect::unit(), 257, 257).unwrap();
        let est = density_estimate(&m, &g, g.node(128, 128), &[0.2, 0.1]).unwrap();
        for r in est.ratios {
            assert!((r - PI).abs() / PI < 0.05, "{r}");
        }
    }

    #[test]
    fn cone_tip_has_positive_density() {
        let m = MetricModel::warped(WarpingFunction::cone(None).unwrap());
        let g = Grid::for_model(&m, 1024, 32).unwrap();
        let est = density_estimate(&m, &g, g.pole_max_node().unwrap(), &[0.4, 0.2, 0.1]).unwrap();
        assert!((est.ratios[2] - 2.0).abs() / 2.0 < 0.1, "{:?}", est.ratios);
    }

    #[test]
    fn cusp_tip_has_vanishing_density() {
        let m = MetricModel::warped(WarpingFunction::cusp(None).unwrap());
        let g = Grid::for_model(&m, 1024, 32).unwrap();
        let est = density_estimate(&m, &g, g.pole_max_node().unwrap(), &[0.4, 0.2, 0.1]).unwrap();
        assert!(est.ratios[2] / est.ratios[0] <= 0.5, "{:?}", est.ratios);
    }

    #[test]
    fn bad_radii() {
        let m = MetricModel::flat(Rect::unit()).unwrap();
        let g = Grid::new(Rect::unit(), 9, 9).unwrap();
        assert_eq!(density_estimate(&m, &g, 0, &[0.1, 0.2]), Err(LabError::InvalidRadii));
        assert_eq!(density_estimate(&m, &g, 0, &[]), Err(LabError::InvalidRadii));
        assert_eq!(density_estimate(&m, &g, 0, &[10.0]), Err(LabError::RadiusTooLarge(10.0)));
    }
}
