use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::metric::{MetricModel, ParamPoint};

use super::graph::GridGraph;
use super::grid::Grid;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: String,
    pub grid: String,
}

impl Provenance {
    pub fn new(model: impl Into<String>, grid: impl Into<String>) -> Self {
        Self { model: model.into(), grid: grid.into() }
    }
}

/// Symmetric pairwise distances over a list of sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    samples: Vec<ParamPoint>,
    values: Vec<f64>,
    provenance: Provenance,
}

/// Worst violations of the metric axioms found by [`DistanceMatrix::axioms`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomReport {
    pub max_asymmetry: f64,
    pub max_diagonal: f64,
    /// `max(d(a,c) - d(a,b) - d(b,c))` over all triples; `<= 0` for a metric.
    pub max_triangle_excess: f64,
    pub min_entry: f64,
    pub all_finite: bool,
}

impl AxiomReport {
    /// Exact metric axioms (no tolerance).
    pub fn is_metric(&self) -> bool {
        self.max_asymmetry == 0.0
            && self.max_diagonal == 0.0
            && self.max_triangle_excess <= 0.0
            && self.min_entry >= 0.0
            && self.all_finite
    }
}

impl DistanceMatrix {
    /// Builds a matrix from `d(i, j)` evaluated on `i < j`, mirrored.
    pub fn from_fn(samples: Vec<ParamPoint>, provenance: Provenance, mut d: impl FnMut(usize, usize) -> f64) -> Self {
        let n = samples.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let x = d(i, j);
                values[i * n + j] = x;
                values[j * n + i] = x;
            }
        }
        Self { samples, values, provenance }
    }

    /// Takes a full row-major matrix; rejects asymmetric or non-zero-diagonal
    /// input.
    pub fn from_values(samples: Vec<ParamPoint>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        let n = samples.len();
        if values.len() != n * n {
            return Err(LabError::InvalidModel(format!("expected {} entries, got {}", n * n, values.len())));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(LabError::InvalidModel("distance matrix diagonal must vanish".into()));
            }
            for j in 0..i {
                if values[i * n + j] != values[j * n + i] {
                    return Err(LabError::InvalidModel("distance matrix must be symmetric".into()));
                }
            }
        }
        Ok(Self { samples, values, provenance })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[ParamPoint] {
        &self.samples
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pairs `(i, j)` with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
    }

    pub fn same_samples(&self, other: &DistanceMatrix) -> bool {
        self.samples == other.samples
    }

    /// Elementwise multiple, keeping samples and provenance.
    pub fn scaled(&self, s: f64) -> Self {
        Self { values: self.values.iter().map(|x| x * s).collect(), ..self.clone() }
    }

    pub fn axioms(&self) -> AxiomReport {
        let n = self.len();
        let mut rep = AxiomReport {
            max_asymmetry: 0.0,
            max_diagonal: 0.0,
            max_triangle_excess: f64::NEG_INFINITY,
            min_entry: f64::INFINITY,
            all_finite: true,
        };
        for i in 0..n {
            rep.max_diagonal = rep.max_diagonal.max(self.get(i, i).abs());
            for j in 0..n {
                let x = self.get(i, j);
                rep.all_finite &= x.is_finite();
                rep.min_entry = rep.min_entry.min(x);
                rep.max_asymmetry = rep.max_asymmetry.max((x - self.get(j, i)).abs());
            }
        }
        rep.max_triangle_excess = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut worst = f64::NEG_INFINITY;
                for b in 0..n {
                    for c in 0..n {
                        worst = worst.max(self.get(a, c) - (self.get(a, b) + self.get(b, c)));
                    }
                }
                worst
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        if n == 0 {
            rep.min_entry = 0.0;
            rep.max_triangle_excess = 0.0;
        }
        rep
    }
}

/// Graph distances between `samples` (snapped to their nearest nodes) on
/// `model` discretized by `grid`.
pub fn distance_matrix(model: &MetricModel, grid: &Grid, samples: &[ParamPoint]) -> Result<DistanceMatrix> {
    let graph = GridGraph::build(model, grid)?;
    distance_matrix_on(&graph, samples)
}

/// As [`distance_matrix`] on a prebuilt graph.
pub fn distance_matrix_on(graph: &GridGraph, samples: &[ParamPoint]) -> Result<DistanceMatrix> {
    if samples.is_empty() {
        return Err(LabError::InvalidModel("no sample points".into()));
    }
    let grid = graph.grid();
    let nodes: Vec<usize> = samples.iter().map(|&p| grid.nearest_node(p)).collect();
    let snapped: Vec<ParamPoint> = nodes.iter().map(|&n| grid.point(n)).collect();
    let rows: Vec<Vec<u64>> = nodes
        .par_iter()
        .map(|&s| {
            let f = graph.single_source(s);
            nodes.iter().map(|&t| f.raw(t)).collect()
        })
        .collect();
    let n = nodes.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let q = rows[i][j];
            debug_assert_eq!(q, rows[j][i]);
            values[i * n + j] = if q == u64::MAX { f64::INFINITY } else { q as f64 * super::graph::QUANTUM };
        }
    }
    DistanceMatrix::from_values(snapped, values, Provenance::new(graph.model_id(), grid.spec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Rect;

    #[test]
    fn single_sample() {
        let model = MetricModel::flat(Rect::unit()).unwrap();
        let grid = Grid::new(Rect::unit(), 9, 9).unwrap();
        let d = distance_matrix(&model, &grid, &[ParamPoint::new(0.5, 0.5)]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn unit_square_corners() {
        let model = MetricModel::flat(Rect::unit()).unwrap();
        let grid = Grid::new(Rect::unit(), 33, 33).unwrap();
        let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].map(|(u, v)| ParamPoint::new(u, v));
        let d = distance_matrix(&model, &grid, &corners).unwrap();
        let tol = 1e-10;
        assert!((d.get(0, 1) - 1.0).abs() < tol);
        assert!((d.get(1, 2) - 1.0).abs() < tol);
        // diagonal is a stencil direction
        assert!((d.get(0, 2) - 2f64.sqrt()).abs() < tol);
        assert!(d.axioms().is_metric());
    }

    #[test]
    fn rejects_asymmetric() {
        let s = vec![ParamPoint::new(0.0, 0.0), ParamPoint::new(1.0, 0.0)];
        assert!(DistanceMatrix::from_values(s.clone(), vec![0.0, 1.0, 2.0, 0.0], Provenance::new("x", "y")).is_err());
        assert!(DistanceMatrix::from_values(s, vec![0.1, 1.0, 1.0, 0.0], Provenance::new("x", "y")).is_err());
    }
}
