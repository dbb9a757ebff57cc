//! Graph geodesics: a metric model discretized on a lattice and solved with
//! Dijkstra's algorithm.

mod graph;
mod grid;
mod matrix;

pub use graph::{geodesic_path, path_to_node, DistanceField, GeodesicPath, GridGraph, MAX_NODES, QUANTUM};
pub use grid::{Grid, NodeId, Stencil, MIN_NODES};
pub use matrix::{distance_matrix, distance_matrix_on, AxiomReport, DistanceMatrix, Provenance};

use crate::error::{LabError, Result};
use crate::metric::{MetricModel, ParamPoint};

/// Length of the grid edge between the nodes at `p` and `q`.
pub fn edge_length(model: &MetricModel, grid: &Grid, p: ParamPoint, q: ParamPoint) -> Result<f64> {
    let a = grid.node_at(p)?;
    let b = grid.node_at(q)?;
    if !grid.adjacent(a, b) {
        return Err(LabError::NonAdjacentNodes);
    }
    let (start, disp) = match (grid.is_pole_node(a), grid.is_pole_node(b)) {
        (true, false) => {
            let pb = grid.point(b);
            let pa = ParamPoint::new(grid.point(a).u, pb.v);
            (pa, pb - pa)
        }
        (false, true) => {
            let pa = grid.point(a);
            (pa, ParamPoint::new(grid.point(b).u - pa.u, 0.0))
        }
        _ => (grid.point(a), grid.displacement(a, b)),
    };
    model.segment_length(start, disp)
}

/// Distance field from the node nearest `source`.
pub fn single_source(model: &MetricModel, grid: &Grid, source: ParamPoint) -> Result<DistanceField> {
    let graph = GridGraph::build(model, grid)?;
    Ok(graph.single_source(grid.nearest_node(source)))
}
