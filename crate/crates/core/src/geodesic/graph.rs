use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::metric::{MetricModel, ParamPoint};

use super::grid::{Grid, NodeId};

/// Edge weights are stored as integer multiples of `2^-40`, so path sums are
/// exact and every graph distance is a true metric (symmetry and triangle
/// inequality hold bit-for-bit).
pub const QUANTUM: f64 = 1.0 / (1u64 << 40) as f64;

/// Largest node count a single graph may have.
pub const MAX_NODES: usize = 4 << 20;

const NO_PRED: u32 = u32::MAX;

fn quantize(w: f64) -> u64 {
    (w / QUANTUM).round() as u64
}

fn dequantize(q: u64) -> f64 {
    q as f64 * QUANTUM
}

/// A metric model discretized on a grid: CSR adjacency with quantized
/// edge lengths.
#[derive(Debug, Clone)]
pub struct GridGraph {
    grid: Grid,
    model_id: String,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<u64>,
}

/// Undirected edge `(a, b)` with start point and parameter displacement
/// measured from `a`.
fn edges_from(grid: &Grid, a: NodeId) -> Vec<(NodeId, NodeId, ParamPoint, ParamPoint)> {
    let mut out = Vec::new();
    match grid.indices(a) {
        Some((i, k)) => {
            let pa = grid.point(a);
            for &(di, dk) in grid.stencil().forward_offsets() {
                if let Some(b) = grid.offset(i, k, di, dk) {
                    if b != a {
                        out.push((a, b, pa, grid.displacement(a, b)));
                    }
                }
            }
        }
        None => {
            let row = if Some(a) == grid.pole_min_node() { 0 } else { grid.n_u() - 1 };
            let u_pole = grid.point(a).u;
            for k in 0..grid.n_v() {
                let b = grid.node(row, k);
                let pb = grid.point(b);
                let start = ParamPoint::new(u_pole, pb.v);
                out.push((a, b, start, ParamPoint::new(pb.u - u_pole, 0.0)));
            }
        }
    }
    out
}

impl GridGraph {
    pub fn build(model: &MetricModel, grid: &Grid) -> Result<Self> {
        grid.check_model(model)?;
        let n = grid.node_count();
        if n > MAX_NODES {
            return Err(LabError::ResourceLimit(format!("{n} grid nodes exceed the limit of {MAX_NODES}")));
        }
        let per_node: Vec<Vec<(u32, u32, u64)>> = (0..n)
            .into_par_iter()
            .map(|a| {
                edges_from(grid, a)
                    .into_iter()
                    .map(|(a, b, start, disp)| {
                        let w = model.segment_length(start, disp)?;
                        Ok((a as u32, b as u32, quantize(w)))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        let mut degree = vec![0usize; n + 1];
        for &(a, b, _) in per_node.iter().flatten() {
            degree[a as usize + 1] += 1;
            degree[b as usize + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let m = offsets[n];
        let mut targets = vec![0u32; m];
        let mut weights = vec![0u64; m];
        for &(a, b, w) in per_node.iter().flatten() {
            for (x, y) in [(a, b), (b, a)] {
                let slot = fill[x as usize];
                targets[slot] = y;
                weights[slot] = w;
                fill[x as usize] += 1;
            }
        }
        Ok(Self { grid: grid.clone(), model_id: model.id(), offsets, targets, weights })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Quantized length of the edge `a -- b`, if present.
    pub fn edge_weight(&self, a: NodeId, b: NodeId) -> Option<f64> {
        let range = self.offsets[a]..self.offsets[a + 1];
        range
            .clone()
            .find(|&s| self.targets[s] as usize == b)
            .map(|s| dequantize(self.weights[s]))
    }

    pub fn single_source(&self, source: NodeId) -> DistanceField {
        self.multi_source(&[source])
    }

    /// Distances to the nearest of several sources.
    pub fn multi_source(&self, sources: &[NodeId]) -> DistanceField {
        let n = self.grid.node_count();
        let mut raw = vec![u64::MAX; n];
        let mut pred = vec![NO_PRED; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            raw[s] = 0;
            heap.push(Reverse((0u64, s as u32)));
        }
        while let Some(Reverse((d, a))) = heap.pop() {
            let a = a as usize;
            if d > raw[a] {
                continue;
            }
            for s in self.offsets[a]..self.offsets[a + 1] {
                let b = self.targets[s] as usize;
                let nd = d + self.weights[s];
                if nd < raw[b] {
                    heap.push(Reverse((nd, b as u32)));
                    raw[b] = nd;
                    pred[b] = a as u32;
                }
            }
        }
        DistanceField { grid: self.grid.clone(), sources: sources.to_vec(), raw, pred }
    }
}

/// Graph distances from one or more sources, with a shortest-path tree.
#[derive(Debug, Clone)]
pub struct DistanceField {
    grid: Grid,
    sources: Vec<NodeId>,
    raw: Vec<u64>,
    pred: Vec<u32>,
}

impl DistanceField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn sources(&self) -> &[NodeId] {
        &self.sources
    }

    /// Distance at node `n`; `f64::INFINITY` if unreachable.
    pub fn distance(&self, n: NodeId) -> f64 {
        match self.raw[n] {
            u64::MAX => f64::INFINITY,
            q => dequantize(q),
        }
    }

    pub fn distances(&self) -> Vec<f64> {
        (0..self.raw.len()).map(|n| self.distance(n)).collect()
    }

    pub(crate) fn raw(&self, n: NodeId) -> u64 {
        self.raw[n]
    }

    pub fn predecessor(&self, n: NodeId) -> Option<NodeId> {
        (self.pred[n] != NO_PRED).then(|| self.pred[n] as usize)
    }

    /// Largest finite distance.
    pub fn eccentricity(&self) -> f64 {
        self.raw.iter().filter(|&&q| q != u64::MAX).map(|&q| dequantize(q)).fold(0.0, f64::max)
    }
}

/// A polyline of grid nodes with cumulative arclength.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub nodes: Vec<NodeId>,
    pub points: Vec<ParamPoint>,
    pub arclength: Vec<f64>,
}

impl GeodesicPath {
    pub fn length(&self) -> f64 {
        self.arclength.last().copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Walks the predecessor tree from `target` back to the source.
pub fn geodesic_path(field: &DistanceField, target: ParamPoint) -> Result<GeodesicPath> {
    let t = field.grid.nearest_node(target);
    path_to_node(field, t)
}

pub fn path_to_node(field: &DistanceField, target: NodeId) -> Result<GeodesicPath> {
    if field.raw[target] == u64::MAX {
        return Err(LabError::Unreachable(target));
    }
    let mut nodes = vec![target];
    let mut cur = target;
    while let Some(p) = field.predecessor(cur) {
        nodes.push(p);
        cur = p;
    }
    nodes.reverse();
    let grid = &field.grid;
    let points = nodes
        .iter()
        .enumerate()
        .map(|(idx, &n)| {
            let mut p = grid.point(n);
            if grid.is_pole_node(n) {
                // a pole has no angle; borrow it from the neighbour on the path
                let nb = if idx + 1 < nodes.len() { nodes.get(idx + 1) } else { idx.checked_sub(1).map(|i| &nodes[i]) };
                if let Some(&nb) = nb {
                    p.v = grid.point(nb).v;
                }
            }
            p
        })
        .collect();
    let arclength = nodes.iter().map(|&n| field.distance(n)).collect();
    Ok(GeodesicPath { nodes, points, arclength })
}
