use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::metric::{MetricModel, ParamPoint, Rect};

pub type NodeId = usize;

/// Minimum nodes per axis.
pub const MIN_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stencil {
    /// King moves.
    #[serde(rename = "8")]
    Eight,
    /// King moves plus knight moves.
    #[serde(rename = "16")]
    Sixteen,
}

impl Stencil {
    /// One representative of every undirected edge direction.
    pub(crate) fn forward_offsets(self) -> &'static [(isize, isize)] {
        const EIGHT: [(isize, isize); 4] = [(0, 1), (1, -1), (1, 0), (1, 1)];
        const SIXTEEN: [(isize, isize); 8] = [(0, 1), (1, -1), (1, 0), (1, 1), (1, -2), (1, 2), (2, -1), (2, 1)];
        match self {
            Stencil::Eight => &EIGHT,
            Stencil::Sixteen => &SIXTEEN,
        }
    }

    /// Largest ratio of graph length to Euclidean length on a uniform
    /// isotropic lattice: `1 / cos(θ/2)` for the widest angular gap `θ`
    /// between neighbouring stencil directions.
    pub fn overshoot_bound(self) -> f64 {
        let gap = match self {
            Stencil::Eight => std::f64::consts::FRAC_PI_4,
            Stencil::Sixteen => 0.5f64.atan(),
        };
        1.0 / (0.5 * gap).cos()
    }
}

impl fmt::Display for Stencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stencil::Eight => f.write_str("8"),
            Stencil::Sixteen => f.write_str("16"),
        }
    }
}

/// Uniform lattice over a parameter rectangle.
///
/// Along a non-periodic axis the nodes include both edges. A `u`-edge flagged
/// as a pole is collapsed into a single extra vertex joined radially to the
/// adjacent row; the `n_u` regular rows are those strictly inside the poles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    domain: Rect,
    n_u: usize,
    n_v: usize,
    periodic_u: bool,
    periodic_v: bool,
    stencil: Stencil,
    pole_u_min: bool,
    pole_u_max: bool,
}

impl Grid {
    pub fn new(domain: Rect, n_u: usize, n_v: usize) -> Result<Self> {
        if n_u < MIN_NODES || n_v < MIN_NODES {
            return Err(LabError::InvalidGrid(format!(
                "need at least {MIN_NODES} nodes per axis, got {n_u} x {n_v}"
            )));
        }
        if !(domain.width() > 0.0 && domain.height() > 0.0) {
            return Err(LabError::InvalidGrid("empty domain".into()));
        }
        Ok(Self {
            domain,
            n_u,
            n_v,
            periodic_u: false,
            periodic_v: false,
            stencil: Stencil::Sixteen,
            pole_u_min: false,
            pole_u_max: false,
        })
    }

    /// Grid over the whole model domain, inheriting periodicity and poles.
    pub fn for_model(model: &MetricModel, n_u: usize, n_v: usize) -> Result<Self> {
        let (pmin, pmax) = model.poles();
        Ok(Self::new(model.domain(), n_u, n_v)?
            .with_periodic(model.periodic_u(), model.periodic_v())
            .with_poles(pmin, pmax))
    }

    pub fn with_periodic(mut self, u: bool, v: bool) -> Self {
        self.periodic_u = u;
        self.periodic_v = v;
        self
    }

    pub fn with_stencil(mut self, stencil: Stencil) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn with_poles(mut self, min: bool, max: bool) -> Self {
        self.pole_u_min = min;
        self.pole_u_max = max;
        self
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn periodic_u(&self) -> bool {
        self.periodic_u
    }

    pub fn periodic_v(&self) -> bool {
        self.periodic_v
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    pub fn poles(&self) -> (bool, bool) {
        (self.pole_u_min, self.pole_u_max)
    }

    /// Checks that the grid can discretize `model`.
    pub fn check_model(&self, model: &MetricModel) -> Result<()> {
        let md = model.domain();
        if !md.contains_rect(&self.domain) {
            return Err(LabError::InvalidGrid("grid domain exceeds the model domain".into()));
        }
        let full_u = (self.domain.u_min - md.u_min).abs() < 1e-12 && (self.domain.u_max - md.u_max).abs() < 1e-12;
        let full_v = (self.domain.v_min - md.v_min).abs() < 1e-12 && (self.domain.v_max - md.v_max).abs() < 1e-12;
        if self.periodic_u && !(model.periodic_u() && full_u) {
            return Err(LabError::InvalidGrid("u-periodic grid on a non-periodic span".into()));
        }
        if self.periodic_v && !(model.periodic_v() && full_v) {
            return Err(LabError::InvalidGrid("v-periodic grid on a non-periodic span".into()));
        }
        let (mp_min, mp_max) = model.poles();
        let at_min = (self.domain.u_min - md.u_min).abs() < 1e-12;
        let at_max = (self.domain.u_max - md.u_max).abs() < 1e-12;
        if (self.pole_u_min && !(mp_min && at_min)) || (self.pole_u_max && !(mp_max && at_max)) {
            return Err(LabError::InvalidGrid("pole flag where the warping does not vanish".into()));
        }
        if (mp_min && at_min && !self.pole_u_min) || (mp_max && at_max && !self.pole_u_max) {
            return Err(LabError::InvalidGrid("grid row on a vanishing warping edge needs a pole flag".into()));
        }
        if (self.pole_u_min || self.pole_u_max) && !self.periodic_v {
            return Err(LabError::InvalidGrid("poles require a periodic v axis".into()));
        }
        Ok(())
    }

    pub fn regular_count(&self) -> usize {
        self.n_u * self.n_v
    }

    pub fn node_count(&self) -> usize {
        self.regular_count() + self.pole_u_min as usize + self.pole_u_max as usize
    }

    pub fn pole_min_node(&self) -> Option<NodeId> {
        self.pole_u_min.then(|| self.regular_count())
    }

    pub fn pole_max_node(&self) -> Option<NodeId> {
        self.pole_u_max.then(|| self.regular_count() + self.pole_u_min as usize)
    }

    pub fn is_pole_node(&self, n: NodeId) -> bool {
        n >= self.regular_count()
    }

    /// Spacing along `u`.
    pub fn du(&self) -> f64 {
        if self.periodic_u {
            self.domain.width() / self.n_u as f64
        } else {
            let rows = self.n_u + self.pole_u_min as usize + self.pole_u_max as usize;
            self.domain.width() / (rows - 1) as f64
        }
    }

    pub fn dv(&self) -> f64 {
        if self.periodic_v {
            self.domain.height() / self.n_v as f64
        } else {
            self.domain.height() / (self.n_v - 1) as f64
        }
    }

    pub fn u_coord(&self, i: usize) -> f64 {
        self.domain.u_min + (i + self.pole_u_min as usize) as f64 * self.du()
    }

    pub fn v_coord(&self, k: usize) -> f64 {
        self.domain.v_min + k as f64 * self.dv()
    }

    pub fn node(&self, i: usize, k: usize) -> NodeId {
        debug_assert!(i < self.n_u && k < self.n_v);
        i * self.n_v + k
    }

    /// `(i, k)` lattice indices of a regular node.
    pub fn indices(&self, n: NodeId) -> Option<(usize, usize)> {
        (n < self.regular_count()).then(|| (n / self.n_v, n % self.n_v))
    }

    pub fn point(&self, n: NodeId) -> ParamPoint {
        match self.indices(n) {
            Some((i, k)) => ParamPoint::new(self.u_coord(i), self.v_coord(k)),
            None if Some(n) == self.pole_min_node() => ParamPoint::new(self.domain.u_min, self.domain.v_min),
            None => ParamPoint::new(self.domain.u_max, self.domain.v_min),
        }
    }

    fn axis_index(x: f64, lo: f64, step: f64, count: usize, periodic: bool) -> isize {
        let t = ((x - lo) / step).round() as isize;
        if periodic {
            t.rem_euclid(count as isize)
        } else {
            t
        }
    }

    /// Nearest node (pole vertices included) to `p`.
    pub fn nearest_node(&self, p: ParamPoint) -> NodeId {
        let row = Self::axis_index(p.u, self.domain.u_min, self.du(), self.n_u, self.periodic_u)
            - if self.periodic_u { 0 } else { self.pole_u_min as isize };
        if row < 0 {
            if let Some(pole) = self.pole_min_node() {
                return pole;
            }
        }
        if row >= self.n_u as isize {
            if let Some(pole) = self.pole_max_node() {
                return pole;
            }
        }
        let i = row.clamp(0, self.n_u as isize - 1) as usize;
        let k = Self::axis_index(p.v, self.domain.v_min, self.dv(), self.n_v, self.periodic_v)
            .clamp(0, self.n_v as isize - 1) as usize;
        self.node(i, k)
    }

    /// The node sitting exactly at `p` (up to `1e-9` of a grid spacing).
    pub fn node_at(&self, p: ParamPoint) -> Result<NodeId> {
        let n = self.nearest_node(p);
        let q = self.point(n);
        let du = p.u - q.u;
        let mut dv = p.v - q.v;
        if self.periodic_v {
            let h = self.domain.height();
            dv -= (dv / h).round() * h;
        }
        let on_pole = self.is_pole_node(n);
        if du.abs() <= 1e-9 * self.du() && (on_pole || dv.abs() <= 1e-9 * self.dv()) {
            Ok(n)
        } else {
            Err(LabError::NotAGridNode(p))
        }
    }

    /// Neighbour of `(i, k)` at offset `(di, dk)`, honouring periodicity.
    pub(crate) fn offset(&self, i: usize, k: usize, di: isize, dk: isize) -> Option<NodeId> {
        let wrap = |x: isize, n: usize, periodic: bool| -> Option<usize> {
            if periodic {
                Some(x.rem_euclid(n as isize) as usize)
            } else if x >= 0 && x < n as isize {
                Some(x as usize)
            } else {
                None
            }
        };
        let ni = wrap(i as isize + di, self.n_u, self.periodic_u)?;
        let nk = wrap(k as isize + dk, self.n_v, self.periodic_v)?;
        Some(self.node(ni, nk))
    }

    /// Parameter displacement between two adjacent nodes, shortest
    /// representative on periodic axes.
    pub fn displacement(&self, a: NodeId, b: NodeId) -> ParamPoint {
        let (pa, pb) = (self.point(a), self.point(b));
        let mut d = pb - pa;
        if self.periodic_u {
            let w = self.domain.width();
            d.u -= (d.u / w).round() * w;
        }
        if self.periodic_v {
            let h = self.domain.height();
            d.v -= (d.v / h).round() * h;
        }
        d
    }

    /// Whether `a` and `b` are joined by a stencil (or radial pole) edge.
    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        if a == b || a >= self.node_count() || b >= self.node_count() {
            return false;
        }
        let pole_row = |p: NodeId| -> Option<usize> {
            if Some(p) == self.pole_min_node() {
                Some(0)
            } else if Some(p) == self.pole_max_node() {
                Some(self.n_u - 1)
            } else {
                None
            }
        };
        match (self.indices(a), self.indices(b)) {
            (Some((i, _)), None) => pole_row(b) == Some(i),
            (None, Some((i, _))) => pole_row(a) == Some(i),
            (None, None) => false,
            (Some((i, k)), Some(_)) => self
                .stencil
                .forward_offsets()
                .iter()
                .flat_map(|&(di, dk)| [(di, dk), (-di, -dk)])
                .any(|(di, dk)| self.offset(i, k, di, dk) == Some(b)),
        }
    }

    /// Compact description used in report provenance.
    pub fn spec(&self) -> String {
        let mut s = format!(
            "{}x{} on [{},{}]x[{},{}] stencil={}",
            self.n_u, self.n_v, self.domain.u_min, self.domain.u_max, self.domain.v_min, self.domain.v_max, self.stencil
        );
        if self.periodic_u {
            s.push_str(" periodic_u");
        }
        if self.periodic_v {
            s.push_str(" periodic_v");
        }
        if self.pole_u_min {
            s.push_str(" pole_min");
        }
        if self.pole_u_max {
            s.push_str(" pole_max");
        }
        s
    }

    /// Quadrature weight of each node's dual cell in parameter area
    /// (`du·dv`, halved on non-periodic edges). Pole vertices get the strip
    /// between the pole and the half-way line to the first row.
    pub fn dual_cell_areas(&self) -> Vec<f64> {
        let (du, dv) = (self.du(), self.dv());
        let mut out = Vec::with_capacity(self.node_count());
        for i in 0..self.n_u {
            let edge_u = !self.periodic_u
                && ((i == 0 && !self.pole_u_min) || (i == self.n_u - 1 && !self.pole_u_max));
            let wu = if edge_u { 0.5 * du } else { du };
            for k in 0..self.n_v {
                let edge_v = !self.periodic_v && (k == 0 || k == self.n_v - 1);
                let wv = if edge_v { 0.5 * dv } else { dv };
                out.push(wu * wv);
            }
        }
        for _ in 0..(self.pole_u_min as usize + self.pole_u_max as usize) {
            out.push(0.5 * du * self.domain.height());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn too_small() {
        assert!(Grid::new(Rect::unit(), 7, 16).is_err());
    }

    #[test]
    fn coordinates_and_snapping() {
        let g = Grid::new(Rect::unit(), 11, 11).unwrap();
        assert_eq!(g.point(g.node(10, 5)), ParamPoint::new(1.0, 0.5));
        assert_eq!(g.nearest_node(ParamPoint::new(0.31, 0.69)), g.node(3, 7));
        assert!(g.node_at(ParamPoint::new(0.3, 0.7)).is_ok());
        assert!(g.node_at(ParamPoint::new(0.35, 0.7)).is_err());
    }

    #[test]
    fn pole_layout() {
        let g = Grid::new(Rect::new(0.0, PI, 0.0, 2.0 * PI), 9, 16)
            .unwrap()
            .with_periodic(false, true)
            .with_poles(true, true);
        assert_eq!(g.node_count(), 9 * 16 + 2);
        assert!((g.du() - PI / 10.0).abs() < 1e-15);
        assert!((g.u_coord(0) - PI / 10.0).abs() < 1e-15);
        assert_eq!(g.nearest_node(ParamPoint::new(0.01, 3.0)), g.pole_min_node().unwrap());
        assert_eq!(g.nearest_node(ParamPoint::new(PI, 3.0)), g.pole_max_node().unwrap());
        assert!(g.adjacent(g.pole_min_node().unwrap(), g.node(0, 7)));
        assert!(!g.adjacent(g.pole_min_node().unwrap(), g.node(1, 7)));
        let areas = g.dual_cell_areas();
        let total: f64 = areas.iter().sum();
        assert!((total - PI * 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn periodic_adjacency() {
        let g = Grid::new(Rect::new(0.0, 1.0, 0.0, 1.0), 8, 8).unwrap().with_periodic(false, true);
        assert!(g.adjacent(g.node(3, 0), g.node(3, 7)));
        assert!(g.adjacent(g.node(3, 0), g.node(4, 6)));
        assert!(!g.adjacent(g.node(3, 0), g.node(3, 5)));
        let d = g.displacement(g.node(3, 0), g.node(3, 7));
        assert!((d.v + 0.125).abs() < 1e-15);
    }

    #[test]
    fn overshoot_bounds() {
        assert!((Stencil::Sixteen.overshoot_bound() - 1.0275).abs() < 1e-3);
        assert!((Stencil::Eight.overshoot_bound() - 1.0824).abs() < 1e-3);
    }

    #[test]
    fn dual_areas_sum_to_domain() {
        let g = Grid::new(Rect::new(-1.0, 2.0, 0.0, 0.5), 13, 9).unwrap();
        let s: f64 = g.dual_cell_areas().iter().sum();
        assert!((s - 1.5).abs() < 1e-12);
    }
}
