//! Evaluable Riemannian metrics on 2-D parameter rectangles.

mod block;
mod warping;

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub use block::{BlockMetric, BlockRegion, TiledMetric};
pub use warping::WarpingFunction;

const DOMAIN_EPS: f64 = 1e-12;

/// A point `(u, v)` in parameter coordinates, or a tangent vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ParamPoint {
    pub u: f64,
    pub v: f64,
}

impl ParamPoint {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn norm(self) -> f64 {
        self.u.hypot(self.v)
    }

    pub(crate) fn clamp_unit(self) -> Self {
        Self::new(self.u.clamp(0.0, 1.0), self.v.clamp(0.0, 1.0))
    }
}

impl Add for ParamPoint {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.u + o.u, self.v + o.v)
    }
}

impl Sub for ParamPoint {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.u - o.u, self.v - o.v)
    }
}

impl Mul<f64> for ParamPoint {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.u * s, self.v * s)
    }
}

/// Closed parameter rectangle `[u_min, u_max] × [v_min, v_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Rect {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Self {
        Self { u_min, u_max, v_min, v_max }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.u_max - self.u_min
    }

    pub fn height(&self) -> f64 {
        self.v_max - self.v_min
    }

    pub fn contains(&self, p: ParamPoint) -> bool {
        p.u >= self.u_min - DOMAIN_EPS
            && p.u <= self.u_max + DOMAIN_EPS
            && p.v >= self.v_min - DOMAIN_EPS
            && p.v <= self.v_max + DOMAIN_EPS
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains(ParamPoint::new(other.u_min, other.v_min))
            && self.contains(ParamPoint::new(other.u_max, other.v_max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricKind {
    Flat,
    Warped { warping: WarpingFunction },
    Block { block: BlockMetric },
    Tiled { tiled: TiledMetric },
}

/// A Riemannian metric on a parameter rectangle, possibly periodic in either
/// direction and possibly collapsing a `u`-edge to a pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricModel {
    kind: MetricKind,
    domain: Rect,
    periodic_u: bool,
    periodic_v: bool,
    pole_u_min: bool,
    pole_u_max: bool,
}

impl MetricModel {
    pub fn flat(domain: Rect) -> Result<Self> {
        if !(domain.width() > 0.0 && domain.height() > 0.0) {
            return Err(LabError::InvalidModel("empty domain".into()));
        }
        Ok(Self {
            kind: MetricKind::Flat,
            domain,
            periodic_u: false,
            periodic_v: false,
            pole_u_min: false,
            pole_u_max: false,
        })
    }

    /// Flat `[u_min, u_max] × S¹` with circumference `period`.
    pub fn flat_cylinder(u_min: f64, u_max: f64, period: f64) -> Result<Self> {
        let mut m = Self::flat(Rect::new(u_min, u_max, 0.0, period))?;
        m.periodic_v = true;
        Ok(m)
    }

    /// `[a, b] ×_f S¹` with `θ ∈ [0, 2π)`.
    pub fn warped(warping: WarpingFunction) -> Self {
        let (a, b) = warping.interval();
        let (pole_min, pole_max) = warping.vanishes_at_ends();
        Self {
            kind: MetricKind::Warped { warping },
            domain: Rect::new(a, b, 0.0, 2.0 * PI),
            periodic_u: false,
            periodic_v: true,
            pole_u_min: pole_min,
            pole_u_max: pole_max,
        }
    }

    /// Warped product closed up in `r` as well: a torus. The warping must
    /// agree at both ends of its interval.
    pub fn warped_torus(warping: WarpingFunction) -> Result<Self> {
        let (a, b) = warping.interval();
        let (fa, fb) = (warping.eval(a), warping.eval(b));
        if (fa.0 - fb.0).abs() > 1e-12 || (fa.1 - fb.1).abs() > 1e-12 || fa.0 <= 0.0 {
            return Err(LabError::InvalidModel(format!("{warping} does not close up into a torus")));
        }
        Ok(Self { periodic_u: true, ..Self::warped(warping) })
    }

    pub fn block(h: f64) -> Result<Self> {
        let block = BlockMetric::new(h)?;
        Ok(Self { kind: MetricKind::Block { block }, ..Self::flat(Rect::unit())? })
    }

    pub fn tiled(j: u32, h: f64) -> Result<Self> {
        let tiled = TiledMetric::new(j, h)?;
        Ok(Self { kind: MetricKind::Tiled { tiled }, ..Self::flat(Rect::unit())? })
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn periodic_u(&self) -> bool {
        self.periodic_u
    }

    pub fn periodic_v(&self) -> bool {
        self.periodic_v
    }

    pub fn poles(&self) -> (bool, bool) {
        (self.pole_u_min, self.pole_u_max)
    }

    pub fn warping(&self) -> Option<&WarpingFunction> {
        match &self.kind {
            MetricKind::Warped { warping } => Some(warping),
            _ => None,
        }
    }

    pub fn block_metric(&self) -> Option<&BlockMetric> {
        match &self.kind {
            MetricKind::Block { block } => Some(block),
            _ => None,
        }
    }

    pub fn tiled_metric(&self) -> Option<&TiledMetric> {
        match &self.kind {
            MetricKind::Tiled { tiled } => Some(tiled),
            _ => None,
        }
    }

    /// Whether the form is piecewise flat with region edges (block, tiled).
    pub fn is_piecewise_flat(&self) -> bool {
        matches!(self.kind, MetricKind::Block { .. } | MetricKind::Tiled { .. })
    }

    /// Short identifier used in report provenance.
    pub fn id(&self) -> String {
        match &self.kind {
            MetricKind::Flat if self.periodic_v => {
                format!("flat-cylinder(u=[{},{}],period={})", self.domain.u_min, self.domain.u_max, self.domain.height())
            }
            MetricKind::Flat => format!(
                "flat([{},{}]x[{},{}])",
                self.domain.u_min, self.domain.u_max, self.domain.v_min, self.domain.v_max
            ),
            MetricKind::Warped { warping } if self.periodic_u => format!("warped-torus:{warping}"),
            MetricKind::Warped { warping } => format!("warped:{warping}"),
            MetricKind::Block { block } => format!("block(h={})", block.height()),
            MetricKind::Tiled { tiled } => format!("tiled(j={},h={})", tiled.level(), tiled.block().height()),
        }
    }

    /// Reduces periodic coordinates and checks the domain.
    pub fn reduce(&self, p: ParamPoint) -> Result<ParamPoint> {
        let d = &self.domain;
        let wrap = |x: f64, lo: f64, hi: f64| {
            let period = hi - lo;
            let y = lo + (x - lo).rem_euclid(period);
            if y >= hi { lo } else { y }
        };
        let u = if self.periodic_u { wrap(p.u, d.u_min, d.u_max) } else { p.u };
        let v = if self.periodic_v { wrap(p.v, d.v_min, d.v_max) } else { p.v };
        let q = ParamPoint::new(u, v);
        if !d.contains(q) || !q.u.is_finite() || !q.v.is_finite() {
            return Err(LabError::PointOutsideDomain(p));
        }
        Ok(ParamPoint::new(q.u.clamp(d.u_min, d.u_max), q.v.clamp(d.v_min, d.v_max)))
    }

    pub fn is_pole(&self, p: ParamPoint) -> bool {
        (self.pole_u_min && (p.u - self.domain.u_min).abs() <= DOMAIN_EPS)
            || (self.pole_u_max && (p.u - self.domain.u_max).abs() <= DOMAIN_EPS)
    }

    /// Coefficient matrix `g_ij` at `p` in parameter coordinates.
    pub fn form_matrix(&self, p: ParamPoint) -> Result<[[f64; 2]; 2]> {
        let q = self.reduce(p)?;
        if self.is_pole(q) {
            return Err(LabError::EvaluationAtPole(p));
        }
        match &self.kind {
            MetricKind::Flat => Ok([[1.0, 0.0], [0.0, 1.0]]),
            MetricKind::Warped { warping } => {
                let f = warping.eval(q.u).0;
                Ok([[1.0, 0.0], [0.0, f * f]])
            }
            MetricKind::Block { block } => block.form_matrix(q),
            MetricKind::Tiled { tiled } => tiled.form_matrix(q),
        }
    }

    /// `g_p(w, w)`.
    pub fn eval_form(&self, p: ParamPoint, w: ParamPoint) -> Result<f64> {
        if !(w.u.is_finite() && w.v.is_finite()) {
            return Err(LabError::InvalidModel("tangent vector must be finite".into()));
        }
        let g = self.form_matrix(p)?;
        Ok(g[0][0] * w.u * w.u + 2.0 * g[0][1] * w.u * w.v + g[1][1] * w.v * w.v)
    }

    /// Area element `√det g` at `p`; zero at poles.
    pub fn sqrt_det(&self, p: ParamPoint) -> Result<f64> {
        let q = self.reduce(p)?;
        if self.is_pole(q) {
            return Ok(0.0);
        }
        match &self.kind {
            MetricKind::Flat => Ok(1.0),
            MetricKind::Warped { warping } => Ok(warping.eval(q.u).0.abs()),
            MetricKind::Block { block } => block.sqrt_det(q),
            MetricKind::Tiled { tiled } => tiled.sqrt_det(q),
        }
    }

    /// Length of the straight parameter segment `t ↦ p + t·w`, `t ∈ [0, 1]`.
    ///
    /// Flat pieces are measured exactly; smooth warpings use 4-point
    /// Gauss–Legendre quadrature.
    pub fn segment_length(&self, p: ParamPoint, w: ParamPoint) -> Result<f64> {
        match &self.kind {
            MetricKind::Flat => {
                self.reduce(p)?;
                Ok(w.norm())
            }
            MetricKind::Block { block } => block.segment_length(self.reduce(p)?, w),
            MetricKind::Tiled { tiled } => tiled.segment_length(self.reduce(p)?, w),
            MetricKind::Warped { warping } => {
                self.reduce(p)?;
                self.reduce(p + w)?;
                if w.v == 0.0 {
                    return Ok(w.u.abs());
                }
                let mut acc = 0.0;
                for (x, wt) in GAUSS4 {
                    let t = 0.5 * (x + 1.0);
                    let r = if self.periodic_u { self.reduce(p + w * t)?.u } else { p.u + t * w.u };
                    let f = warping.eval(r).0;
                    acc += 0.5 * wt * (w.u * w.u + f * f * w.v * w.v).sqrt();
                }
                Ok(acc)
            }
        }
    }
}

impl fmt::Display for MetricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// 4-point Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
];
