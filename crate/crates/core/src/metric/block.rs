//! Piecewise-flat "open box" metric on the unit square and its rescaled
//! `2^j × 2^j` tiling.
//!
//! The square is split into five regions. `top = [1/4, 3/4]²` is the lid of
//! the box and the four trapezoids between it and the boundary are the walls.
//! Each region is the image of a flat rectangle under an explicit map `F_R`;
//! the metric is the pullback of the Euclidean metric along `F_R⁻¹`. Adjacent
//! regions glue isometrically along their shared edges.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

use super::ParamPoint;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockRegion {
    Top,
    Left,
    Right,
    Front,
    Back,
}

impl BlockRegion {
    /// Tie-break priority on shared boundaries.
    pub const PRIORITY: [BlockRegion; 5] = [Self::Top, Self::Left, Self::Right, Self::Front, Self::Back];

    /// Dimensions `(s_max, t_max)` of the flat rectangle the region is
    /// pulled back to.
    pub fn pullback_rect(self, h: f64) -> (f64, f64) {
        match self {
            Self::Top => (1.0, 1.0),
            Self::Left | Self::Right => (h, 1.0),
            Self::Front | Self::Back => (1.0, h),
        }
    }

    fn contains(self, p: ParamPoint) -> bool {
        let (x, y) = (p.u, p.v);
        match self {
            Self::Top => (0.25 - EPS..=0.75 + EPS).contains(&x) && (0.25 - EPS..=0.75 + EPS).contains(&y),
            Self::Left => x <= y + EPS && y <= 1.0 - x + EPS && x <= 0.25 + EPS,
            Self::Right => 1.0 - x <= y + EPS && y <= x + EPS && x >= 0.75 - EPS,
            Self::Front => y <= x + EPS && x <= 1.0 - y + EPS && y <= 0.25 + EPS,
            Self::Back => 1.0 - y <= x + EPS && x <= y + EPS && y >= 0.75 - EPS,
        }
    }
}

impl fmt::Display for BlockRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Top => "top",
            Self::Left => "left",
            Self::Right => "right",
            Self::Front => "front",
            Self::Back => "back",
        };
        f.write_str(s)
    }
}

/// Box of height `h` over the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockMetric {
    h: f64,
}

impl BlockMetric {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 1.0 && h.is_finite()) {
            return Err(LabError::InvalidModel(format!("block height h = {h} must exceed 1")));
        }
        Ok(Self { h })
    }

    pub fn height(&self) -> f64 {
        self.h
    }

    pub fn region_of(&self, p: ParamPoint) -> Result<BlockRegion> {
        check_unit_square(p)?;
        Ok(BlockRegion::PRIORITY
            .into_iter()
            .find(|r| r.contains(p))
            .expect("the five regions cover the unit square"))
    }

    /// `F_R(s, t)`.
    pub fn forward(&self, region: BlockRegion, q: ParamPoint) -> ParamPoint {
        let (s, t) = (q.u, q.v);
        let k = 4.0 * self.h;
        match region {
            BlockRegion::Top => ParamPoint::new(0.25 + 0.5 * s, 0.25 + 0.5 * t),
            BlockRegion::Left => {
                let a = s / k;
                ParamPoint::new(a, a * (1.0 - t) + (1.0 - a) * t)
            }
            BlockRegion::Right => {
                let a = s / k;
                ParamPoint::new(1.0 - a, (1.0 - a) * (1.0 - t) + a * t)
            }
            BlockRegion::Front => {
                let b = t / k;
                ParamPoint::new(b * (1.0 - s) + (1.0 - b) * s, b)
            }
            BlockRegion::Back => {
                let b = t / k;
                ParamPoint::new((1.0 - b) * (1.0 - s) + b * s, 1.0 - b)
            }
        }
    }

    /// `F_R⁻¹(p)` in closed form. Defined on a neighbourhood of the region;
    /// callers pick `region` themselves when a point sits on a shared edge.
    pub fn pullback_in(&self, region: BlockRegion, p: ParamPoint) -> ParamPoint {
        let (x, y) = (p.u, p.v);
        let k = 4.0 * self.h;
        match region {
            BlockRegion::Top => ParamPoint::new(2.0 * x - 0.5, 2.0 * y - 0.5),
            BlockRegion::Left => ParamPoint::new(k * x, (y - x) / (1.0 - 2.0 * x)),
            BlockRegion::Right => ParamPoint::new(k * (1.0 - x), (x - y) / (2.0 * x - 1.0)),
            BlockRegion::Front => ParamPoint::new((x - y) / (1.0 - 2.0 * y), k * y),
            BlockRegion::Back => ParamPoint::new((y - x) / (2.0 * y - 1.0), k * (1.0 - y)),
        }
    }

    pub fn pullback(&self, p: ParamPoint) -> Result<(BlockRegion, ParamPoint)> {
        let r = self.region_of(p)?;
        Ok((r, self.pullback_in(r, p)))
    }

    /// Jacobian `∂(s, t)/∂(x, y)` of `F_R⁻¹` at `p`, row-major.
    pub fn inverse_jacobian(&self, region: BlockRegion, p: ParamPoint) -> [[f64; 2]; 2] {
        let (x, y) = (p.u, p.v);
        let k = 4.0 * self.h;
        match region {
            BlockRegion::Top => [[2.0, 0.0], [0.0, 2.0]],
            BlockRegion::Left => {
                let d = 1.0 - 2.0 * x;
                [[k, 0.0], [(2.0 * y - 1.0) / (d * d), 1.0 / d]]
            }
            BlockRegion::Right => {
                let d = 2.0 * x - 1.0;
                [[-k, 0.0], [(2.0 * y - 1.0) / (d * d), -1.0 / d]]
            }
            BlockRegion::Front => {
                let d = 1.0 - 2.0 * y;
                [[1.0 / d, (2.0 * x - 1.0) / (d * d)], [0.0, k]]
            }
            BlockRegion::Back => {
                let d = 1.0 - 2.0 * y;
                [[1.0 / d, (2.0 * x - 1.0) / (d * d)], [0.0, -k]]
            }
        }
    }

    pub(crate) fn form_matrix(&self, p: ParamPoint) -> Result<[[f64; 2]; 2]> {
        let r = self.region_of(p)?;
        let j = self.inverse_jacobian(r, p);
        Ok(gram(&j))
    }

    pub(crate) fn sqrt_det(&self, p: ParamPoint) -> Result<f64> {
        let r = self.region_of(p)?;
        let j = self.inverse_jacobian(r, p);
        Ok((j[0][0] * j[1][1] - j[0][1] * j[1][0]).abs())
    }

    /// Length of the straight parameter segment `a → a + d`: split at every
    /// region edge, each flat piece contributes its chord in pullback
    /// coordinates.
    pub fn segment_length(&self, a: ParamPoint, d: ParamPoint) -> Result<f64> {
        check_unit_square(a)?;
        check_unit_square(a + d)?;
        let mut cuts = vec![0.0, 1.0];
        let mut cut = |t: f64| {
            if t.is_finite() && t > EPS && t < 1.0 - EPS {
                cuts.push(t);
            }
        };
        for c in [0.25, 0.75] {
            if d.u != 0.0 {
                cut((c - a.u) / d.u);
            }
            if d.v != 0.0 {
                cut((c - a.v) / d.v);
            }
        }
        if d.v != d.u {
            cut((a.u - a.v) / (d.v - d.u));
        }
        if d.u + d.v != 0.0 {
            cut((1.0 - a.u - a.v) / (d.u + d.v));
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y).abs() <= EPS);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let mid = a + d * (0.5 * (t0 + t1));
            let region = self.region_of(mid.clamp_unit())?;
            let q0 = self.pullback_in(region, a + d * t0);
            let q1 = self.pullback_in(region, a + d * t1);
            total += (q1 - q0).norm();
        }
        Ok(total)
    }
}

/// `2^j × 2^j` tiling of rescaled blocks of height `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiledMetric {
    j: u32,
    block: BlockMetric,
}

impl TiledMetric {
    pub fn new(j: u32, h: f64) -> Result<Self> {
        if j == 0 || j > 16 {
            return Err(LabError::InvalidModel(format!("tiling level j = {j} must lie in 1..=16")));
        }
        Ok(Self { j, block: BlockMetric::new(h)? })
    }

    pub fn level(&self) -> u32 {
        self.j
    }

    pub fn block(&self) -> &BlockMetric {
        &self.block
    }

    pub fn tiles_per_side(&self) -> usize {
        1usize << self.j
    }

    /// `δ_j = 2^{-j}(h + √2 + 1)`.
    pub fn delta(&self) -> f64 {
        (self.block.h + std::f64::consts::SQRT_2 + 1.0) / self.tiles_per_side() as f64
    }

    /// Zero-based tile indices `(l, m)` containing `p` (upper tile wins on
    /// shared lines, clamped at the far edge).
    pub fn tile_of(&self, p: ParamPoint) -> Result<(usize, usize)> {
        check_unit_square(p)?;
        let n = self.tiles_per_side();
        let idx = |c: f64| ((c * n as f64).floor().max(0.0) as usize).min(n - 1);
        Ok((idx(p.u), idx(p.v)))
    }

    /// Tile map `F^j_{l,m}`: the tile `(l, m)` onto the unit square.
    pub fn to_local(&self, tile: (usize, usize), p: ParamPoint) -> ParamPoint {
        let n = self.tiles_per_side() as f64;
        ParamPoint::new(n * p.u - tile.0 as f64, n * p.v - tile.1 as f64)
    }

    pub(crate) fn form_matrix(&self, p: ParamPoint) -> Result<[[f64; 2]; 2]> {
        let tile = self.tile_of(p)?;
        self.block.form_matrix(self.to_local(tile, p).clamp_unit())
    }

    pub(crate) fn sqrt_det(&self, p: ParamPoint) -> Result<f64> {
        let tile = self.tile_of(p)?;
        self.block.sqrt_det(self.to_local(tile, p).clamp_unit())
    }

    pub fn segment_length(&self, a: ParamPoint, d: ParamPoint) -> Result<f64> {
        check_unit_square(a)?;
        check_unit_square(a + d)?;
        let n = self.tiles_per_side();
        let mut cuts = vec![0.0, 1.0];
        for k in 1..n {
            let c = k as f64 / n as f64;
            for (a0, d0) in [(a.u, d.u), (a.v, d.v)] {
                if d0 != 0.0 {
                    let t = (c - a0) / d0;
                    if t > EPS && t < 1.0 - EPS {
                        cuts.push(t);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y).abs() <= EPS);
        let scale = 1.0 / n as f64;
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let tile = self.tile_of((a + d * (0.5 * (t0 + t1))).clamp_unit())?;
            let l0 = self.to_local(tile, a + d * t0).clamp_unit();
            let l1 = self.to_local(tile, a + d * t1).clamp_unit();
            total += scale * self.block.segment_length(l0, l1 - l0)?;
        }
        Ok(total)
    }
}

fn gram(j: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let g00 = j[0][0] * j[0][0] + j[1][0] * j[1][0];
    let g01 = j[0][0] * j[0][1] + j[1][0] * j[1][1];
    let g11 = j[0][1] * j[0][1] + j[1][1] * j[1][1];
    [[g00, g01], [g01, g11]]
}

fn check_unit_square(p: ParamPoint) -> Result<()> {
    let inside = |c: f64| (-EPS..=1.0 + EPS).contains(&c);
    if inside(p.u) && inside(p.v) {
        Ok(())
    } else {
        Err(LabError::PointOutsideDomain(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(u: f64, v: f64) -> ParamPoint {
        ParamPoint::new(u, v)
    }

    #[test]
    fn regions() {
        let b = BlockMetric::new(2.0).unwrap();
        assert_eq!(b.region_of(pt(0.5, 0.5)).unwrap(), BlockRegion::Top);
        assert_eq!(b.region_of(pt(0.1, 0.5)).unwrap(), BlockRegion::Left);
        assert_eq!(b.region_of(pt(0.25, 0.25)).unwrap(), BlockRegion::Top);
        assert_eq!(b.region_of(pt(0.9, 0.5)).unwrap(), BlockRegion::Right);
        assert_eq!(b.region_of(pt(0.5, 0.1)).unwrap(), BlockRegion::Front);
        assert_eq!(b.region_of(pt(0.5, 0.9)).unwrap(), BlockRegion::Back);
        // diagonal between left and front resolves to left
        assert_eq!(b.region_of(pt(0.1, 0.1)).unwrap(), BlockRegion::Left);
        assert!(b.region_of(pt(1.2, 0.5)).is_err());
    }

    #[test]
    fn pullback_examples() {
        let b = BlockMetric::new(2.0).unwrap();
        let (r, q) = b.pullback(pt(0.5, 0.5)).unwrap();
        assert_eq!(r, BlockRegion::Top);
        assert_relative_eq!(q.u, 0.5);
        assert_relative_eq!(q.v, 0.5);

        let (r, q) = b.pullback(pt(0.125, 0.5)).unwrap();
        assert_eq!(r, BlockRegion::Left);
        assert_relative_eq!(q.u, 1.0, epsilon = 1e-15);
        assert_relative_eq!(q.v, 0.5, epsilon = 1e-15);
        let back = b.forward(r, q);
        assert_relative_eq!(back.u, 0.125, epsilon = 1e-15);
        assert_relative_eq!(back.v, 0.5, epsilon = 1e-15);

        let (r, q) = b.pullback(pt(0.5, 0.0625)).unwrap();
        assert_eq!(r, BlockRegion::Front);
        assert_relative_eq!(q.u, 0.5, epsilon = 1e-15);
        assert_relative_eq!(q.v, 0.5, epsilon = 1e-15);
        let back = b.forward(r, q);
        assert_relative_eq!(back.u, 0.5, epsilon = 1e-15);
        assert_relative_eq!(back.v, 0.0625, epsilon = 1e-15);
    }

    #[test]
    fn forward_maps_rectangles_onto_regions() {
        let b = BlockMetric::new(3.0).unwrap();
        for region in BlockRegion::PRIORITY {
            let (sm, tm) = region.pullback_rect(3.0);
            for i in 0..=10 {
                for k in 0..=10 {
                    let q = pt(sm * i as f64 / 10.0, tm * k as f64 / 10.0);
                    let p = b.forward(region, q);
                    assert!(region.contains(p), "{region}: {q:?} -> {p:?}");
                }
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let b = BlockMetric::new(2.5).unwrap();
        let samples = [pt(0.1, 0.4), pt(0.9, 0.6), pt(0.45, 0.1), pt(0.55, 0.95), pt(0.6, 0.3)];
        for p in samples {
            let r = b.region_of(p).unwrap();
            let j = b.inverse_jacobian(r, p);
            let e = 1e-7;
            for (col, dp) in [(0, pt(e, 0.0)), (1, pt(0.0, e))] {
                let fd = (b.pullback_in(r, p + dp) - b.pullback_in(r, p - dp)) * (0.5 / e);
                assert_relative_eq!(fd.u, j[0][col], epsilon = 1e-6, max_relative = 1e-6);
                assert_relative_eq!(fd.v, j[1][col], epsilon = 1e-6, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn walls_glue_isometrically() {
        use BlockRegion::*;
        let b = BlockMetric::new(3.0).unwrap();
        let stretch = |r: BlockRegion, p: ParamPoint, w: ParamPoint| {
            let j = b.inverse_jacobian(r, p);
            (j[0][0] * w.u + j[0][1] * w.v).hypot(j[1][0] * w.u + j[1][1] * w.v)
        };
        // (region, region, point on the shared edge, edge tangent)
        let seams = [
            (Top, Left, pt(0.25, 0.4), pt(0.0, 1.0)),
            (Top, Right, pt(0.75, 0.6), pt(0.0, 1.0)),
            (Top, Front, pt(0.3, 0.25), pt(1.0, 0.0)),
            (Top, Back, pt(0.7, 0.75), pt(1.0, 0.0)),
            (Left, Front, pt(0.1, 0.1), pt(1.0, 1.0)),
            (Left, Back, pt(0.2, 0.8), pt(1.0, -1.0)),
            (Right, Front, pt(0.9, 0.1), pt(1.0, -1.0)),
            (Right, Back, pt(0.85, 0.85), pt(1.0, 1.0)),
        ];
        for (a, c, p, w) in seams {
            assert_relative_eq!(stretch(a, p, w), stretch(c, p, w), max_relative = 1e-12);
        }
    }

    #[test]
    fn top_form_scales_by_four() {
        let b = BlockMetric::new(2.0).unwrap();
        let g = b.form_matrix(pt(0.5, 0.5)).unwrap();
        assert_eq!(g, [[4.0, 0.0], [0.0, 4.0]]);
    }

    #[test]
    fn left_area_element_at_rim() {
        let b = BlockMetric::new(2.0).unwrap();
        assert_relative_eq!(b.sqrt_det(pt(0.0, 0.5)).unwrap(), 8.0);
        // grows towards the lid edge x = 1/4
        assert_relative_eq!(b.sqrt_det(pt(0.125, 0.5)).unwrap(), 8.0 / 0.75, epsilon = 1e-12);
    }

    #[test]
    fn wall_segment_length() {
        let b = BlockMetric::new(2.0).unwrap();
        let len = b.segment_length(pt(0.0, 0.5), pt(0.125, 0.0)).unwrap();
        assert_relative_eq!(len, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rim_is_euclidean() {
        let b = BlockMetric::new(4.0).unwrap();
        for (a, d) in [(pt(0.0, 0.1), pt(0.0, 0.3)), (pt(0.2, 0.0), pt(0.5, 0.0)), (pt(1.0, 0.9), pt(0.0, -0.8))] {
            assert_relative_eq!(b.segment_length(a, d).unwrap(), d.norm(), epsilon = 1e-14);
        }
    }

    #[test]
    fn crossing_segment_splits_at_edges() {
        // straight up through front wall, lid, back wall along x = 1/2
        let b = BlockMetric::new(2.0).unwrap();
        let len = b.segment_length(pt(0.5, 0.0), pt(0.0, 1.0)).unwrap();
        assert_relative_eq!(len, 2.0 * 2.0 + 1.0, epsilon = 1e-13);
    }

    #[test]
    fn tiled_delta() {
        let t = TiledMetric::new(2, 3.0).unwrap();
        assert_relative_eq!(t.delta(), (3.0 + 2f64.sqrt() + 1.0) / 4.0);
        assert_eq!(t.tile_of(pt(1.0, 0.0)).unwrap(), (3, 0));
        assert_eq!(t.tile_of(pt(0.25, 0.5)).unwrap(), (1, 2));
    }

    #[test]
    fn tiled_segment_on_tile_edges_is_euclidean() {
        let t = TiledMetric::new(3, 3.0).unwrap();
        let len = t.segment_length(pt(0.0, 0.25), pt(0.7, 0.0)).unwrap();
        assert_relative_eq!(len, 0.7, epsilon = 1e-13);
    }
}
