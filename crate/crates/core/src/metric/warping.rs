//! Warping functions `f` for warped products `dr² + f(r)² dθ²`.
//!
//! The families reproduce the profiles of the non-uniform bump sequence, the
//! cusp and cone sphere sequences, and the cinched torus. Wherever a profile is
//! only qualitatively constrained it is fixed to a closed-form C¹ piece:
//! smoothstep ramps for the bump and a cubic Hermite join on `(π/2, 3π/4)` for
//! the sphere families.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

const DOMAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WarpingFunction {
    /// `f ≡ value` on `[a, b]`.
    Constant { value: f64, a: f64, b: f64 },
    /// Bump of height `j^η + 1` supported in `[-1/j, 1/j]`, on `[-1, 1]`.
    NonUniform { j: u32, eta: f64 },
    /// `(1/j) sin r + (1 - 1/j) f(r)` with a quadratic cusp tip at `r = π`.
    /// `j = None` is the limit profile `f` itself.
    Cusp { j: Option<u32> },
    /// Same as [`WarpingFunction::Cusp`] but with a linear (cone) tip.
    Cone { j: Option<u32> },
    /// Dip to `h0` supported in `[-1/j, 1/j]`, on `[-π, π]`.
    Cinch { j: u32, h0: f64 },
}

impl WarpingFunction {
    pub fn constant(value: f64, a: f64, b: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(LabError::InvalidModel(format!("constant warping {value} must be positive")));
        }
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            return Err(LabError::InvalidModel(format!("empty interval [{a}, {b}]")));
        }
        Ok(Self::Constant { value, a, b })
    }

    pub fn nonuniform(j: u32, eta: f64) -> Result<Self> {
        if j == 0 {
            return Err(LabError::InvalidModel("bump index j must be >= 1".into()));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(LabError::InvalidModel(format!("eta = {eta} must lie in (0, 1)")));
        }
        Ok(Self::NonUniform { j, eta })
    }

    pub fn cusp(j: Option<u32>) -> Result<Self> {
        check_sphere_index(j)?;
        Ok(Self::Cusp { j })
    }

    pub fn cone(j: Option<u32>) -> Result<Self> {
        check_sphere_index(j)?;
        Ok(Self::Cone { j })
    }

    pub fn cinch(j: u32, h0: f64) -> Result<Self> {
        if j == 0 {
            return Err(LabError::InvalidModel("cinch index j must be >= 1".into()));
        }
        if !(h0 > 0.0 && h0 <= 1.0) {
            return Err(LabError::InvalidModel(format!("h0 = {h0} must lie in (0, 1]")));
        }
        Ok(Self::Cinch { j, h0 })
    }

    /// The `r`-interval the function is defined on.
    pub fn interval(&self) -> (f64, f64) {
        match *self {
            Self::Constant { a, b, .. } => (a, b),
            Self::NonUniform { .. } => (-1.0, 1.0),
            Self::Cusp { .. } | Self::Cone { .. } => (0.0, PI),
            Self::Cinch { .. } => (-PI, PI),
        }
    }

    /// Whether `f` vanishes at the lower / upper end of its interval.
    pub fn vanishes_at_ends(&self) -> (bool, bool) {
        match self {
            Self::Cusp { .. } | Self::Cone { .. } => (true, true),
            _ => (false, false),
        }
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.eval(r).0)
    }

    pub fn derivative(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.eval(r).1)
    }

    fn check(&self, r: f64) -> Result<()> {
        let (a, b) = self.interval();
        if !(r >= a - DOMAIN_EPS && r <= b + DOMAIN_EPS) {
            return Err(LabError::InvalidModel(format!(
                "r = {r} outside warping interval [{a}, {b}]"
            )));
        }
        Ok(())
    }

    /// `(f(r), f'(r))` without a domain check.
    pub(crate) fn eval(&self, r: f64) -> (f64, f64) {
        match *self {
            Self::Constant { value, .. } => (value, 0.0),
            Self::NonUniform { j, eta } => nonuniform(j as f64, eta, r),
            Self::Cusp { j } => sphere_family(j, r, SphereTip::Cusp),
            Self::Cone { j } => sphere_family(j, r, SphereTip::Cone),
            Self::Cinch { j, h0 } => cinch(j as f64, h0, r),
        }
    }

    /// Plateau value `j^η + 1` for the bump family, `None` otherwise.
    pub fn plateau(&self) -> Option<f64> {
        match *self {
            Self::NonUniform { j, eta } => Some((j as f64).powf(eta) + 1.0),
            _ => None,
        }
    }

    /// Endpoints of the pieces on which `f` is a polynomial or a sine, used
    /// to build exact piecewise quadratures.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.interval();
        let mut pts = vec![a];
        match *self {
            Self::Constant { .. } => {}
            Self::NonUniform { j, .. } => {
                let j = j as f64;
                for t in [-1.0, -0.5, 0.5, 1.0] {
                    let r = t / j;
                    if r > a && r < b {
                        pts.push(r);
                    }
                }
            }
            Self::Cusp { .. } | Self::Cone { .. } => pts.extend([FRAC_PI_2, 3.0 * FRAC_PI_4]),
            Self::Cinch { j, .. } => {
                let j = j as f64;
                pts.extend([-1.0 / j, 0.0, 1.0 / j]);
            }
        }
        pts.push(b);
        pts.dedup();
        pts
    }
}

impl fmt::Display for WarpingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Constant { value, a, b } => write!(f, "constant(c={value},r=[{a},{b}])"),
            Self::NonUniform { j, eta } => write!(f, "nonuniform(j={j},eta={eta})"),
            Self::Cusp { j: Some(j) } => write!(f, "cusp(j={j})"),
            Self::Cusp { j: None } => write!(f, "cusp(limit)"),
            Self::Cone { j: Some(j) } => write!(f, "cone(j={j})"),
            Self::Cone { j: None } => write!(f, "cone(limit)"),
            Self::Cinch { j, h0 } => write!(f, "cinch(j={j},h0={h0})"),
        }
    }
}

fn check_sphere_index(j: Option<u32>) -> Result<()> {
    if j == Some(0) {
        return Err(LabError::InvalidModel("sphere family index j must be >= 1".into()));
    }
    Ok(())
}

fn smoothstep(x: f64) -> (f64, f64) {
    (x * x * (3.0 - 2.0 * x), 6.0 * x * (1.0 - x))
}

fn nonuniform(j: f64, eta: f64, r: f64) -> (f64, f64) {
    let amp = j.powf(eta);
    let t = j * r;
    if t.abs() >= 1.0 {
        (1.0, 0.0)
    } else if t.abs() <= 0.5 {
        (amp + 1.0, 0.0)
    } else if t < 0.0 {
        let (s, ds) = smoothstep(2.0 * (t + 1.0));
        (1.0 + amp * s, amp * ds * 2.0 * j)
    } else {
        let (s, ds) = smoothstep(2.0 * (1.0 - t));
        (1.0 + amp * s, -amp * ds * 2.0 * j)
    }
}

fn cinch(j: f64, h0: f64, r: f64) -> (f64, f64) {
    let t = j * r;
    if t.abs() >= 1.0 {
        return (1.0, 0.0);
    }
    let a = t.abs();
    let v = h0 + (1.0 - h0) * (3.0 * t * t - 2.0 * a * a * a);
    let dv = (1.0 - h0) * (6.0 * t - 6.0 * t * a) * j;
    (v, dv)
}

#[derive(Clone, Copy)]
enum SphereTip {
    Cusp,
    Cone,
}

/// Limit profile of the cusp/cone families.
fn sphere_limit(r: f64, tip: SphereTip) -> (f64, f64) {
    let join_end = 3.0 * FRAC_PI_4;
    if r <= FRAC_PI_2 {
        return (r.sin(), r.cos());
    }
    if r >= join_end {
        let x = r - PI;
        return match tip {
            SphereTip::Cusp => (4.0 / (PI * PI) * x * x, 8.0 / (PI * PI) * x),
            SphereTip::Cone => (-2.0 / PI * x, -2.0 / PI),
        };
    }
    // Cubic Hermite join: f(π/2) = 1, f'(π/2) = 0, matching value and slope
    // of the tip piece at 3π/4.
    let end_value = match tip {
        SphereTip::Cusp => 0.25,
        SphereTip::Cone => 0.5,
    };
    let end_slope = -2.0 / PI;
    let width = FRAC_PI_4;
    let t = (r - FRAC_PI_2) / width;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let d00 = 6.0 * t2 - 6.0 * t;
    let d01 = -6.0 * t2 + 6.0 * t;
    let d11 = 3.0 * t2 - 2.0 * t;
    let v = h00 + h01 * end_value + h11 * width * end_slope;
    let dv = (d00 + d01 * end_value + d11 * width * end_slope) / width;
    (v, dv)
}

fn sphere_family(j: Option<u32>, r: f64, tip: SphereTip) -> (f64, f64) {
    let (f, df) = sphere_limit(r, tip);
    match j {
        None => (f, df),
        Some(j) => {
            let w = 1.0 / j as f64;
            (w * r.sin() + (1.0 - w) * f, w * r.cos() + (1.0 - w) * df)
        }
    }
}
