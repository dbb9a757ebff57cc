use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

use super::config::ExperimentConfig;
use super::params::Params;

/// A closed-form value tied to the parameters it was evaluated at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub case: String,
    pub quantity: String,
    pub value: f64,
}

fn push(out: &mut Vec<Reference>, case: &str, quantity: &str, value: f64) {
    out.push(Reference { case: case.into(), quantity: quantity.into(), value });
}

/// Length of the straight plateau path between the critical bump points
/// `(-1/(8j²), 0)` and `(1/(8j²), 1/(8j²))`.
pub fn bump_path_length(j: u32, eta: f64) -> f64 {
    let j = j as f64;
    let je = j.powf(eta);
    (je * je + 2.0 * je + 5.0).sqrt() / (8.0 * j * j)
}

/// Their distance in the unwarped cylinder.
pub fn bump_limit_distance(j: u32) -> f64 {
    5f64.sqrt() / (8.0 * (j as f64).powi(2))
}

/// `2π ∫ f_j` for the smoothstep bump on `[-1, 1]`.
pub fn bump_volume(j: u32, eta: f64) -> f64 {
    2.0 * PI * (2.0 + 1.5 * (j as f64).powf(eta - 1.0))
}

/// `(h_j + √2 + 1) / 2^j`.
pub fn tiled_delta(j: u32, h: f64) -> f64 {
    (h + SQRT_2 + 1.0) / 2f64.powi(j as i32)
}

/// The piecewise linear majorant `min((2 + h) s, 2 s + δ)`.
pub fn majorant(h: f64, delta: f64, s: f64) -> f64 {
    ((2.0 + h) * s).min(2.0 * s + delta)
}

/// Outcome of the λ search on `(0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaSearch {
    pub lambda: f64,
    pub argmax: f64,
    /// `δ/h`, where the two branches of the majorant meet (none for `h = 0`).
    pub kink: Option<f64>,
    pub delta: f64,
}

impl LambdaSearch {
    /// Ratio `f(s)/s^α` at the kink.
    pub fn kink_ratio(&self, h: f64, alpha: f64) -> Option<f64> {
        self.kink.map(|s| majorant(h, self.delta, s) / s.powf(alpha))
    }
}

/// Points of the uniform search grid on `(0, 2]`.
pub const LAMBDA_GRID: usize = 10_000;

/// Least `λ` with `min((2 + h)s, 2s + δ_j) ≤ λ s^α` on a `10⁴`-point grid
/// of `(0, 2]` plus the kink `δ_j/h`.
pub fn holder_lambda_search(j: u32, h: f64, alpha: f64) -> Result<LambdaSearch> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(LabError::InvalidExponent(alpha));
    }
    if !(h >= 0.0 && h.is_finite()) {
        return Err(LabError::InvalidModel(format!("height {h} must be finite and >= 0")));
    }
    let delta = tiled_delta(j, h);
    let kink = (h > 0.0).then(|| delta / h).filter(|&s| s <= 2.0);
    let mut best = LambdaSearch { lambda: 0.0, argmax: 0.0, kink, delta };
    let grid = (1..=LAMBDA_GRID).map(|i| 2.0 * i as f64 / LAMBDA_GRID as f64);
    for s in grid.chain(kink) {
        let ratio = majorant(h, delta, s) / s.powf(alpha);
        if ratio > best.lambda {
            best.lambda = ratio;
            best.argmax = s;
        }
    }
    Ok(best)
}

/// Closed-form values for an experiment at the config's parameters.
/// Experiments without closed forms give an empty table.
pub fn reference_values(config: &ExperimentConfig) -> Result<Vec<Reference>> {
    let prm = Params::resolve(config)?;
    let mut out = Vec::new();
    match config.experiment.as_str() {
        "flat-check" => {
            push(&mut out, "flat", "volume", 1.0);
            push(&mut out, "flat", "ball density", PI);
        }
        "nonuniform" => {
            for &j in &prm.j {
                let case = format!("j={j} eta={}", prm.eta);
                let l = bump_path_length(j, prm.eta);
                let d = bump_limit_distance(j);
                push(&mut out, &case, "d_j(p_j,q_j)", l);
                push(&mut out, &case, "d_inf(p_j,q_j)", d);
                push(&mut out, &case, "d_j/d_inf", l / d);
                push(&mut out, &case, "volume", bump_volume(j, prm.eta));
                push(&mut out, &case, "volume bound", 16.0 * PI);
            }
        }
        "power-holder" => {
            let n = prm.samples as f64;
            for &j in &prm.j {
                push(&mut out, &format!("j={j} n={}", prm.samples), "sup deviation", 1.0 - (1.0 / n).powf(1.0 / j as f64));
            }
        }
        "cone" => push(&mut out, "limit", "ball density", 2.0),
        "cusp" => push(&mut out, "limit", "density ratio bound", 0.5),
        "cinch" => {
            for &j in &prm.j {
                push(&mut out, &format!("j={j} h0={}", prm.h0), "d_j((0,0),(0,pi))", prm.h0 * PI);
            }
        }
        "blocks" => {
            for &h in &prm.h {
                push(&mut out, &format!("h={h}"), "volume", 1.0 + 4.0 * h);
                push(&mut out, &format!("h={h}"), "hausdorff bound", h + SQRT_2);
            }
        }
        "tiled" => {
            for (&j, &h) in prm.j.iter().zip(&prm.h) {
                let case = format!("j={j} h={h}");
                push(&mut out, &case, "volume", 1.0 + 4.0 * h);
                push(&mut out, &case, "tile volume", (1.0 + 4.0 * h) / 4f64.powi(j as i32));
                push(&mut out, &case, "delta_j", tiled_delta(j, h));
            }
        }
        "holder-lambda" => {
            for (&j, &h) in prm.j.iter().zip(&prm.h) {
                let s = holder_lambda_search(j, h, prm.alpha)?;
                push(&mut out, &format!("j={j} h={h} alpha={}", prm.alpha), "lambda_alpha", s.lambda);
            }
        }
        "trace" | "trace-counterexample" => {}
        other => return Err(LabError::UnknownExperiment(other.into())),
    }
    Ok(out)
}
