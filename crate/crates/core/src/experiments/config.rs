use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geodesic::Stencil;

/// Names accepted by `run_experiment`, in listing order.
pub const EXPERIMENTS: [&str; 11] = [
    "flat-check",
    "nonuniform",
    "power-holder",
    "cusp",
    "cone",
    "cinch",
    "blocks",
    "tiled",
    "holder-lambda",
    "trace",
    "trace-counterexample",
];

/// One-line description per experiment, for `list`.
pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "flat-check" => "graph distances, volume and ball density on the flat square",
        "nonuniform" => "bump warpings: critical pair distance, ratio growth, volume bound",
        "power-holder" => "|x-y|^(1/j) against the discrete metric: pointwise but not uniform",
        "cusp" => "sphere sequence with a quadratic tip: vanishing density at the pole",
        "cone" => "sphere sequence with a linear tip: positive density at the pole",
        "cinch" => "torus with a thin neck: the lower distance bound fails",
        "blocks" => "single block metric: volume, boundary distances, Hausdorff bound",
        "tiled" => "tiled block metrics: tile volumes, grid-line taxi distances, GH bound",
        "holder-lambda" => "least Hölder constant of the piecewise linear majorant",
        "trace" => "empirical trace constant with band-limited random fields",
        "trace-counterexample" => "log-distance field whose trace blows up under refinement",
        _ => return None,
    })
}

/// Flat key/value experiment configuration (TOML). Every key except
/// `experiment` is optional; unset keys take per-experiment defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub j: Option<Vec<u32>>,
    pub eta: Option<f64>,
    pub h0: Option<f64>,
    pub h: Option<Vec<f64>>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub grid: Option<usize>,
    pub n_u: Option<usize>,
    pub n_v: Option<usize>,
    pub local_grid: Option<usize>,
    pub stencil: Option<u32>,
    pub pairs: Option<usize>,
    pub samples: Option<usize>,
    pub fields: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Largest nodes-per-axis accepted from a config.
pub const MAX_GRID: usize = 2048;

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.to_string(), ..Self::default() }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::InvalidConfig(msg));
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(LabError::UnknownExperiment(self.experiment.clone()));
        }
        if let Some(js) = &self.j {
            if js.is_empty() || js.iter().any(|&j| j == 0 || j > 64) {
                return bad(format!("j values must lie in 1..=64, got {js:?}"));
            }
            if self.experiment == "tiled" && js.iter().any(|&j| j > 8) {
                return bad("tiled levels above 8 are not resolvable".into());
            }
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta < 1.0) {
                return bad(format!("eta = {eta} must lie in (0, 1)"));
            }
        }
        if let Some(h0) = self.h0 {
            if !(h0 > 0.0 && h0 < 1.0) {
                return bad(format!("h0 = {h0} must lie in (0, 1)"));
            }
        }
        if let Some(hs) = &self.h {
            let min = if self.experiment == "holder-lambda" { 0.0 } else { 1.0 };
            if hs.is_empty() || hs.iter().any(|&h| !(h.is_finite() && (h > min || (min == 0.0 && h == 0.0)))) {
                return bad(format!("heights must be finite and > {min}, got {hs:?}"));
            }
            let paired = self.experiment == "tiled" || self.experiment == "holder-lambda";
            if paired && self.j.as_ref().is_some_and(|js| js.len() != hs.len()) {
                return bad("h must list one height per j".into());
            }
        }
        for (key, v) in [("p", self.p), ("q", self.q)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 1.0) {
                    return bad(format!("{key} = {v} must be >= 1"));
                }
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return bad(format!("alpha = {a} must lie in (0, 1]"));
            }
        }
        for (key, v) in [("grid", self.grid), ("n_u", self.n_u), ("n_v", self.n_v), ("local_grid", self.local_grid)] {
            if let Some(n) = v {
                if !(8..=MAX_GRID).contains(&n) {
                    return bad(format!("{key} = {n} must lie in 8..={MAX_GRID}"));
                }
            }
        }
        if let Some(s) = self.stencil {
            if s != 8 && s != 16 {
                return bad(format!("stencil must be 8 or 16, got {s}"));
            }
        }
        for (key, v) in [("pairs", self.pairs), ("samples", self.samples), ("fields", self.fields)] {
            if let Some(n) = v {
                if !(1..=10_000).contains(&n) {
                    return bad(format!("{key} = {n} must lie in 1..=10000"));
                }
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t < 1.0) {
                return bad(format!("tolerance = {t} must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    pub fn stencil(&self) -> Stencil {
        match self.stencil {
            Some(8) => Stencil::Eight,
            _ => Stencil::Sixteen,
        }
    }
}
