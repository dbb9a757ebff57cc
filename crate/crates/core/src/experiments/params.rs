use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geodesic::Stencil;

use super::config::ExperimentConfig;

/// A config with every default filled in for its experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub j: Vec<u32>,
    pub eta: f64,
    pub h0: f64,
    /// Block heights; for tiled and holder-lambda, one per `j`.
    pub h: Vec<f64>,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub grid: usize,
    pub n_u: Option<usize>,
    pub n_v: Option<usize>,
    pub local_grid: usize,
    pub stencil: Stencil,
    pub pairs: usize,
    pub samples: usize,
    pub fields: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Params {
    pub fn resolve(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let name = cfg.experiment.as_str();
        let default_j: Vec<u32> = match name {
            "nonuniform" => vec![2, 4],
            "power-holder" => (1..=8).collect(),
            "cusp" | "cone" => vec![2, 4, 8],
            "cinch" => vec![32],
            "tiled" => vec![2, 3],
            "holder-lambda" => (2..=6).collect(),
            _ => vec![],
        };
        let j = cfg.j.clone().unwrap_or(default_j);
        let h = match (name, &cfg.h) {
            ("tiled" | "holder-lambda", Some(h)) if h.len() != j.len() => {
                return Err(LabError::InvalidConfig("h must list one height per j".into()))
            }
            (_, Some(h)) => h.clone(),
            ("tiled" | "holder-lambda", None) => j.iter().map(|&j| j as f64).collect(),
            _ => vec![2.0, 5.0],
        };
        if name == "tiled" && h.iter().any(|&h| h <= 1.0) {
            return Err(LabError::InvalidConfig("tiled heights must exceed 1".into()));
        }
        let grid = cfg.grid.unwrap_or(match name {
            "trace" | "trace-counterexample" => 64,
            _ => 256,
        });
        Ok(Self {
            j,
            eta: cfg.eta.unwrap_or(0.5),
            h0: cfg.h0.unwrap_or(0.5),
            h,
            p: cfg.p.unwrap_or(match name {
                "trace" | "trace-counterexample" => 1.0,
                _ => 2.0,
            }),
            q: cfg.q.unwrap_or(2.0),
            alpha: cfg.alpha.unwrap_or(0.5),
            grid,
            n_u: cfg.n_u,
            n_v: cfg.n_v,
            local_grid: cfg.local_grid.unwrap_or(512),
            stencil: cfg.stencil(),
            pairs: cfg.pairs.unwrap_or(match name {
                "flat-check" => 50,
                "blocks" => 20,
                "trace" => 100,
                _ => 200,
            }),
            samples: cfg.samples.unwrap_or(match name {
                "power-holder" => 64,
                _ => 24,
            }),
            fields: cfg.fields.unwrap_or(20),
            seed: cfg.seed.unwrap_or(20240601),
            tolerance: cfg.tolerance.unwrap_or(0.03),
        })
    }
}
