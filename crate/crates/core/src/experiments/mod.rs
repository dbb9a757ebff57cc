//! Named experiments: each binds models, grids and analysis operations to
//! one construction and emits a report of computed values against closed
//! forms and bounds.

mod config;
mod params;
mod reference;
mod report;
mod runners;

pub use config::{describe, ExperimentConfig, EXPERIMENTS, MAX_GRID};
pub use params::Params;
pub use reference::{
    bump_limit_distance, bump_path_length, bump_volume, holder_lambda_search, majorant, reference_values,
    tiled_delta, LambdaSearch, Reference, LAMBDA_GRID,
};
pub use report::{ExperimentReport, ReportRow};

use crate::error::{LabError, Result};

/// Runs the named experiment, writing `report.csv` and `report.json` to
/// `config.out` when set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let prm = Params::resolve(config)?;
    let mut rep = ExperimentReport::new(config.clone());
    match config.experiment.as_str() {
        "flat-check" => runners::flat_check(&prm, &mut rep)?,
        "nonuniform" => runners::nonuniform(&prm, &mut rep)?,
        "power-holder" => runners::power_holder(&prm, &mut rep)?,
        "cusp" => runners::sphere_tip(&prm, &mut rep, runners::Tip::Cusp)?,
        "cone" => runners::sphere_tip(&prm, &mut rep, runners::Tip::Cone)?,
        "cinch" => runners::cinch(&prm, &mut rep)?,
        "blocks" => runners::blocks(&prm, &mut rep)?,
        "tiled" => runners::tiled(&prm, &mut rep)?,
        "holder-lambda" => runners::holder_lambda(&prm, &mut rep)?,
        "trace" => runners::trace(&prm, &mut rep)?,
        "trace-counterexample" => runners::trace_counterexample(&prm, &mut rep)?,
        other => return Err(LabError::UnknownExperiment(other.into())),
    }
    if let Some(dir) = &config.out {
        rep.write(dir)?;
    }
    Ok(rep)
}
