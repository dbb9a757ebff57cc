use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

use super::config::ExperimentConfig;

/// One line of a report. `reference` holds the target value for checks and
/// the bound for bound rows; rows without a reference never pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub case: String,
    pub quantity: String,
    pub computed: f64,
    pub reference: Option<f64>,
    pub rel_err: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
}

fn rel(excess: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        excess
    } else {
        excess / scale.abs()
    }
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig) -> Self {
        Self { config, rows: Vec::new() }
    }

    fn push(&mut self, case: &str, quantity: &str, computed: f64, reference: Option<f64>, rel_err: Option<f64>, pass: bool) {
        self.rows.push(ReportRow {
            experiment: self.config.experiment.clone(),
            case: case.to_string(),
            quantity: quantity.to_string(),
            computed,
            reference,
            rel_err,
            pass,
        });
    }

    /// Passes iff `|computed - reference| / |reference| ≤ tol`.
    pub fn check(&mut self, case: &str, quantity: &str, computed: f64, reference: f64, tol: f64) {
        let e = rel((computed - reference).abs(), reference);
        self.push(case, quantity, computed, Some(reference), Some(e), e <= tol);
    }

    /// Passes iff `computed ≤ bound`; `rel_err` is the relative excess.
    pub fn upper(&mut self, case: &str, quantity: &str, computed: f64, bound: f64) {
        let e = rel((computed - bound).max(0.0), bound);
        self.push(case, quantity, computed, Some(bound), Some(e), computed <= bound);
    }

    /// Passes iff `computed ≥ bound`.
    pub fn lower(&mut self, case: &str, quantity: &str, computed: f64, bound: f64) {
        let e = rel((bound - computed).max(0.0), bound);
        self.push(case, quantity, computed, Some(bound), Some(e), computed >= bound);
    }

    /// A yes/no property, recorded as `1`/`0` against a reference of `1`.
    pub fn flag(&mut self, case: &str, quantity: &str, holds: bool) {
        let x = if holds { 1.0 } else { 0.0 };
        self.push(case, quantity, x, Some(1.0), Some(1.0 - x), holds);
    }

    /// A measured value with nothing to compare against.
    pub fn info(&mut self, case: &str, quantity: &str, computed: f64) {
        self.push(case, quantity, computed, None, None, false);
    }

    pub fn row(&self, case: &str, quantity: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.case == case && r.quantity == quantity)
    }

    /// Rows that carry a reference: these are the pass/fail checks.
    pub fn checks(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.reference.is_some())
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| LabError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| LabError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| LabError::Io(e.to_string()))
    }

    /// Writes `report.csv` and `report.json` into `dir`, creating it.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.csv"), self.to_csv()?)?;
        let mut json = self.to_json()?;
        json.push('\n');
        fs::write(dir.join("report.json"), json)?;
        Ok(())
    }
}
