//! JSON reports. The layout is described in docs/report-schema.md; bump
//! [`SCHEMA`] on any incompatible change.

use cat_tomo::experiment::{MinimumReport, NoiseSpec};
use cat_tomo::wigner::Convention;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const SCHEMA: &str = "cat-tomo.report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableSource {
    Simulated,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructReport {
    pub schema: String,
    pub command: String,
    pub experiment: String,
    pub convention: Convention,
    pub source: TableSource,
    pub config: ExperimentConfig,
    /// Vacuum-calibrated back-projection constant.
    pub calibration_constant: f64,
    pub oracle: MinimumReport,
    pub reconstructed: MinimumReport,
    /// |reconstructed / oracle − 1| of the minimum values.
    pub relative_error: f64,
    #[serde(default)]
    pub local: Vec<LocalComparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalComparison {
    pub point: [f64; 2],
    pub radius: f64,
    pub oracle: MinimumReport,
    pub reconstructed: MinimumReport,
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseStudyReport {
    pub schema: String,
    pub command: String,
    pub experiment: String,
    pub convention: Convention,
    pub config: ExperimentConfig,
    pub probe: [f64; 2],
    /// Exact W at the probe.
    pub oracle_value: f64,
    /// Reconstruction of the noise-free table at the probe.
    pub clean_value: f64,
    pub noise: NoiseSpec,
    /// `value` and `mean` are the run average, `stddev` the run scatter.
    pub minimum: MinimumReport,
    pub samples: Vec<f64>,
}

pub fn relative_error(value: f64, reference: f64) -> f64 {
    (value / reference - 1.0).abs()
}
