//! JSON report documents written by `analyze`, `pipeline` and
//! `fit-efficiency`. Reading a report rejects unknown fields.

use piqfc_core::metrics::MetricsReport;
use piqfc_core::tomography::{BootstrapSummary, Metric, MetricStat, ReconstructionResult};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::CliError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const UNCERTAINTY_METHOD: &str = "bootstrap-1σ";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    /// Effective configuration, overrides applied.
    pub config: PipelineConfig,
    pub scenarios: Vec<ScenarioReport>,
    /// Present when the run held one arm without and one with conversion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paired: Option<PairedArms>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairedArms {
    pub without_qfc: String,
    pub with_qfc: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioReport {
    pub name: String,
    /// `"no_qfc"` or `"with_qfc"`.
    pub arm: String,
    pub seed: u64,
    pub settings: usize,
    pub total_counts: u64,
    /// Postselection probability of the conversion stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_prob: Option<f64>,
    pub reconstruction: ReconstructionSection,
    pub metrics: MetricsSection,
    pub uncertainties: UncertaintySection,
    /// Metrics of the configured (true) state.
    pub model: MetricsSection,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructionSection {
    /// Row-major `[re, im]` entries over `(HH, HV, VH, VV)`.
    pub rho: Vec<Vec<[f64; 2]>>,
    pub log_likelihood: f64,
    pub iterations_used: usize,
    pub converged: bool,
}

impl From<&ReconstructionResult<f64>> for ReconstructionSection {
    fn from(r: &ReconstructionResult<f64>) -> Self {
        Self {
            rho: r.rho.rho().to_pairs(),
            log_likelihood: r.log_likelihood,
            iterations_used: r.iterations_used,
            converged: r.converged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSection {
    pub concurrence: f64,
    pub eof: f64,
    pub purity: f64,
    pub max_fidelity: f64,
    pub theta_star_deg: f64,
}

impl From<&MetricsReport<f64>> for MetricsSection {
    fn from(m: &MetricsReport<f64>) -> Self {
        Self {
            concurrence: m.concurrence,
            eof: m.eof,
            purity: m.purity,
            max_fidelity: m.max_fidelity,
            theta_star_deg: m.theta_star_deg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl From<MetricStat> for Stat {
    fn from(s: MetricStat) -> Self {
        Self {
            mean: s.mean,
            std: s.std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintySection {
    pub method: String,
    pub resamples: usize,
    pub failures: usize,
    pub failure_fraction: f64,
    pub concurrence: Stat,
    pub eof: Stat,
    pub purity: Stat,
    pub max_fidelity: Stat,
    pub theta_star_deg: Stat,
}

impl From<&BootstrapSummary> for UncertaintySection {
    fn from(b: &BootstrapSummary) -> Self {
        let get = |m: Metric| Stat::from(b.stats[&m]);
        Self {
            method: UNCERTAINTY_METHOD.to_string(),
            resamples: b.resamples,
            failures: b.failures,
            failure_fraction: b.failure_fraction(),
            concurrence: get(Metric::Concurrence),
            eof: get(Metric::Eof),
            purity: get(Metric::Purity),
            max_fidelity: get(Metric::MaxFidelity),
            theta_star_deg: get(Metric::ThetaStar),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub points: usize,
    pub eta_max: f64,
    pub g_per_w: f64,
    pub residual_sse: f64,
    pub iterations: usize,
    pub peak_power_w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetPower>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetPower {
    pub efficiency: f64,
    /// Smallest pump power reaching `efficiency`.
    pub power_w: f64,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn read_analysis_report(text: &str) -> Result<AnalysisReport, CliError> {
    let r: AnalysisReport = serde_json::from_str(text).map_err(|e| CliError::Input(format!("report: {e}")))?;
    if r.schema_version != REPORT_SCHEMA_VERSION {
        return Err(CliError::Input(format!(
            "report: schema_version {} is not supported (expected {REPORT_SCHEMA_VERSION})",
            r.schema_version
        )));
    }
    Ok(r)
}

pub fn read_fit_report(text: &str) -> Result<FitReport, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("report: {e}")))
}
