//! Pipeline configuration (TOML). Angles are in degrees.

use std::collections::BTreeMap;

use num_complex::Complex;
use piqfc_core::measurement::{standard_plan, PlanName, SettingsPlan};
use piqfc_core::qfc::{Arm, QfcConfig};
use piqfc_core::source::{ScenarioMetadata, SourceConfig};
use piqfc_core::tomography::MleOptions;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Plan {
    Standard36,
    Minimal16,
}

impl Plan {
    pub fn settings(self) -> SettingsPlan<f64> {
        let name = match self {
            Plan::Standard36 => PlanName::Standard36,
            Plan::Minimal16 => PlanName::Minimal16,
        };
        standard_plan(name).expect("named plans are built in")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub schema_version: u32,
    pub seed: u64,
    #[serde(default = "default_plan")]
    pub plan: Plan,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    #[serde(default)]
    pub mle: MleSection,
    #[serde(default)]
    pub metadata: MetadataSection,
    pub scenario: BTreeMap<String, ScenarioSection>,
}

fn default_plan() -> Plan {
    Plan::Standard36
}

fn default_resamples() -> usize {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MleSection {
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub dilution: f64,
}

impl Default for MleSection {
    fn default() -> Self {
        let d = MleOptions::default();
        Self {
            max_iterations: d.max_iterations,
            convergence_tol: d.convergence_tol,
            dilution: d.dilution,
        }
    }
}

impl MleSection {
    pub fn options(&self) -> MleOptions {
        MleOptions {
            max_iterations: self.max_iterations,
            convergence_tol: self.convergence_tol,
            dilution: self.dilution,
        }
    }
}

/// Descriptive parameters of the experimental sequence, echoed into
/// reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetadataSection {
    pub detuning_mhz: f64,
    pub write_pulse_ns: f64,
    pub read_pulse_ns: f64,
    pub init_pulse_ns: f64,
    pub trials_per_cycle: u32,
    pub mot_load_ms: f64,
    pub repetition_hz: f64,
    pub coincidence_window_ns: f64,
}

impl Default for MetadataSection {
    fn default() -> Self {
        let m = ScenarioMetadata::default();
        Self {
            detuning_mhz: m.detuning_mhz,
            write_pulse_ns: m.write_pulse_ns,
            read_pulse_ns: m.read_pulse_ns,
            init_pulse_ns: m.init_pulse_ns,
            trials_per_cycle: m.trials_per_cycle,
            mot_load_ms: m.mot_load_ms,
            repetition_hz: m.repetition_hz,
            coincidence_window_ns: m.coincidence_window_ns,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    /// Mean detected pairs per setting at unit acquisition weight.
    pub mean_pairs_per_setting: f64,
    /// Uniform accidental coincidences per setting.
    #[serde(default)]
    pub background_per_setting: f64,
    pub source: SourceSection,
    /// Absent for the arm without conversion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qfc: Option<QfcSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
    pub beta_re: f64,
    #[serde(default)]
    pub beta_im: f64,
    #[serde(default)]
    pub dephasing: f64,
    #[serde(default)]
    pub white_noise: f64,
    #[serde(default)]
    pub read_phase_deg: f64,
    #[serde(default = "half")]
    pub readout_balance: f64,
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmSpec {
    Stokes,
    AntiStokes,
}

impl From<ArmSpec> for Arm {
    fn from(a: ArmSpec) -> Self {
        match a {
            ArmSpec::Stokes => Arm::Stokes,
            ArmSpec::AntiStokes => Arm::AntiStokes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfcSection {
    pub theta_h_deg: f64,
    pub theta_v_deg: f64,
    #[serde(default)]
    pub phi_h_deg: f64,
    #[serde(default)]
    pub phi_v_deg: f64,
    #[serde(default = "one")]
    pub transmission: f64,
    /// Photon sent through the converter.
    #[serde(default = "anti_stokes")]
    pub arm: ArmSpec,
}

fn one() -> f64 {
    1.0
}

fn anti_stokes() -> ArmSpec {
    ArmSpec::AntiStokes
}

/// Validated scenario in library types (radians).
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub source: SourceConfig<f64>,
    pub readout_balance: f64,
    pub qfc: Option<(QfcConfig<f64>, Arm)>,
    pub mean_pairs_per_setting: f64,
    pub background_per_setting: f64,
}

impl PipelineConfig {
    /// Parses and validates. Syntax errors carry line and column.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(CliError::Input(format!(
                "config: schema_version {} is not supported (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.seed > i64::MAX as u64 {
            return Err(CliError::Input("config: seed must be < 2^63".into()));
        }
        if self.bootstrap_resamples < 10 {
            return Err(CliError::Input(format!(
                "config: bootstrap_resamples must be >= 10, got {}",
                self.bootstrap_resamples
            )));
        }
        self.mle
            .options()
            .validate()
            .map_err(|e| CliError::Input(format!("config: mle: {e}")))?;
        if self.scenario.is_empty() {
            return Err(CliError::Input(
                "config: at least one [scenario.<name>] table is required".into(),
            ));
        }
        for name in self.scenario.keys() {
            self.scenario(name)?;
        }
        Ok(())
    }

    /// The named scenario, or the only one when `name` is `None`.
    pub fn select(&self, name: Option<&str>) -> Result<Scenario, CliError> {
        match name {
            Some(n) => self.scenario(n),
            None if self.scenario.len() == 1 => self.scenario(self.scenario.keys().next().expect("one entry")),
            None => Err(CliError::Input(format!(
                "config defines {} scenarios ({}); pass --scenario",
                self.scenario.len(),
                self.scenario.keys().cloned().collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    pub fn scenario(&self, name: &str) -> Result<Scenario, CliError> {
        let s = self
            .scenario
            .get(name)
            .ok_or_else(|| CliError::Input(format!("config: no scenario named {name:?}")))?;
        let ctx = |part: &str, e: piqfc_core::Error| CliError::Input(format!("config: scenario.{name}{part}: {e}"));
        let src = &s.source;
        let source = SourceConfig::new(
            Complex::new(src.alpha_re, src.alpha_im),
            Complex::new(src.beta_re, src.beta_im),
            src.dephasing,
            src.white_noise,
            src.read_phase_deg.to_radians(),
        )
        .map_err(|e| ctx(".source", e))?;
        if !(0.0..=1.0).contains(&src.readout_balance) {
            return Err(CliError::Input(format!(
                "config: scenario.{name}.source: readout_balance must be in [0, 1], got {}",
                src.readout_balance
            )));
        }
        if !(s.mean_pairs_per_setting > 0.0 && s.mean_pairs_per_setting.is_finite()) {
            return Err(CliError::Input(format!(
                "config: scenario.{name}: mean_pairs_per_setting must be finite and > 0"
            )));
        }
        if !(s.background_per_setting >= 0.0 && s.background_per_setting.is_finite()) {
            return Err(CliError::Input(format!(
                "config: scenario.{name}: background_per_setting must be finite and >= 0"
            )));
        }
        let qfc = match &s.qfc {
            None => None,
            Some(q) => {
                let cfg = QfcConfig::new(
                    q.theta_h_deg.to_radians(),
                    q.theta_v_deg.to_radians(),
                    q.phi_h_deg.to_radians(),
                    q.phi_v_deg.to_radians(),
                )
                .and_then(|c| c.with_transmission(q.transmission))
                .map_err(|e| ctx(".qfc", e))?;
                Some((cfg, q.arm.into()))
            }
        };
        Ok(Scenario {
            name: name.to_string(),
            source,
            readout_balance: src.readout_balance,
            qfc,
            mean_pairs_per_setting: s.mean_pairs_per_setting,
            background_per_setting: s.background_per_setting,
        })
    }
}
