//! Subcommand implementations. Each returns the exact text it writes so
//! callers and tests can compare outputs byte for byte.

use std::fs;
use std::path::Path;

use piqfc_core::measurement::{format_records, parse_records, simulate_counts_with, CountRecord, SimulationOptions};
use piqfc_core::metrics::MetricsReport;
use piqfc_core::qfc::{apply_qfc_postselected, fit_efficiency, parse_calibration};
use piqfc_core::quantum::TwoQubitState;
use piqfc_core::random::derive_seed;
use piqfc_core::source::{atom_photon_state, read_out};
use piqfc_core::tomography::{bootstrap_metrics, mle_reconstruct, Metric};

use crate::config::{PipelineConfig, Scenario};
use crate::error::CliError;
use crate::report::{
    to_json, AnalysisReport, FitReport, MetricsSection, PairedArms, ReconstructionSection, ScenarioReport, TargetPower,
    UncertaintySection, REPORT_SCHEMA_VERSION, TOOL_VERSION,
};

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_config(path: &Path, seed: Option<u64>, resamples: Option<usize>) -> Result<PipelineConfig, CliError> {
    let mut cfg = PipelineConfig::from_toml_str(&read_file(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(r) = resamples {
        cfg.bootstrap_resamples = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed of a named scenario within a run: `derive_seed(seed, fnv1a(name))`.
/// Stream 0 drives the count simulation, stream 1 the bootstrap.
pub fn scenario_seed(seed: u64, name: &str) -> u64 {
    derive_seed(seed, fnv1a(name))
}

/// The configured state reaching the analyzers, with the conversion
/// stage's success probability when present.
pub fn model_state(s: &Scenario) -> Result<(TwoQubitState<f64>, Option<f64>), CliError> {
    let ctx = format!("scenario {}", s.name);
    let joint = atom_photon_state(&s.source).map_err(|e| CliError::core(&ctx, e))?;
    let pair = read_out(&joint, s.readout_balance).map_err(|e| CliError::core(&ctx, e))?;
    match &s.qfc {
        None => Ok((pair, None)),
        Some((cfg, arm)) => {
            let (out, p) = apply_qfc_postselected(&pair, cfg, *arm).map_err(|e| CliError::core(&ctx, e))?;
            Ok((out, Some(p)))
        }
    }
}

pub struct Simulated {
    pub scenario: Scenario,
    pub state: TwoQubitState<f64>,
    pub success_prob: Option<f64>,
    pub records: Vec<CountRecord<f64>>,
}

pub fn simulate(cfg: &PipelineConfig, name: Option<&str>) -> Result<Simulated, CliError> {
    let scenario = cfg.select(name)?;
    let (state, success_prob) = model_state(&scenario)?;
    let seed = derive_seed(scenario_seed(cfg.seed, &scenario.name), 0);
    let records = simulate_counts_with(
        &state,
        &cfg.plan.settings(),
        scenario.mean_pairs_per_setting,
        seed,
        SimulationOptions {
            background_per_setting: scenario.background_per_setting,
        },
    )
    .map_err(|e| CliError::core(&format!("scenario {}", scenario.name), e))?;
    Ok(Simulated {
        scenario,
        state,
        success_prob,
        records,
    })
}

/// One-line summary printed by `simulate`.
pub fn simulate_summary(sim: &Simulated) -> String {
    let total: u64 = sim.records.iter().map(|r| r.count).sum();
    let mut s = format!(
        "scenario {}: {} settings, total counts {}",
        sim.scenario.name,
        sim.records.len(),
        total
    );
    if let Some(p) = sim.success_prob {
        s.push_str(&format!(", conversion success probability {p:.6}"));
    }
    s
}

/// Reconstruction, metrics and bootstrap for one scenario's records.
pub fn analyze_scenario(
    cfg: &PipelineConfig,
    scenario: &Scenario,
    records: &[CountRecord<f64>],
) -> Result<ScenarioReport, CliError> {
    let ctx = format!("scenario {}", scenario.name);
    let (state, success_prob) = model_state(scenario)?;
    let opts = cfg.mle.options();
    let rec = mle_reconstruct(records, &opts).map_err(|e| CliError::core(&ctx, e))?;
    let metrics = MetricsReport::of(&rec.rho);
    let seed = scenario_seed(cfg.seed, &scenario.name);
    let boot = bootstrap_metrics(
        records,
        &opts,
        cfg.bootstrap_resamples,
        derive_seed(seed, 1),
        &Metric::ALL,
    )
    .map_err(|e| CliError::core(&ctx, e))?;
    if boot.failures == boot.resamples {
        return Err(CliError::Compute(format!("{ctx}: every bootstrap resample failed")));
    }

    let mut flags = Vec::new();
    if !rec.converged {
        flags.push("non_convergence".to_string());
    }
    if scenario.qfc.is_some() {
        flags.push("equal_acquisition_weights_assumed".to_string());
    }
    if boot.failures > 0 {
        flags.push(format!("bootstrap_failures:{}", boot.failures));
    }
    Ok(ScenarioReport {
        name: scenario.name.clone(),
        arm: if scenario.qfc.is_some() { "with_qfc" } else { "no_qfc" }.to_string(),
        seed,
        settings: records.len(),
        total_counts: records.iter().map(|r| r.count).sum(),
        success_prob,
        reconstruction: ReconstructionSection::from(&rec),
        metrics: MetricsSection::from(&metrics),
        uncertainties: UncertaintySection::from(&boot),
        model: MetricsSection::from(&MetricsReport::of(&state)),
        flags,
    })
}

fn paired(scenarios: &[ScenarioReport]) -> Option<PairedArms> {
    let without: Vec<_> = scenarios.iter().filter(|s| s.arm == "no_qfc").collect();
    let with: Vec<_> = scenarios.iter().filter(|s| s.arm == "with_qfc").collect();
    match (without.as_slice(), with.as_slice()) {
        ([a], [b]) => Some(PairedArms {
            without_qfc: a.name.clone(),
            with_qfc: b.name.clone(),
        }),
        _ => None,
    }
}

fn report(cfg: &PipelineConfig, command: &str, scenarios: Vec<ScenarioReport>) -> AnalysisReport {
    AnalysisReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        command: command.to_string(),
        seed: cfg.seed,
        config: cfg.clone(),
        paired: paired(&scenarios),
        scenarios,
    }
}

/// `simulate`: the record file text and a summary line.
pub fn cmd_simulate(cfg: &PipelineConfig, scenario: Option<&str>) -> Result<(String, String), CliError> {
    let sim = simulate(cfg, scenario)?;
    Ok((format_records(&sim.records), simulate_summary(&sim)))
}

/// `analyze`: JSON report for records of one configured scenario.
pub fn cmd_analyze(cfg: &PipelineConfig, scenario: Option<&str>, records_text: &str) -> Result<String, CliError> {
    let scenario = cfg.select(scenario)?;
    let records = parse_records::<f64>(records_text).map_err(|e| CliError::Input(format!("records: {e}")))?;
    let r = analyze_scenario(cfg, &scenario, &records)?;
    Ok(to_json(&report(cfg, "analyze", vec![r])))
}

/// `pipeline`: simulate and analyze every scenario, in name order.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<AnalysisReport, CliError> {
    let mut out = Vec::new();
    for name in cfg.scenario.keys() {
        let sim = simulate(cfg, Some(name))?;
        out.push(analyze_scenario(cfg, &sim.scenario, &sim.records)?);
    }
    Ok(report(cfg, "pipeline", out))
}

pub fn cmd_pipeline(cfg: &PipelineConfig) -> Result<String, CliError> {
    run_pipeline(cfg).map(|r| to_json(&r))
}

pub fn run_fit(data_text: &str, target: Option<f64>) -> Result<FitReport, CliError> {
    let data = parse_calibration(data_text).map_err(|e| CliError::Input(format!("calibration data: {e}")))?;
    let fit = fit_efficiency(&data).map_err(|e| CliError::core("fit", e))?;
    let target = target
        .map(|t| {
            fit.model
                .power_for_efficiency(t)
                .map(|p| TargetPower {
                    efficiency: t,
                    power_w: p,
                })
                .map_err(|e| CliError::core("target", e))
        })
        .transpose()?;
    Ok(FitReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        command: "fit-efficiency".to_string(),
        points: data.len(),
        eta_max: fit.model.eta_max,
        g_per_w: fit.model.g,
        residual_sse: fit.residual,
        iterations: fit.iterations,
        peak_power_w: fit.model.peak_power(),
        target,
    })
}

pub fn cmd_fit_efficiency(data_text: &str, target: Option<f64>) -> Result<String, CliError> {
    run_fit(data_text, target).map(|r| to_json(&r))
}
