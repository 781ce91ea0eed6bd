//! Scenario files: everything needed to run one simulated measurement.
//!
//! Angles are in degrees. Every section is optional and falls back to the
//! ideal, noise-free defaults.

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::gates::CircuitVariant;
use crate::measurement::ChshSettings;
use crate::noise::GateNoise;
use crate::source::SourceParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementKind {
    #[default]
    Sweep,
    Chsh,
    ClassicalVisibility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementPlan {
    #[serde(default)]
    pub kind: MeasurementKind,
    #[serde(default = "default_theta1")]
    pub theta1_deg: Vec<f64>,
    #[serde(default)]
    pub theta2_start_deg: f64,
    #[serde(default = "default_theta2_stop")]
    pub theta2_stop_deg: f64,
    #[serde(default = "default_theta2_step")]
    pub theta2_step_deg: f64,
    /// `[a, a′, b, b′]`.
    #[serde(default = "default_chsh")]
    pub chsh_settings_deg: [f64; 4],
    #[serde(default = "yes")]
    pub optimize_chsh: bool,
}

fn default_theta1() -> Vec<f64> {
    vec![0.0, 45.0]
}
fn default_theta2_stop() -> f64 {
    180.0
}
fn default_theta2_step() -> f64 {
    10.0
}
fn default_chsh() -> [f64; 4] {
    [0.0, 45.0, 22.5, 67.5]
}
fn yes() -> bool {
    true
}

impl Default for MeasurementPlan {
    fn default() -> Self {
        Self {
            kind: MeasurementKind::default(),
            theta1_deg: default_theta1(),
            theta2_start_deg: 0.0,
            theta2_stop_deg: default_theta2_stop(),
            theta2_step_deg: default_theta2_step(),
            chsh_settings_deg: default_chsh(),
            optimize_chsh: true,
        }
    }
}

impl MeasurementPlan {
    /// θ2 grid in degrees, stop inclusive.
    pub fn theta2_grid_deg(&self) -> Vec<f64> {
        let n = ((self.theta2_stop_deg - self.theta2_start_deg) / self.theta2_step_deg + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| self.theta2_start_deg + k as f64 * self.theta2_step_deg)
            .collect()
    }

    pub fn chsh_settings(&self) -> ChshSettings {
        let [a, ap, b, bp] = self.chsh_settings_deg;
        ChshSettings::from_degrees(a, ap, b, bp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default = "default_dir")]
    pub dir: String,
}

fn default_dir() -> String {
    "sptq-out".into()
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self { dir: default_dir() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub source: SourceParams,
    #[serde(default)]
    pub gate: GateNoise,
    #[serde(default)]
    pub circuit_variant: CircuitVariant,
    #[serde(default)]
    pub measurement: MeasurementPlan,
    #[serde(default)]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub output: OutputPaths,
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn unit(path: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(schema(path, format!("{v} is outside [0, 1]")));
    }
    Ok(())
}

fn non_negative(path: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(schema(path, format!("{v} must be finite and non-negative")));
    }
    Ok(())
}

fn finite(path: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(schema(path, format!("{v} must be finite")));
    }
    Ok(())
}

impl Scenario {
    /// Parses and validates a JSON scenario; errors carry the field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            schema(&path, e.into_inner().to_string())
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        unit("source.source_coherence", self.source.momentum_coherence)?;
        unit("source.source_white_noise", self.source.white_noise)?;
        unit("gate.gate_bs_coherence", self.gate.bs_coherence)?;
        unit("gate.gate_dove_coherence", self.gate.dove_coherence)?;

        let m = &self.measurement;
        if m.theta1_deg.is_empty() {
            return Err(schema("measurement.theta1_deg", "at least one angle required"));
        }
        for (k, &t) in m.theta1_deg.iter().enumerate() {
            finite(&format!("measurement.theta1_deg[{k}]"), t)?;
        }
        finite("measurement.theta2_start_deg", m.theta2_start_deg)?;
        finite("measurement.theta2_stop_deg", m.theta2_stop_deg)?;
        if !(m.theta2_step_deg.is_finite() && m.theta2_step_deg > 0.0) {
            return Err(schema("measurement.theta2_step_deg", "must be positive"));
        }
        if m.theta2_stop_deg < m.theta2_start_deg {
            return Err(schema("measurement.theta2_stop_deg", "must not be below theta2_start_deg"));
        }
        if m.theta2_grid_deg().len() > 100_000 {
            return Err(schema("measurement.theta2_step_deg", "grid has more than 100000 points"));
        }
        for (k, &t) in m.chsh_settings_deg.iter().enumerate() {
            finite(&format!("measurement.chsh_settings_deg[{k}]"), t)?;
        }

        let x = &self.experiment;
        non_negative("experiment.pair_rate", x.pair_rate)?;
        non_negative("experiment.singles_rate_1", x.singles_rate_1)?;
        non_negative("experiment.singles_rate_2", x.singles_rate_2)?;
        non_negative("experiment.window_s", x.window)?;
        non_negative("experiment.dwell_s", x.dwell)?;
        if x.include_accidentals && x.window <= 0.0 {
            return Err(schema("experiment.window_s", "must be positive when include_accidentals is set"));
        }
        if self.output.dir.is_empty() {
            return Err(schema("output.dir", "must not be empty"));
        }
        Ok(())
    }

    /// Source coherence 0.95 with a 93% lumped gate coherence, the working
    /// point of the visibility budget.
    pub fn reference_working_point() -> Self {
        Self {
            source: SourceParams::new(0.95, 1.0).expect("in range"),
            gate: GateNoise::lumped(0.93).expect("in range"),
            ..Default::default()
        }
    }
}
