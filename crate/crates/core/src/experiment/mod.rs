//! Monte-Carlo coincidence counting and the analysis that turns counts into
//! visibilities and a CHSH parameter.
//!
//! Each analyzer setting draws from its own ChaCha20 stream keyed by
//! `(seed, setting index)`, so serial and parallel runs produce identical
//! counts.

mod bell;
mod fit;
mod report;
mod scenario;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::PairState;
use crate::measurement::{coincidence_probability, AnalyzerSetting, Paths};

pub use bell::{exact_chsh, measure_chsh, ChshMeasurement, CorrelationMeasurement};
pub use fit::{fit_fringe, fit_fringe_values, FitResult};
pub use report::{
    run_chsh, run_classical, run_experiment, run_state, run_sweep, BudgetInversion,
    ChshReport, ClassicalReport, ModelPrediction, OptimizedChsh, Report, StateReport, SweepCurve,
    SweepPoint, SweepReport,
};
pub use scenario::{MeasurementKind, MeasurementPlan, OutputPaths, Scenario};

/// Name of the generator recorded in every report.
pub const RNG_ALGORITHM: &str =
    "ChaCha20 (rand_chacha 0.9): seed_from_u64(seed), set_stream(setting index); Poisson via rand_distr 0.5";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Coincidence rate with both analyzers removed, pairs/s.
    #[serde(default = "default_pair_rate")]
    pub pair_rate: f64,
    #[serde(default = "default_singles")]
    pub singles_rate_1: f64,
    #[serde(default = "default_singles")]
    pub singles_rate_2: f64,
    /// Coincidence window, seconds.
    #[serde(rename = "window_s", default = "default_window")]
    pub window: f64,
    /// Integration time per analyzer setting, seconds.
    #[serde(rename = "dwell_s", default = "default_dwell")]
    pub dwell: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub include_accidentals: bool,
}

fn default_pair_rate() -> f64 {
    2000.0
}
fn default_singles() -> f64 {
    1.0e5
}
fn default_window() -> f64 {
    1.0e-9
}
fn default_dwell() -> f64 {
    1.0
}
fn default_seed() -> u64 {
    0x5EED_5A4B
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            pair_rate: default_pair_rate(),
            singles_rate_1: default_singles(),
            singles_rate_2: default_singles(),
            window: default_window(),
            dwell: default_dwell(),
            seed: default_seed(),
            include_accidentals: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("pair_rate", self.pair_rate),
            ("singles_rate_1", self.singles_rate_1),
            ("singles_rate_2", self.singles_rate_2),
            ("window_s", self.window),
            ("dwell_s", self.dwell),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {v} must be finite and non-negative"
                )));
            }
        }
        if self.include_accidentals && self.window <= 0.0 {
            return Err(Error::InvalidConfig(
                "window_s must be positive when accidentals are enabled".into(),
            ));
        }
        Ok(())
    }

    /// Mean coincidence count for a setting whose coincidence probability is `prob`.
    pub fn expected_counts(&self, prob: f64) -> f64 {
        let acc = if self.include_accidentals {
            accidental_rate(self)
        } else {
            0.0
        };
        self.dwell * (self.pair_rate * prob.max(0.0) + acc)
    }
}

/// `R1 · R2 · τ`, counts/s.
pub fn accidental_rate(cfg: &ExperimentConfig) -> f64 {
    cfg.singles_rate_1 * cfg.singles_rate_2 * cfg.window
}

/// Counts recorded at one analyzer setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountsRecord {
    pub setting: AnalyzerSetting,
    pub counts: u64,
    pub dwell: f64,
}

pub fn setting_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One Poisson draw with the given mean; zero mean gives zero counts.
pub fn poisson_draw(mean: f64, rng: &mut ChaCha20Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    d.sample(rng) as u64
}

/// Samples the coincidence counts of `setting` from stream `stream`.
pub fn simulate_counts(
    state: &PairState,
    setting: AnalyzerSetting,
    cfg: &ExperimentConfig,
    stream: u64,
) -> Result<CountsRecord> {
    cfg.validate()?;
    let prob = coincidence_probability(state, setting, Paths::default());
    let mut rng = setting_rng(cfg.seed, stream);
    Ok(CountsRecord {
        setting,
        counts: poisson_draw(cfg.expected_counts(prob), &mut rng),
        dwell: cfg.dwell,
    })
}
