//! CHSH measurement from simulated coincidence counts.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{poisson_draw, setting_rng, ExperimentConfig};
use crate::error::{Error, Result};
use crate::hilbert::PairState;
use crate::measurement::{coincidence_probability, AnalyzerSetting, ChshSettings, Paths};

/// One correlation term of S.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationMeasurement {
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    /// Mean counts for (θ1, θ2), (θ1⊥, θ2⊥), (θ1⊥, θ2), (θ1, θ2⊥).
    pub expected: [f64; 4],
    /// Sampled counts in the same order; absent in exact mode.
    pub counts: Option<[u64; 4]>,
    pub e: f64,
    pub sigma_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshMeasurement {
    pub settings_deg: [f64; 4],
    pub correlations: Vec<CorrelationMeasurement>,
    pub s: f64,
    pub sigma_s: f64,
    pub total_counts: f64,
}

impl ChshMeasurement {
    /// `(|S| − 2)/σ_S`; `None` when σ_S vanishes.
    pub fn violation_sigmas(&self) -> Option<f64> {
        (self.sigma_s > 0.0).then(|| (self.s.abs() - 2.0) / self.sigma_s)
    }
}

fn orientations(theta1: f64, theta2: f64) -> [AnalyzerSetting; 4] {
    [
        AnalyzerSetting::new(theta1, theta2),
        AnalyzerSetting::new(theta1 + FRAC_PI_2, theta2 + FRAC_PI_2),
        AnalyzerSetting::new(theta1 + FRAC_PI_2, theta2),
        AnalyzerSetting::new(theta1, theta2 + FRAC_PI_2),
    ]
}

/// `E = (N++ + N−− − N−+ − N+−)/N` with Poisson error `√((1 − E²)/N)`.
fn correlation_from(n: [f64; 4], theta1: f64, theta2: f64) -> Result<(f64, f64)> {
    let total: f64 = n.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateCorrelation { theta1, theta2 });
    }
    let e = (n[0] + n[1] - n[2] - n[3]) / total;
    Ok((e, ((1.0 - e * e).max(0.0) / total).sqrt()))
}

fn run(
    state: &PairState,
    s: &ChshSettings,
    cfg: &ExperimentConfig,
    sample: bool,
) -> Result<ChshMeasurement> {
    cfg.validate()?;
    let mut correlations = Vec::with_capacity(4);
    let mut s_value = 0.0;
    let mut var = 0.0;
    let mut total_counts = 0.0;
    for (k, (t1, t2, sign)) in s.terms().into_iter().enumerate() {
        let expected = orientations(t1, t2)
            .map(|o| cfg.expected_counts(coincidence_probability(state, o, Paths::default())));
        let counts = sample.then(|| {
            std::array::from_fn(|j| {
                let mut rng = setting_rng(cfg.seed, (4 * k + j) as u64);
                poisson_draw(expected[j], &mut rng)
            })
        });
        let used = counts.map_or(expected, |c: [u64; 4]| c.map(|x| x as f64));
        let (e, sigma_e) = correlation_from(used, t1, t2)?;
        s_value += sign * e;
        var += sigma_e * sigma_e;
        total_counts += used.iter().sum::<f64>();
        correlations.push(CorrelationMeasurement {
            theta1_deg: t1.to_degrees(),
            theta2_deg: t2.to_degrees(),
            expected,
            counts,
            e,
            sigma_e,
        });
    }
    Ok(ChshMeasurement {
        settings_deg: s.to_degrees(),
        correlations,
        s: s_value,
        sigma_s: var.sqrt(),
        total_counts,
    })
}

/// Samples the 16 coincidence counts and forms S with its standard error.
pub fn measure_chsh(
    state: &PairState,
    s: &ChshSettings,
    cfg: &ExperimentConfig,
) -> Result<ChshMeasurement> {
    run(state, s, cfg, true)
}

/// Same analysis on expected counts: S is exact and σ_S is the error a
/// sampled run with this configuration would have.
pub fn exact_chsh(state: &PairState, s: &ChshSettings, cfg: &ExperimentConfig) -> Result<ChshMeasurement> {
    run(state, s, cfg, false)
}
