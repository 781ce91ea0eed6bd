use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    exact_chsh, fit_fringe_values, measure_chsh, poisson_draw, setting_rng, ChshMeasurement,
    FitResult, MeasurementKind, Scenario, RNG_ALGORITHM,
};
use crate::error::Result;
use crate::hilbert::{
    concurrence, momentum_polarization_mutual_information, partial_trace, reduce_to_dof,
    state_fidelity, BasisConvention, Dof, PairState, Photon,
};
use crate::measurement::{
    coincidence_probability, exact_visibility, optimize_chsh, AnalyzerSetting, Paths,
};
use crate::noise::{
    classical_gate_visibility, decompose_fidelity, imperfect_swap_pipeline, predicted_v0,
    predicted_v45,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityEntry {
    pub row: String,
    pub col: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateReport {
    pub scenario: Scenario,
    pub fidelity_to_target: f64,
    pub purity: f64,
    pub signal_purity: f64,
    pub idler_purity: f64,
    pub momentum_purity: f64,
    pub polarization_purity: f64,
    pub momentum_concurrence: f64,
    pub polarization_concurrence: f64,
    pub momentum_polarization_mutual_information: f64,
    /// Nonzero density-matrix elements, labelled `m p, m p` (signal, idler).
    pub density: Vec<DensityEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub theta2_deg: f64,
    pub prob_exact: f64,
    pub expected_counts: f64,
    /// Sampled counts, or the expected counts in exact mode.
    pub counts: f64,
    pub dwell_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCurve {
    pub theta1_deg: f64,
    pub points: Vec<SweepPoint>,
    pub fit: FitResult,
    pub exact_visibility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelPrediction {
    pub v0: f64,
    pub v45: f64,
    pub v_c1: f64,
    pub v_c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetInversion {
    pub v45: f64,
    pub v_c1: f64,
    pub source_coherence: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepReport {
    pub scenario: Scenario,
    pub exact: bool,
    pub rng: String,
    pub curves: Vec<SweepCurve>,
    pub v0: Option<f64>,
    pub v0_sigma: Option<f64>,
    pub v45: Option<f64>,
    pub v45_sigma: Option<f64>,
    pub model: ModelPrediction,
    pub budget: Option<BudgetInversion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizedChsh {
    pub settings_deg: [f64; 4],
    pub s_exact: f64,
    pub measurement: ChshMeasurement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshReport {
    pub scenario: Scenario,
    pub exact: bool,
    pub rng: String,
    pub s_exact: f64,
    pub standard: ChshMeasurement,
    /// `(|S| − 2)/σ_S` at the standard settings.
    pub significance: Option<f64>,
    pub optimized: Option<OptimizedChsh>,
    pub classical_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalReport {
    pub scenario: Scenario,
    /// Prism in.
    pub v_c1: f64,
    /// Prism out.
    pub v_c2: f64,
    /// `v_c1 / v_c2`, the visibility kept by the dove prism.
    pub dove_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    State(StateReport),
    Sweep(SweepReport),
    Chsh(ChshReport),
    Classical(ClassicalReport),
}

fn pipeline_state(scenario: &Scenario) -> Result<PairState> {
    scenario.validate()?;
    imperfect_swap_pipeline(&scenario.source, &scenario.gate, scenario.circuit_variant)
}

fn photon_label(index: usize) -> String {
    let (m, p) = BasisConvention::split_photon(index);
    format!("{}{}", ["T", "B"][m], ["H", "V"][p])
}

fn pair_label(index: usize) -> String {
    let (s, i) = BasisConvention::split_pair(index);
    format!("{},{}", photon_label(s), photon_label(i))
}

pub fn run_state(scenario: &Scenario) -> Result<StateReport> {
    let rho = pipeline_state(scenario)?;
    let momentum = reduce_to_dof(&rho, Dof::Momentum);
    let polarization = reduce_to_dof(&rho, Dof::Polarization);
    let mut density = Vec::new();
    for r in 0..16 {
        for c in 0..16 {
            let x = rho.get(r, c);
            if x.norm() > 1e-12 {
                density.push(DensityEntry {
                    row: pair_label(r),
                    col: pair_label(c),
                    re: x.re,
                    im: x.im,
                });
            }
        }
    }
    Ok(StateReport {
        scenario: scenario.clone(),
        fidelity_to_target: state_fidelity(&rho, &scenario.circuit_variant.target_state()),
        purity: rho.purity(),
        signal_purity: partial_trace(&rho, Photon::Signal).purity(),
        idler_purity: partial_trace(&rho, Photon::Idler).purity(),
        momentum_purity: momentum.purity(),
        polarization_purity: polarization.purity(),
        momentum_concurrence: concurrence(&momentum)?,
        polarization_concurrence: concurrence(&polarization)?,
        momentum_polarization_mutual_information: momentum_polarization_mutual_information(&rho)
            .max(0.0),
        density,
    })
}

pub fn run_sweep(scenario: &Scenario, exact: bool) -> Result<SweepReport> {
    let rho = pipeline_state(scenario)?;
    let cfg = &scenario.experiment;
    cfg.validate()?;
    let plan = &scenario.measurement;
    let grid = plan.theta2_grid_deg();

    // canonical setting order: theta1 outer, theta2 inner; stream = position
    let settings: Vec<(usize, f64, f64)> = plan
        .theta1_deg
        .iter()
        .enumerate()
        .flat_map(|(c, &t1)| grid.iter().map(move |&t2| (c, t1, t2)))
        .collect();
    let points: Vec<SweepPoint> = settings
        .par_iter()
        .enumerate()
        .map(|(stream, &(_, t1, t2))| {
            let prob = coincidence_probability(
                &rho,
                AnalyzerSetting::from_degrees(t1, t2),
                Paths::default(),
            );
            let expected = cfg.expected_counts(prob);
            let counts = if exact {
                expected
            } else {
                poisson_draw(expected, &mut setting_rng(cfg.seed, stream as u64)) as f64
            };
            SweepPoint {
                theta2_deg: t2,
                prob_exact: prob,
                expected_counts: expected,
                counts,
                dwell_s: cfg.dwell,
            }
        })
        .collect();

    let mut curves = Vec::with_capacity(plan.theta1_deg.len());
    for (c, chunk) in points.chunks(grid.len()).enumerate() {
        let t1 = plan.theta1_deg[c];
        let values: Vec<(f64, f64)> = chunk
            .iter()
            .map(|p| (p.theta2_deg.to_radians(), p.counts))
            .collect();
        curves.push(SweepCurve {
            theta1_deg: t1,
            points: chunk.to_vec(),
            fit: fit_fringe_values(&values)?,
            exact_visibility: exact_visibility(&rho, t1.to_radians()),
        });
    }

    let find = |deg: f64| {
        curves
            .iter()
            .find(|c| (c.theta1_deg - deg).rem_euclid(180.0).min((deg - c.theta1_deg).rem_euclid(180.0)) < 1e-9)
    };
    let (v0, v0_sigma) = find(0.0).map_or((None, None), |c| {
        (Some(c.fit.visibility), Some(c.fit.sigma_visibility))
    });
    let (v45, v45_sigma) = find(45.0).map_or((None, None), |c| {
        (Some(c.fit.visibility), Some(c.fit.sigma_visibility))
    });

    let v_c1 = classical_gate_visibility(&scenario.gate, true)?;
    let model = ModelPrediction {
        v0: predicted_v0(&scenario.source),
        v45: predicted_v45(&scenario.source, &scenario.gate),
        v_c1,
        v_c2: classical_gate_visibility(&scenario.gate, false)?,
    };
    let budget = v45.map(|v| match decompose_fidelity(v, v_c1) {
        Ok(src) => BudgetInversion {
            v45: v,
            v_c1,
            source_coherence: Some(src),
            note: None,
        },
        Err(e) => BudgetInversion {
            v45: v,
            v_c1,
            source_coherence: None,
            note: Some(e.to_string()),
        },
    });

    Ok(SweepReport {
        scenario: scenario.clone(),
        exact,
        rng: RNG_ALGORITHM.into(),
        curves,
        v0,
        v0_sigma,
        v45,
        v45_sigma,
        model,
        budget,
    })
}

pub fn run_chsh(scenario: &Scenario, exact: bool) -> Result<ChshReport> {
    let rho = pipeline_state(scenario)?;
    let cfg = &scenario.experiment;
    let settings = scenario.measurement.chsh_settings();
    let measure = |s| {
        if exact {
            exact_chsh(&rho, s, cfg)
        } else {
            measure_chsh(&rho, s, cfg)
        }
    };
    let standard = measure(&settings)?;
    let s_exact = crate::measurement::chsh_s(&rho, &settings)?;
    let optimized = if scenario.measurement.optimize_chsh {
        let opt = optimize_chsh(&rho)?;
        Some(OptimizedChsh {
            settings_deg: opt.settings.to_degrees(),
            s_exact: opt.s,
            measurement: measure(&opt.settings)?,
        })
    } else {
        None
    };
    Ok(ChshReport {
        scenario: scenario.clone(),
        exact,
        rng: RNG_ALGORITHM.into(),
        s_exact,
        significance: standard.violation_sigmas(),
        standard,
        optimized,
        classical_bound: 2.0,
    })
}

pub fn run_classical(scenario: &Scenario) -> Result<ClassicalReport> {
    scenario.validate()?;
    let v_c1 = classical_gate_visibility(&scenario.gate, true)?;
    let v_c2 = classical_gate_visibility(&scenario.gate, false)?;
    Ok(ClassicalReport {
        scenario: scenario.clone(),
        v_c1,
        v_c2,
        dove_ratio: if v_c2 > 0.0 { v_c1 / v_c2 } else { 0.0 },
    })
}

/// Runs the measurement named in the scenario.
pub fn run_experiment(scenario: &Scenario, exact: bool) -> Result<Report> {
    Ok(match scenario.measurement.kind {
        MeasurementKind::Sweep => Report::Sweep(run_sweep(scenario, exact)?),
        MeasurementKind::Chsh => Report::Chsh(run_chsh(scenario, exact)?),
        MeasurementKind::ClassicalVisibility => Report::Classical(run_classical(scenario)?),
    })
}
