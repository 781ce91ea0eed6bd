//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, then the
//! assertion. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines.

use std::f64::consts::SQRT_2;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use sptq_core::cli::cmd_classical;
use sptq_core::experiment::{
    fit_fringe, measure_chsh, simulate_counts, ExperimentConfig, Scenario,
};
use sptq_core::gates::{circuit, m_cnot, p_cnot, swap_gate, CircuitVariant};
use sptq_core::hilbert::{
    apply_to_photon, state_fidelity, Dof, Operator, PairKet, PairState, Photon,
};
use sptq_core::measurement::{
    chsh_s, correlation_e, exact_visibility, optimize_chsh, AnalyzerSetting, ChshSettings,
};
use sptq_core::noise::{decompose_fidelity, dephase_pair, imperfect_swap_pipeline, GateNoise};
use sptq_core::source::{noisy_source, SourceParams};

fn verdict(id: u32, name: &str, ok: bool, detail: impl AsRef<str>) {
    println!(
        "acceptance {id} [{}] {name}: {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    assert!(ok, "criterion {id} failed: {}", detail.as_ref());
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `|m p⟩` photon index by enumeration: T,H first, polarization fastest.
fn photon(m: char, p: char) -> usize {
    let labels = [('T', 'H'), ('T', 'V'), ('B', 'H'), ('B', 'V')];
    labels.iter().position(|&l| l == (m, p)).unwrap()
}

/// `(|a⟩_S|b⟩_I + |c⟩_S|d⟩_I)/√2` with photon labels like `"TH"`.
fn bell_ket(terms: [(&str, &str); 2]) -> PairKet {
    let mut amp = vec![c(0.0); 16];
    for (s, i) in terms {
        let s: Vec<char> = s.chars().collect();
        let i: Vec<char> = i.chars().collect();
        amp[4 * photon(s[0], s[1]) + photon(i[0], i[1])] = c(1.0 / SQRT_2);
    }
    PairKet::new(amp).unwrap()
}

fn bell_state_hh_vv() -> PairState {
    bell_ket([("TH", "BH"), ("TV", "BV")]).density()
}

#[test]
fn criterion_1_gate_algebra() {
    let t = Instant::now();
    // canonical SWAP: |m p⟩ → |p m⟩
    let mut canonical = DMatrix::<Complex64>::zeros(4, 4);
    for m in 0..2 {
        for p in 0..2 {
            canonical[(2 * p + m, 2 * m + p)] = c(1.0);
        }
    }
    let swap = swap_gate();
    let entry_err = (swap.operator().matrix() - &canonical).camax();

    let (m, p) = (m_cnot(), p_cnot());
    let mpm = m.after(&p).after(&m);
    let pmp = p.after(&m).after(&p);
    let braid = mpm.operator().max_abs_diff(pmp.operator());
    let squared = swap.after(&swap).operator().max_abs_diff(&Operator::identity(4));
    let elapsed = t.elapsed();

    let ok = entry_err == 0.0 && braid == 0.0 && squared == 0.0 && elapsed < Duration::from_secs(1);
    verdict(
        1,
        "gate algebra",
        ok,
        format!("SWAP entry error {entry_err:e}, |MPM - PMP| {braid:e}, |SWAP^2 - I| {squared:e}, {elapsed:?}"),
    );
}

#[test]
fn criterion_2_entanglement_transfer() {
    let src = bell_ket([("TH", "BV"), ("BH", "TV")]).density();
    let swapped = circuit(&src, &CircuitVariant::FullSwap.steps()).unwrap();
    let partial = circuit(&src, &CircuitVariant::NoFinalMcnot.steps()).unwrap();
    let f4 = state_fidelity(&swapped, &bell_ket([("TH", "BV"), ("TV", "BH")]));
    let f5 = state_fidelity(&partial, &bell_ket([("TH", "BH"), ("TV", "BV")]));
    // the library source must be the same state the oracle starts from
    let f_src = state_fidelity(&noisy_source(&SourceParams::ideal()).unwrap(), &bell_ket([("TH", "BV"), ("BH", "TV")]));
    let tol = 1e-12;
    verdict(
        2,
        "entanglement transfer",
        f4 >= 1.0 - tol && f5 >= 1.0 - tol && f_src >= 1.0 - tol,
        format!("full SWAP fidelity {f4:.15}, without final M-CNOT {f5:.15}, source {f_src:.15}"),
    );
}

#[test]
fn criterion_3_ideal_bell_violation() {
    let rho = bell_state_hh_vv();
    let s = chsh_s(&rho, &ChshSettings::standard()).unwrap();
    let opt = optimize_chsh(&rho).unwrap();
    let ok = (s - 2.0 * SQRT_2).abs() <= 1e-9 && opt.s >= 2.0 * SQRT_2 - 1e-6;
    verdict(
        3,
        "ideal Bell violation",
        ok,
        format!("S standard = {s:.12}, S optimized = {:.12}, 2√2 = {:.12}", opt.s, 2.0 * SQRT_2),
    );
}

#[test]
fn criterion_4_working_point_prediction() {
    let t = Instant::now();
    let src = SourceParams::new(0.95, 1.0).unwrap();
    let gate = GateNoise::lumped(0.93).unwrap();
    let rho = imperfect_swap_pipeline(&src, &gate, CircuitVariant::NoFinalMcnot).unwrap();
    let v45 = exact_visibility(&rho, 45f64.to_radians());
    let s = chsh_s(&rho, &ChshSettings::standard()).unwrap();
    let elapsed = t.elapsed();

    let v_expected = 0.95 * 0.93;
    let s_expected = SQRT_2 * (1.0 + v_expected);
    let ok = (v45 - 0.8835).abs() < 1e-9
        && (v45 - 0.88).abs() <= 0.02
        && (s - s_expected).abs() < 1e-9
        && (s - 2.653).abs() <= 0.02
        && elapsed < Duration::from_secs(1);
    verdict(
        4,
        "working-point prediction",
        ok,
        format!("V45 = {v45:.6} (measured 0.88 ± 0.02), S = {s:.6} (measured 2.653 ± 0.004), {elapsed:?}"),
    );
}

#[test]
fn criterion_5_budget_inversion() {
    let f = decompose_fidelity(0.88, 0.93).unwrap();
    let three = (f * 1000.0).round() / 1000.0;
    let two_sig = (f * 100.0).round() / 100.0;
    verdict(
        5,
        "error-budget inversion",
        three == 0.946 && two_sig == 0.95,
        format!("source coherence {f:.6} → {three:.3}, 2 s.f. {two_sig:.2}"),
    );
}

#[test]
fn criterion_6_classical_characterization() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = Scenario {
        gate: GateNoise::new(0.95, 0.98).unwrap(),
        ..Default::default()
    };
    let out = cmd_classical(&scenario, dir.path()).unwrap();
    let sptq_core::experiment::Report::Classical(r) = out.report else {
        panic!("classical command returned another report kind");
    };
    let ok = (0.925..=0.937).contains(&r.v_c1) && (r.v_c2 - 0.95).abs() < 1e-12 && dir.path().join("classical_report.json").exists();
    verdict(
        6,
        "classical characterization",
        ok,
        format!("V_C1 = {:.6}, V_C2 = {:.12}", r.v_c1, r.v_c2),
    );
}

#[test]
fn criterion_7_statistics() {
    let t = Instant::now();
    let rho = imperfect_swap_pipeline(
        &SourceParams::new(0.95, 1.0).unwrap(),
        &GateNoise::lumped(0.93).unwrap(),
        CircuitVariant::NoFinalMcnot,
    )
    .unwrap();
    let injected = 0.95 * 0.93;

    // (a) 100 seeded sweeps at θ1 = 45°, mean ~10³ counts per point
    let grid: Vec<f64> = (0..=18).map(|k| (10.0 * k as f64).to_radians()).collect();
    let cfg = ExperimentConfig {
        pair_rate: 2000.0,
        dwell: 2.0,
        ..Default::default()
    };
    let mut covered = 0;
    let mut mean_counts = 0.0;
    for seed in 0..100u64 {
        let cfg = ExperimentConfig { seed, ..cfg };
        let data: Vec<_> = grid
            .iter()
            .enumerate()
            .map(|(k, &t2)| {
                simulate_counts(&rho, AnalyzerSetting::new(45f64.to_radians(), t2), &cfg, k as u64).unwrap()
            })
            .collect();
        mean_counts += data.iter().map(|r| r.counts as f64).sum::<f64>() / data.len() as f64 / 100.0;
        let fit = fit_fringe(&data).unwrap();
        if (fit.visibility - injected).abs() <= 3.0 * fit.sigma_visibility {
            covered += 1;
        }
    }

    // (b) σ_S·√N constant over two decades of dwell
    let mut scaled = Vec::new();
    for dwell in [1.0, 10.0, 100.0] {
        let cfg = ExperimentConfig { dwell, ..cfg };
        let m = measure_chsh(&rho, &ChshSettings::standard(), &cfg).unwrap();
        scaled.push(m.sigma_s * m.total_counts.sqrt());
    }
    let spread = scaled.iter().cloned().fold(f64::MIN, f64::max) / scaled.iter().cloned().fold(f64::MAX, f64::min);

    // (c) significance at ≥ 4×10⁵ total counts
    let cfg = ExperimentConfig { dwell: 75.0, ..cfg };
    let m = measure_chsh(&rho, &ChshSettings::standard(), &cfg).unwrap();
    let sig = m.violation_sigmas().unwrap();
    let elapsed = t.elapsed();

    let ok = covered >= 95
        && (800.0..=1200.0).contains(&mean_counts)
        && spread <= 1.2
        && m.total_counts >= 4.0e5
        && sig > 150.0
        && elapsed < Duration::from_secs(60);
    verdict(
        7,
        "statistical suite",
        ok,
        format!(
            "3σ coverage {covered}/100 at {mean_counts:.0} counts/point, σ_S√N spread {spread:.4}, \
             S = {:.4} ± {:.4} from {:.0} counts → {sig:.1}σ, {elapsed:?}",
            m.s, m.sigma_s, m.total_counts
        ),
    );
}

fn random_density(rng: &mut ChaCha8Rng) -> PairState {
    let rank = rng.random_range(1..=16);
    let g = DMatrix::<Complex64>::from_fn(16, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    PairState::new(rho.unscale(tr)).unwrap()
}

fn random_unitary(rng: &mut ChaCha8Rng) -> Operator {
    let g = DMatrix::<Complex64>::from_fn(4, 4, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    Operator::new(qr.q()).unwrap()
}

fn random_channel(rho: &PairState, rng: &mut ChaCha8Rng) -> PairState {
    let photon = if rng.random_bool(0.5) { Photon::Signal } else { Photon::Idler };
    match rng.random_range(0..4) {
        0 => apply_to_photon(rho, photon, &random_unitary(rng)).unwrap(),
        1 => {
            let dof = if rng.random_bool(0.5) { Dof::Momentum } else { Dof::Polarization };
            dephase_pair(rho, photon, dof, rng.random_range(0.0..=1.0)).unwrap()
        }
        2 => apply_to_photon(rho, photon, swap_gate().operator()).unwrap(),
        _ => rho.mix(&PairState::maximally_mixed(), rng.random_range(0.0..=1.0)),
    }
}

#[test]
fn criterion_8_physicality() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let tsirelson = 2.0 * SQRT_2 + 1e-9;
    let (mut worst_trace, mut worst_herm, mut worst_eig) = (0.0f64, 0.0f64, 0.0f64);
    let (mut max_e, mut max_s, mut max_s_opt) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..1000 {
        let mut rho = random_density(&mut rng);
        for _ in 0..rng.random_range(1..=4) {
            rho = random_channel(&rho, &mut rng);
        }
        let m = rho.matrix();
        worst_trace = worst_trace.max((m.trace().re - 1.0).abs().max(m.trace().im.abs()));
        worst_herm = worst_herm.max((m - m.adjoint()).camax());
        worst_eig = worst_eig.min(rho.eigenvalues()[0]);
        for _ in 0..4 {
            let (t1, t2) = (rng.random_range(0.0..std::f64::consts::PI), rng.random_range(0.0..std::f64::consts::PI));
            max_e = max_e.max(correlation_e(&rho, t1, t2).map_or(0.0, f64::abs));
        }
        let settings = ChshSettings {
            a: rng.random_range(0.0..std::f64::consts::PI),
            a_prime: rng.random_range(0.0..std::f64::consts::PI),
            b: rng.random_range(0.0..std::f64::consts::PI),
            b_prime: rng.random_range(0.0..std::f64::consts::PI),
        };
        if let Ok(s) = chsh_s(&rho, &settings) {
            max_s = max_s.max(s.abs());
        }
        if k % 50 == 0 {
            if let Ok(opt) = optimize_chsh(&rho) {
                max_s_opt = max_s_opt.max(opt.s.abs());
            }
        }
    }
    let elapsed = t.elapsed();
    let ok = worst_trace < 1e-10
        && worst_herm < 1e-12
        && worst_eig >= -1e-10
        && max_e <= 1.0 + 1e-12
        && max_s <= tsirelson
        && max_s_opt <= tsirelson
        && elapsed < Duration::from_secs(60);
    verdict(
        8,
        "physicality",
        ok,
        format!(
            "1000 states: trace err {worst_trace:e}, hermiticity err {worst_herm:e}, min eigenvalue {worst_eig:e}, \
             max |E| {max_e:.6}, max |S| {max_s:.6} (optimized {max_s_opt:.6}), {elapsed:?}"
        ),
    );
}
