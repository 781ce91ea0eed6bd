//! `sptq-sim` command line: scenario file in, JSON reports and CSV tables out.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{
    run_chsh, run_classical, run_state, run_sweep, Report, Scenario, SweepCurve,
};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SPTQ_SIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "sptq-sim", version, about = "Single-photon two-qubit SWAP simulator")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,

    /// JSON scenario file; ideal defaults when omitted.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,

    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// RNG seed (overrides `experiment.seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Use exact probabilities instead of sampled counts.
    #[arg(long, global = true)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Print the output state, purities and fidelity to the ideal target.
    State,
    /// Analyzer sweeps at θ1 = 0° and 45° with sinusoidal fits.
    Sweep,
    /// CHSH parameter at the configured and the optimal settings.
    Chsh,
    /// Classical laser-probe visibility with and without the dove prism.
    Classical,
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub summary: String,
    pub written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct CsvRow {
    theta2_deg: f64,
    counts: f64,
    dwell_s: f64,
    prob_exact: f64,
}

fn load_scenario(args: &Args) -> Result<(Scenario, PathBuf)> {
    let mut scenario = match &args.scenario {
        Some(p) => Scenario::from_path(p)?,
        None => Scenario::default(),
    };
    if let Some(seed) = args.seed {
        scenario.experiment.seed = seed;
    }
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&scenario.output.dir));
    if let Some(out) = &args.out {
        scenario.output.dir = out.display().to_string();
    }
    Ok((scenario, out))
}

fn write_json(dir: &Path, name: &str, report: &Report) -> Result<PathBuf> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(report)?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    Ok(path)
}

/// Writes one sweep curve with columns `theta2_deg,counts,dwell_s,prob_exact`.
pub fn write_sweep_csv(path: &Path, curve: &SweepCurve) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for p in &curve.points {
        w.serialize(CsvRow {
            theta2_deg: p.theta2_deg,
            counts: p.counts,
            dwell_s: p.dwell_s,
            prob_exact: p.prob_exact,
        })?;
    }
    w.flush().map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.4}"))
}

pub fn cmd_state(scenario: &Scenario, out: &Path) -> Result<Outcome> {
    let r = run_state(scenario)?;
    let mut s = String::new();
    let _ = writeln!(s, "circuit: {:?}", scenario.circuit_variant);
    let _ = writeln!(s, "fidelity to ideal target: {:.12}", r.fidelity_to_target);
    let _ = writeln!(s, "purity: {:.6}  signal: {:.6}  idler: {:.6}", r.purity, r.signal_purity, r.idler_purity);
    let _ = writeln!(
        s,
        "momentum purity: {:.6}  polarization purity: {:.6}",
        r.momentum_purity, r.polarization_purity
    );
    let _ = writeln!(
        s,
        "concurrence: momentum {:.6}  polarization {:.6}",
        r.momentum_concurrence, r.polarization_concurrence
    );
    let _ = writeln!(s, "density matrix (nonzero elements):");
    for e in &r.density {
        let _ = writeln!(s, "  <{}|rho|{}> = {:+.6} {:+.6}i", e.row, e.col, e.re, e.im);
    }
    let report = Report::State(r);
    let written = vec![write_json(out, "state_report.json", &report)?];
    Ok(Outcome {
        report,
        summary: s,
        written,
    })
}

pub fn cmd_sweep(scenario: &Scenario, out: &Path, exact: bool) -> Result<Outcome> {
    let r = run_sweep(scenario, exact)?;
    let mut written = Vec::new();
    let mut s = String::new();
    for curve in &r.curves {
        let path = out.join(format!("sweep_theta1_{}.csv", curve.theta1_deg));
        write_sweep_csv(&path, curve)?;
        written.push(path);
        let _ = writeln!(
            s,
            "theta1 = {:>6.2}°: V = {:.4} ± {:.4} (exact {:.4}), phase = {:.2}°",
            curve.theta1_deg,
            curve.fit.visibility,
            curve.fit.sigma_visibility,
            curve.exact_visibility,
            curve.fit.phase.to_degrees()
        );
    }
    let _ = writeln!(s, "model: V0 = {:.4}, V45 = {:.4}", r.model.v0, r.model.v45);
    if let Some(b) = &r.budget {
        let _ = writeln!(
            s,
            "budget: V45 / V_C1 = {} (V_C1 = {:.4}){}",
            fmt_opt(b.source_coherence),
            b.v_c1,
            b.note.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default()
        );
    }
    let report = Report::Sweep(r);
    written.push(write_json(out, "sweep_report.json", &report)?);
    Ok(Outcome {
        report,
        summary: s,
        written,
    })
}

pub fn cmd_chsh(scenario: &Scenario, out: &Path, exact: bool) -> Result<Outcome> {
    let r = run_chsh(scenario, exact)?;
    let mut s = String::new();
    let [a, ap, b, bp] = r.standard.settings_deg;
    let _ = writeln!(
        s,
        "settings ({a}°, {ap}°, {b}°, {bp}°): S = {:.4} ± {:.4} (exact {:.6}), {} sigma above 2",
        r.standard.s,
        r.standard.sigma_s,
        r.s_exact,
        fmt_opt(r.significance)
    );
    if let Some(o) = &r.optimized {
        let [a, ap, b, bp] = o.settings_deg;
        let _ = writeln!(
            s,
            "optimal ({a:.3}°, {ap:.3}°, {b:.3}°, {bp:.3}°): S = {:.4} ± {:.4} (exact {:.6})",
            o.measurement.s, o.measurement.sigma_s, o.s_exact
        );
    }
    let report = Report::Chsh(r);
    let written = vec![write_json(out, "chsh_report.json", &report)?];
    Ok(Outcome {
        report,
        summary: s,
        written,
    })
}

pub fn cmd_classical(scenario: &Scenario, out: &Path) -> Result<Outcome> {
    let r = run_classical(scenario)?;
    let summary = format!(
        "V_C1 (prism in) = {:.4}\nV_C2 (prism out) = {:.4}\nprism ratio = {:.4}\n",
        r.v_c1, r.v_c2, r.dove_ratio
    );
    let report = Report::Classical(r);
    let written = vec![write_json(out, "classical_report.json", &report)?];
    Ok(Outcome {
        report,
        summary,
        written,
    })
}

pub fn run(args: &Args) -> Result<Outcome> {
    let (scenario, out) = load_scenario(args)?;
    fs::create_dir_all(&out).map_err(|e| Error::io(format!("creating {}", out.display()), e))?;
    match args.command {
        Command::State => cmd_state(&scenario, &out),
        Command::Sweep => cmd_sweep(&scenario, &out, args.exact),
        Command::Chsh => cmd_chsh(&scenario, &out, args.exact),
        Command::Classical => cmd_classical(&scenario, &out),
    }
}

/// Reads the thread cap from the environment.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Error::InvalidConfig(format!("{THREADS_ENV}={v} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}
