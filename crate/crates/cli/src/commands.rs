// SPDX-License-Identifier: Apache-2.0

//! One function per subcommand. Each writes its CSV artifacts plus a JSON
//! sidecar and returns a one-line summary.

use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use sechgate::scans::{self, ScanGrid};
use sechgate::tomography::write_records_csv;
use sechgate::{sech_phase, ScanResult, TWO_PI};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::selftest;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    RabiScan,
    LineCuts,
    CyclicAmplitude,
    PhaseCurve,
    FidelitySweep,
    WaveformDump,
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::RabiScan => "rabi-scan",
            Command::LineCuts => "line-cuts",
            Command::CyclicAmplitude => "cyclic-amplitude",
            Command::PhaseCurve => "phase-curve",
            Command::FidelitySweep => "fidelity-sweep",
            Command::WaveformDump => "waveform-dump",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub summary: String,
    /// Extra lines printed before the summary.
    pub details: Vec<String>,
    pub files: Vec<PathBuf>,
    pub failed_checks: usize,
}

pub fn run_command(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))?;
    let mut out = match cmd {
        Command::RabiScan => rabi_scan(cfg),
        Command::LineCuts => line_cuts(cfg),
        Command::CyclicAmplitude => cyclic_amplitude(cfg),
        Command::PhaseCurve => phase_curve(cfg),
        Command::FidelitySweep => fidelity_sweep(cfg),
        Command::WaveformDump => waveform_dump(cfg),
        Command::Selftest => selftest_cmd(cfg),
    }?;
    if let Some(csv) = out.files.first() {
        out.summary = format!("{} -> {}", out.summary, csv.display());
    }
    Ok(out)
}

fn mhz_of(omega: f64) -> f64 {
    omega / TWO_PI / 1e6
}

/// Runs `f` against a buffered file. CSV/i-o failures map to exit code 2.
fn write_file<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> sechgate::Result<()>,
{
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    match f(&mut w) {
        Ok(()) => w.flush().map_err(|e| CliError::io(path, e)),
        Err(sechgate::Error::Csv(m)) => Err(CliError::io(path, m)),
        Err(e) => Err(e.into()),
    }
}

fn write_sidecar(
    path: &Path,
    cmd: Command,
    cfg: &ExperimentConfig,
    results: Value,
) -> Result<(), CliError> {
    let doc = json!({
        "command": cmd.name(),
        "generated_at": chrono::Utc::now().to_rfc3339(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "results": results,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::io(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// CSV path plus sidecar path for a base name.
fn artifact(cfg: &ExperimentConfig, base: &str) -> (PathBuf, PathBuf) {
    (
        cfg.out_dir.join(format!("{base}.csv")),
        cfg.out_dir.join(format!("{base}.json")),
    )
}

fn scan(cfg: &ExperimentConfig) -> sechgate::Result<ScanResult> {
    let g = &cfg.grids;
    let grid = ScanGrid::for_pulse(
        &cfg.sim.pulse,
        g.amplitude_max_flops,
        g.amplitude_points,
        g.detuning_max,
        g.detuning_points,
    )?;
    scans::rabi_scan_2d(cfg.shape(), &grid, &cfg.sim)
}

fn rabi_scan(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let result = scan(cfg)?;
    let (csv, meta) = artifact(cfg, &format!("rabi_{}", cfg.shape()));
    write_file(&csv, |w| result.write_csv(w))?;
    let (lo, hi) = result
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    write_sidecar(
        &meta,
        Command::RabiScan,
        cfg,
        json!({ "metadata": result.metadata, "p_min": lo, "p_max": hi }),
    )?;
    Ok(Outcome {
        summary: format!(
            "rabi-scan {}: {}x{} grid, P(excited) in [{lo:.4}, {hi:.4}]",
            cfg.shape(),
            result.grid.amplitudes.len(),
            result.grid.detunings.len()
        ),
        files: vec![csv, meta],
        ..Outcome::default()
    })
}

fn line_cuts(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let result = scan(cfg)?;
    let cuts = cfg
        .grids
        .line_cuts
        .iter()
        .map(|&d| scans::line_cut(&result, d).map(|c| (d, c)))
        .collect::<sechgate::Result<Vec<_>>>()?;
    let (csv, meta) = artifact(cfg, &format!("line_cuts_{}", cfg.shape()));
    write_file(&csv, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "requested_delta_hz",
            "delta_hz",
            "amplitude_rad_per_s",
            "p_excited",
        ])?;
        for (req, cut) in &cuts {
            for (a, p) in &cut.points {
                out.write_record([
                    (req / TWO_PI).to_string(),
                    (cut.delta / TWO_PI).to_string(),
                    a.to_string(),
                    p.to_string(),
                ])?;
            }
        }
        out.flush().map_err(|e| sechgate::Error::Csv(e.to_string()))
    })?;
    let selected: Vec<f64> = cuts.iter().map(|(_, c)| c.delta / TWO_PI).collect();
    write_sidecar(
        &meta,
        Command::LineCuts,
        cfg,
        json!({ "selected_delta_hz": selected }),
    )?;
    Ok(Outcome {
        summary: format!(
            "line-cuts {}: {} cuts x {} amplitudes",
            cfg.shape(),
            cuts.len(),
            result.grid.amplitudes.len()
        ),
        files: vec![csv, meta],
        ..Outcome::default()
    })
}

fn cyclic_amplitude(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let result = scan(cfg)?;
    let bracket = scans::first_flop_bracket(&cfg.sim.pulse)?;
    let (curve, skipped) = scans::cyclic_curve(&result, bracket)?;
    let bound = cfg.grids.variation_bound;
    let variation = scans::amplitude_variation(&curve, bound)?;
    let a0 = curve.amplitude_at(0.0);
    let (csv, meta) = artifact(cfg, &format!("cyclic_{}", cfg.shape()));
    write_file(&csv, |w| curve.write_csv(w))?;
    write_sidecar(
        &meta,
        Command::CyclicAmplitude,
        cfg,
        json!({ "variation_percent": variation, "bound_hz": bound / TWO_PI, "amplitude_at_zero": a0, "fits": curve.detunings.len(), "skipped": skipped }),
    )?;
    Ok(Outcome {
        summary: format!(
            "cyclic-amplitude {}: variation {variation:.2}% over |delta| <= {} MHz, A*(0) = {:.5e} rad/s ({} fits, {skipped} skipped)",
            cfg.shape(),
            mhz_of(bound),
            a0.unwrap_or(f64::NAN),
            curve.detunings.len()
        ),
        files: vec![csv, meta],
        ..Outcome::default()
    })
}

fn phase_curve(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let gate = cfg.gate_config()?;
    let records = scans::phase_curve(&cfg.grids.gate_detunings, &gate)?;
    let bound = cfg.grids.variation_bound;
    let rho = gate.pulse.rho();
    let mut max_phase_dev = 0.0f64;
    let mut max_theta_dev = 0.0f64;
    for r in records
        .iter()
        .filter(|r| r.delta.abs() <= bound * (1.0 + 1e-12))
    {
        max_phase_dev = max_phase_dev.max((r.phi - sech_phase(rho, r.delta)?).abs());
        max_theta_dev = max_theta_dev.max((r.theta - FRAC_PI_2).abs());
    }
    let (csv, meta) = artifact(cfg, &format!("phase_curve_{}", cfg.shape()));
    write_file(&csv, |w| write_records_csv(&records, w))?;
    write_sidecar(
        &meta,
        Command::PhaseCurve,
        cfg,
        json!({ "max_phase_deviation_rad": max_phase_dev, "max_theta_deviation_rad": max_theta_dev, "bound_hz": bound / TWO_PI, "gate_amplitude": gate.pulse.omega0 }),
    )?;
    Ok(Outcome {
        summary: format!(
            "phase-curve {}: {} points, max |phi - 4 atan(rho/delta)| = {max_phase_dev:.4} rad, max |theta - pi/2| = {max_theta_dev:.4} rad over |delta| <= {} MHz",
            cfg.shape(),
            records.len(),
            mhz_of(bound)
        ),
        files: vec![csv, meta],
        ..Outcome::default()
    })
}

#[derive(Serialize)]
struct PerPrep<'a> {
    delta_hz: f64,
    f_avg: f64,
    per_prep: &'a [f64; 6],
}

fn fidelity_sweep(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let gate = cfg.gate_config()?;
    let points = scans::fidelity_sweep(&cfg.grids.gate_detunings, &gate)?;
    let bound = cfg.grids.variation_bound;
    let inside = points
        .iter()
        .filter(|p| p.delta.abs() <= bound * (1.0 + 1e-12));
    let min_inside = inside.map(|p| p.f_avg).fold(f64::INFINITY, f64::min);
    let min_all = points.iter().map(|p| p.f_avg).fold(f64::INFINITY, f64::min);
    let (csv, meta) = artifact(cfg, &format!("fidelity_{}", cfg.shape()));
    write_file(&csv, |w| scans::write_fidelity_csv(&points, w))?;
    let per: Vec<PerPrep> = points
        .iter()
        .map(|p| PerPrep {
            delta_hz: p.delta / TWO_PI,
            f_avg: p.f_avg,
            per_prep: &p.per_prep,
        })
        .collect();
    let labels: Vec<&str> = sechgate::PrepLabel::ALL
        .iter()
        .map(|l| l.as_str())
        .collect();
    write_sidecar(
        &meta,
        Command::FidelitySweep,
        cfg,
        json!({ "min_f_avg_within_bound": min_inside, "min_f_avg": min_all, "bound_hz": bound / TWO_PI, "prep_order": labels, "points": per }),
    )?;
    Ok(Outcome {
        summary: format!(
            "fidelity-sweep {}: min F_avg = {min_inside:.5} over |delta| <= {} MHz ({min_all:.5} over the full sweep)",
            cfg.shape(),
            mhz_of(bound)
        ),
        files: vec![csv, meta],
        ..Outcome::default()
    })
}

fn waveform_dump(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let gate = cfg.gate_config()?;
    let wf = gate.pulse.sample_waveform()?;
    let (csv, meta) = artifact(
        cfg,
        &format!("waveform_{}_b{}", cfg.shape(), gate.pulse.bit_depth),
    );
    write_file(&csv, |w| wf.write_csv(w))?;
    write_sidecar(
        &meta,
        Command::WaveformDump,
        cfg,
        json!({ "samples": wf.len(), "duration_s": wf.duration(), "peak_rad_per_s": gate.pulse.omega0, "pulse_area_rad": gate.pulse.pulse_area() }),
    )?;
    Ok(Outcome {
        summary: format!(
            "waveform-dump {}: {} samples at {} bits, peak {:.5e} rad/s, area {:.6} rad",
            cfg.shape(),
            wf.len(),
            gate.pulse.bit_depth,
            gate.pulse.omega0,
            gate.pulse.pulse_area()
        ),
        files: vec![csv, meta],
        ..Outcome::default()
    })
}

fn selftest_cmd(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let checks = selftest::run_checks(cfg)?;
    let (csv, meta) = artifact(cfg, "selftest");
    write_file(&csv, |w| selftest::write_csv(&checks, w))?;
    let failed = checks.iter().filter(|c| !c.passed()).count();
    write_sidecar(
        &meta,
        Command::Selftest,
        cfg,
        json!({ "checks": checks, "failed": failed }),
    )?;
    Ok(Outcome {
        summary: format!(
            "selftest: {} of {} checks passed",
            checks.len() - failed,
            checks.len()
        ),
        details: checks.iter().map(|c| c.line()).collect(),
        files: vec![csv, meta],
        failed_checks: failed,
    })
}
