// SPDX-License-Identifier: Apache-2.0

//! Grid drivers and fits: Rabi maps over (amplitude, detuning), line cuts,
//! cyclic-amplitude curves, phase curves and average-fidelity sweeps.
//!
//! Grid points are independent and evaluated with rayon; results are
//! collected by grid index so the output does not depend on scheduling.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::propagator::{DissipationConfig, EvolutionConfig};
use crate::pulseshape::{PulseSpec, Shape};
use crate::tomography::{self, PrepLabel, Qubit, TomographyRecord};
use crate::transmon::{initial_thermal_state, Frame, TransmonParams};
use crate::TWO_PI;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanGrid {
    /// Peak Rabi rates in rad/s.
    pub amplitudes: Vec<f64>,
    /// Detunings in rad/s.
    pub detunings: Vec<f64>,
}

fn check_axis(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} axis is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "{name} axis has non-finite values"
        )));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "{name} axis is not strictly increasing"
        )));
    }
    Ok(())
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

impl ScanGrid {
    pub fn new(amplitudes: Vec<f64>, detunings: Vec<f64>) -> Result<Self> {
        check_axis("amplitude", &amplitudes)?;
        check_axis("detuning", &detunings)?;
        if amplitudes[0] < 0.0 {
            return Err(Error::InvalidGrid("amplitudes must be non-negative".into()));
        }
        Ok(Self {
            amplitudes,
            detunings,
        })
    }

    /// Amplitudes 0 → 3.2·(2ρ) in 101 steps, detunings ±2π×20 MHz in 81.
    pub fn reference_default(rho: f64) -> Self {
        Self {
            amplitudes: linspace(0.0, 3.2 * 2.0 * rho, 101),
            detunings: linspace(crate::mhz(-20.0), crate::mhz(20.0), 81),
        }
    }

    /// Amplitudes 0 → `flops`·[`nominal_flop_amplitude`] and detunings
    /// ±`max_detuning`.
    pub fn for_pulse(
        pulse: &PulseSpec,
        flops: f64,
        n_amp: usize,
        max_detuning: f64,
        n_det: usize,
    ) -> Result<Self> {
        let unit = nominal_flop_amplitude(pulse)?;
        Self::new(
            linspace(0.0, flops * unit, n_amp),
            linspace(-max_detuning, max_detuning, n_det),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanMetadata {
    pub shape: Shape,
    pub pulse: PulseSpec,
    pub model: TransmonParams,
    pub evolution: EvolutionConfig,
    pub dissipation: DissipationConfig,
    pub thermal_excited: f64,
}

/// Excited-state probability 1 − P(ground) on a grid; rows are amplitudes,
/// columns detunings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub grid: ScanGrid,
    /// Row-major values, `values[i * n_detunings + j]`.
    pub values: Vec<f64>,
    pub metadata: ScanMetadata,
}

impl ScanResult {
    pub fn value(&self, amp_index: usize, det_index: usize) -> f64 {
        self.values[amp_index * self.grid.detunings.len() + det_index]
    }

    pub fn column(&self, det_index: usize) -> Vec<(f64, f64)> {
        self.grid
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, self.value(i, det_index)))
            .collect()
    }

    /// Matrix CSV: header row of detunings (Hz), then one row per amplitude
    /// (rad/s) with its probabilities.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["amplitude_rad_per_s\\delta_hz".to_string()];
        header.extend(self.grid.detunings.iter().map(|d| (d / TWO_PI).to_string()));
        w.write_record(&header)?;
        let nd = self.grid.detunings.len();
        for (i, a) in self.grid.amplitudes.iter().enumerate() {
            let mut row = vec![a.to_string()];
            row.extend(
                self.values[i * nd..(i + 1) * nd]
                    .iter()
                    .map(|v| v.to_string()),
            );
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Evolves the thermal mixture under every (amplitude, detuning) pulse and
/// records 1 − ρ00, so leaked population counts as excited.
pub fn rabi_scan_2d(shape: Shape, grid: &ScanGrid, cfg: &SimConfig) -> Result<ScanResult> {
    cfg.validate()?;
    check_axis("amplitude", &grid.amplitudes)?;
    check_axis("detuning", &grid.detunings)?;
    let template = cfg.pulse.with_shape(shape);
    let init =
        initial_thermal_state(cfg.thermal_excited, cfg.model.dim())?.with_frame(Frame::DriveFrame);
    let nd = grid.detunings.len();
    let values = (0..grid.amplitudes.len() * nd)
        .into_par_iter()
        .map(|idx| {
            let waveform = template
                .with_amplitude(grid.amplitudes[idx / nd])?
                .sample_waveform()?;
            let params = cfg.model.with_delta(grid.detunings[idx % nd]);
            let out = cfg.evolve(&init, &waveform, &params)?;
            Ok((1.0 - out.population(0)).clamp(0.0, 1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ScanResult {
        grid: grid.clone(),
        values,
        metadata: ScanMetadata {
            shape,
            pulse: template,
            model: cfg.model,
            evolution: cfg.evolution,
            dissipation: cfg.dissipation,
            thermal_excited: cfg.thermal_excited,
        },
    })
}

/// One detuning column of a scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineCut {
    /// Grid detuning actually selected.
    pub delta: f64,
    /// (amplitude, probability) pairs.
    pub points: Vec<(f64, f64)>,
}

/// Nearest-neighbour column; ties go to the lower index.
pub fn line_cut(result: &ScanResult, delta: f64) -> Result<LineCut> {
    if result.grid.detunings.is_empty() || result.grid.amplitudes.is_empty() {
        return Err(Error::EmptyScan);
    }
    let mut best = 0;
    for (j, d) in result.grid.detunings.iter().enumerate() {
        if (d - delta).abs() < (result.grid.detunings[best] - delta).abs() {
            best = j;
        }
    }
    Ok(LineCut {
        delta: result.grid.detunings[best],
        points: result.column(best),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticFit {
    pub vertex: f64,
    pub curvature: f64,
    /// RMS residual of the fitted points.
    pub residual: f64,
}

/// Least-squares parabola through `points`. Abscissae are centred and scaled
/// before solving the normal equations.
pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<QuadraticFit> {
    if points.len() < 3 {
        return Err(Error::InvalidGrid(
            "a quadratic fit needs at least 3 points".into(),
        ));
    }
    let n = points.len() as f64;
    let mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let scale = points
        .iter()
        .map(|p| (p.0 - mean).abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::InvalidGrid("fit abscissae coincide".into()));
    }
    let mut ata = Matrix3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    for &(x, y) in points {
        let u = (x - mean) / scale;
        let row = Vector3::new(u * u, u, 1.0);
        ata += row * row.transpose();
        aty += row * y;
    }
    let coef = ata
        .lu()
        .solve(&aty)
        .ok_or_else(|| Error::InvalidGrid("singular fit".into()))?;
    let (a, b, c) = (coef[0], coef[1], coef[2]);
    if !(a > 0.0) {
        return Err(Error::NonConvexFit(a / (scale * scale)));
    }
    let residual = (points
        .iter()
        .map(|&(x, y)| {
            let u = (x - mean) / scale;
            (a * u * u + b * u + c - y).powi(2)
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(QuadraticFit {
        vertex: mean - b / (2.0 * a) * scale,
        curvature: a / (scale * scale),
        residual,
    })
}

/// Number of points in each quadratic fit.
pub const FIT_POINTS: usize = 5;

/// Fits a parabola to the five points around the first interior local
/// minimum of `cut` whose abscissa lies in `bracket`.
pub fn fit_cyclic_minimum(cut: &[(f64, f64)], bracket: (f64, f64)) -> Result<QuadraticFit> {
    let (lo, hi) = bracket;
    let n = cut.len();
    if n < FIT_POINTS {
        return Err(Error::NoMinimum { lo, hi });
    }
    let idx = (1..n - 1)
        .find(|&i| {
            let (a, p) = cut[i];
            a >= lo && a <= hi && p < cut[i - 1].1 && p <= cut[i + 1].1
        })
        .ok_or(Error::NoMinimum { lo, hi })?;
    let half = FIT_POINTS / 2;
    let start = idx.saturating_sub(half).min(n - FIT_POINTS);
    fit_quadratic(&cut[start..start + FIT_POINTS])
}

/// Amplitude of the first return-probability minimum in `bracket`, from a
/// five-point quadratic fit.
pub fn find_cyclic_amplitude(cut: &[(f64, f64)], bracket: (f64, f64)) -> Result<f64> {
    fit_cyclic_minimum(cut, bracket).map(|f| f.vertex)
}

/// Amplitude of a full first Rabi flop: 2ρ for sech, otherwise the amplitude
/// whose windowed area is 2π. Scan axes are expressed in multiples of it.
pub fn nominal_flop_amplitude(pulse: &PulseSpec) -> Result<f64> {
    if pulse.shape == Shape::Sech {
        return Ok(2.0 * pulse.rho());
    }
    Ok(TWO_PI / pulse.with_amplitude(1.0)?.pulse_area())
}

/// Bracket [0.25, 1.75] around the nominal first-flop amplitude. It excludes
/// the trivial minimum at zero and the second flop at twice the amplitude.
pub fn first_flop_bracket(pulse: &PulseSpec) -> Result<(f64, f64)> {
    let a = nominal_flop_amplitude(pulse)?;
    Ok((0.25 * a, 1.75 * a))
}

/// Fitted first-flop amplitude A*(Δ) per detuning column.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CyclicCurve {
    pub detunings: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub fit_residuals: Vec<f64>,
}

impl CyclicCurve {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["delta_hz", "amplitude_rad_per_s", "fit_residual"])?;
        for ((d, a), r) in self
            .detunings
            .iter()
            .zip(&self.amplitudes)
            .zip(&self.fit_residuals)
        {
            w.write_record([(d / TWO_PI).to_string(), a.to_string(), r.to_string()])?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }

    /// A*(0) by linear interpolation between the neighbouring detunings.
    pub fn amplitude_at(&self, delta: f64) -> Option<f64> {
        let d = &self.detunings;
        let k = d.windows(2).position(|w| w[0] <= delta && delta <= w[1])?;
        let (d0, d1) = (d[k], d[k + 1]);
        let t = if d1 == d0 {
            0.0
        } else {
            (delta - d0) / (d1 - d0)
        };
        Some(self.amplitudes[k] * (1.0 - t) + self.amplitudes[k + 1] * t)
    }
}

/// Fits every column of the scan. Columns without a minimum inside the
/// bracket are left out; the returned count says how many.
pub fn cyclic_curve(result: &ScanResult, bracket: (f64, f64)) -> Result<(CyclicCurve, usize)> {
    let mut curve = CyclicCurve::default();
    let mut skipped = 0;
    for (j, &d) in result.grid.detunings.iter().enumerate() {
        match fit_cyclic_minimum(&result.column(j), bracket) {
            Ok(fit) if fit.vertex > 0.0 => {
                curve.detunings.push(d);
                curve.amplitudes.push(fit.vertex);
                curve.fit_residuals.push(fit.residual);
            }
            Ok(_) | Err(Error::NoMinimum { .. }) | Err(Error::NonConvexFit(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if curve.detunings.is_empty() {
        return Err(Error::NoMinimum {
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    Ok((curve, skipped))
}

/// 100·(max A* − min A*)/A*(0) over |Δ| ≤ bound.
pub fn amplitude_variation(curve: &CyclicCurve, bound: f64) -> Result<f64> {
    let slack = 1e-9 * bound.abs().max(1.0);
    let inside: Vec<f64> = curve
        .detunings
        .iter()
        .zip(&curve.amplitudes)
        .filter(|(d, _)| d.abs() <= bound + slack)
        .map(|(_, a)| *a)
        .collect();
    let lo = curve.detunings.first().copied().unwrap_or(f64::INFINITY);
    let hi = curve.detunings.last().copied().unwrap_or(f64::NEG_INFINITY);
    if inside.is_empty() || lo > -bound + slack || hi < bound - slack {
        return Err(Error::RangeNotCovered(bound));
    }
    let a0 = curve
        .amplitude_at(0.0)
        .ok_or(Error::RangeNotCovered(bound))?;
    let max = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = inside.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(100.0 * (max - min) / a0)
}

fn check_detunings(deltas: &[f64]) -> Result<()> {
    check_axis("detuning", deltas)?;
    if deltas.contains(&0.0) {
        return Err(Error::SingularDetuning);
    }
    Ok(())
}

fn nearest_branch(phi: f64, reference: f64) -> f64 {
    phi + TWO_PI * ((reference - phi) / TWO_PI).round()
}

/// Unwraps φ separately on each side of Δ = 0. Each side starts from its
/// largest |Δ|, placed on the branch nearest the closed-form phase for
/// bandwidth `rho`, and continues towards resonance on the branch nearest
/// its neighbour. Records must be sorted by Δ.
pub fn unwrap_phases(records: &mut [TomographyRecord], rho: f64) {
    let split = records
        .iter()
        .position(|r| r.delta > 0.0)
        .unwrap_or(records.len());
    let (neg, pos) = records.split_at_mut(split);
    let anchor = |r: &mut TomographyRecord| {
        if let (true, Ok(reference)) = (r.phi.is_finite(), crate::oracle::sech_phase(rho, r.delta))
        {
            r.phi = nearest_branch(r.phi, reference);
        }
    };
    if let Some(first) = neg.first_mut() {
        anchor(first);
    }
    if let Some(last) = pos.last_mut() {
        anchor(last);
    }
    for k in 1..neg.len() {
        if neg[k].phi.is_finite() && neg[k - 1].phi.is_finite() {
            neg[k].phi = nearest_branch(neg[k].phi, neg[k - 1].phi);
        }
    }
    for k in (0..pos.len().saturating_sub(1)).rev() {
        if pos[k].phi.is_finite() && pos[k + 1].phi.is_finite() {
            pos[k].phi = nearest_branch(pos[k].phi, pos[k + 1].phi);
        }
    }
}

/// Gate tomography of the Y+π/2 input over a strictly increasing detuning
/// grid without Δ = 0, with φ unwrapped per side.
pub fn phase_curve(deltas: &[f64], cfg: &SimConfig) -> Result<Vec<TomographyRecord>> {
    check_detunings(deltas)?;
    let mut records = deltas
        .par_iter()
        .map(|&d| tomography::zgate_tomography(d, PrepLabel::YPlusHalfPi, cfg))
        .collect::<Result<Vec<_>>>()?;
    unwrap_phases(&mut records, cfg.pulse.rho());
    Ok(records)
}

/// Six-state average fidelity at one detuning.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityPoint {
    pub delta: f64,
    pub f_avg: f64,
    /// Fidelity per input, in [`PrepLabel::ALL`] order.
    pub per_prep: [f64; 6],
    pub records: Vec<TomographyRecord>,
}

pub fn write_fidelity_csv<W: Write>(points: &[FidelityPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["delta_hz", "f_avg"])?;
    for p in points {
        w.write_record([(p.delta / TWO_PI).to_string(), p.f_avg.to_string()])?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

/// Average fidelity against a caller-supplied theory state ρ2(Δ, prep).
pub fn fidelity_sweep_with<F>(
    deltas: &[f64],
    cfg: &SimConfig,
    theory: F,
) -> Result<Vec<FidelityPoint>>
where
    F: Fn(f64, PrepLabel) -> Result<Qubit> + Sync,
{
    check_axis("detuning", deltas)?;
    deltas
        .par_iter()
        .map(|&d| {
            let mut per_prep = [0.0; 6];
            let mut records = Vec::with_capacity(6);
            for (k, prep) in PrepLabel::ALL.into_iter().enumerate() {
                let rec = tomography::zgate_tomography(d, prep, cfg)?;
                let rho1 = tomography::reconstruct_qubit_dm(&rec.expectations())?;
                let rho2 = theory(d, prep)?;
                per_prep[k] = tomography::uhlmann_fidelity(&rho1, &rho2)?;
                records.push(rec);
            }
            let f_avg = per_prep.iter().sum::<f64>() / 6.0;
            Ok(FidelityPoint {
                delta: d,
                f_avg,
                per_prep,
                records,
            })
        })
        .collect()
}

/// Average fidelity against the ideal cyclic gate applied to the
/// `theory_excited` mixture.
pub fn fidelity_sweep(deltas: &[f64], cfg: &SimConfig) -> Result<Vec<FidelityPoint>> {
    check_detunings(deltas)?;
    let rho = cfg.pulse.rho();
    let p = cfg.theory_excited;
    fidelity_sweep_with(deltas, cfg, |d, prep| {
        tomography::theory_state(d, prep, p, rho)
    })
}

/// Default phase/fidelity detunings: ±2π×20 MHz in 1 MHz steps, without 0.
pub fn default_gate_detunings() -> Vec<f64> {
    (-20..=20)
        .filter(|&k| k != 0)
        .map(|k| crate::mhz(k as f64))
        .collect()
}

/// Wraps into (−π, π].
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi - TWO_PI * ((phi + PI) / TWO_PI).floor();
    if w <= -PI {
        w + TWO_PI
    } else {
        w
    }
}
