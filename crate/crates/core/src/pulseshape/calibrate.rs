// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::TAU;

use super::{PulseSpec, Shape};
use crate::error::{Error, Result};
use crate::propagator::{evolve, EvolutionConfig};
use crate::scans::{fit_cyclic_minimum, linspace};
use crate::transmon::{Frame, QuantumState, TransmonParams};

const COARSE_POINTS: usize = 37;
const REFINE_HALF: i32 = 6;

fn excited_probability(
    spec: &PulseSpec,
    amplitude: f64,
    model: &TransmonParams,
    evolution: &EvolutionConfig,
) -> Result<f64> {
    let waveform = spec.with_amplitude(amplitude)?.sample_waveform()?;
    let ground = QuantumState::basis(model.dim(), 0).with_frame(Frame::DriveFrame);
    let out = evolve(&ground, &waveform, &model.with_delta(0.0), evolution)?;
    Ok(1.0 - out.population(0))
}

fn fit_on(
    spec: &PulseSpec,
    amps: &[f64],
    bracket: (f64, f64),
    model: &TransmonParams,
    evolution: &EvolutionConfig,
) -> Result<f64> {
    let cut = amps
        .iter()
        .map(|&a| excited_probability(spec, a, model, evolution).map(|p| (a, p)))
        .collect::<Result<Vec<_>>>()?;
    fit_cyclic_minimum(&cut, bracket)
        .map(|f| f.vertex)
        .map_err(|e| Error::Calibration(format!("{}: {e}", spec.shape)))
}

/// Peak Rabi rate of the `n`-th cyclic pulse on resonance.
///
/// For sech this is the closed form 2nρ. Gaussian and square pulses start
/// from the amplitude whose windowed area is 2πn and refine the return
/// minimum of the ground state by two rounds of quadratic fits.
pub fn calibrate_amplitude(
    spec: &PulseSpec,
    n: u32,
    model: &TransmonParams,
    evolution: &EvolutionConfig,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Calibration("cycle count must be at least 1".into()));
    }
    spec.validate()?;
    model.validate()?;
    if spec.shape == Shape::Sech {
        return Ok(2.0 * n as f64 * spec.rho());
    }
    let unit = spec.with_amplitude(1.0)?.pulse_area();
    let nominal = TAU * n as f64 / unit;
    let (lo, hi) = ((n as f64 - 0.5) * nominal, (n as f64 + 0.5) * nominal);
    let h = (hi - lo) / (COARSE_POINTS - 1) as f64;
    let coarse = linspace(lo - 2.0 * h, hi + 2.0 * h, COARSE_POINTS + 4);
    let first = fit_on(spec, &coarse, (lo, hi), model, evolution)?;

    let step = h / 8.0;
    let fine: Vec<f64> = (-REFINE_HALF..=REFINE_HALF)
        .map(|k| first + k as f64 * step)
        .collect();
    let span = REFINE_HALF as f64 * step;
    fit_on(spec, &fine, (first - span, first + span), model, evolution)
}
