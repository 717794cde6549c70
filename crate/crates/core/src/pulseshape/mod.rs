// SPDX-License-Identifier: Apache-2.0

//! Drive envelopes, their digitized samples and amplitude calibration.
//!
//! Amplitudes follow the rotating-frame convention: `omega0` is the peak of
//! the Rabi envelope Ω(t) that enters the two-level Hamiltonian as
//! (Ω(t)/2)(|0⟩⟨1| + |1⟩⟨0|). In this convention a sech pulse of bandwidth ρ
//! has area π·Ω0/ρ and is cyclic for Ω0 = 2nρ.

mod calibrate;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use calibrate::calibrate_amplitude;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Sech,
    Gaussian,
    Square,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Sech, Shape::Gaussian, Shape::Square];

    pub fn as_str(&self) -> &'static str {
        match self {
            Shape::Sech => "sech",
            Shape::Gaussian => "gaussian",
            Shape::Square => "square",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sech" => Ok(Shape::Sech),
            "gaussian" | "gauss" => Ok(Shape::Gaussian),
            "square" => Ok(Shape::Square),
            other => Err(Error::InvalidPulse(format!(
                "unknown pulse shape `{other}`"
            ))),
        }
    }
}

/// Parameters of one drive pulse centred at t = 0.
///
/// The bandwidth ρ is derived from the time scale as ρ = π/(2σ), for every
/// shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub shape: Shape,
    /// Peak Rabi rate in rad/s.
    pub omega0: f64,
    /// Time scale σ in seconds.
    pub sigma: f64,
    /// Half-window in units of σ.
    pub window_sigmas: f64,
    /// AWG sample period in seconds.
    pub sample_period: f64,
    /// Quantizer resolution; 0 disables quantization.
    pub bit_depth: u32,
}

impl PulseSpec {
    pub const DEFAULT_WINDOW_SIGMAS: f64 = 4.0;
    pub const DEFAULT_SAMPLE_PERIOD: f64 = 1e-9;
    pub const DEFAULT_BIT_DEPTH: u32 = 8;
    pub const MAX_BIT_DEPTH: u32 = 24;

    /// A pulse with the default ±4σ window, 1 ns sampling and 8-bit codes.
    pub fn new(shape: Shape, sigma: f64, omega0: f64) -> Result<Self> {
        let spec = Self {
            shape,
            omega0,
            sigma,
            window_sigmas: Self::DEFAULT_WINDOW_SIGMAS,
            sample_period: Self::DEFAULT_SAMPLE_PERIOD,
            bit_depth: Self::DEFAULT_BIT_DEPTH,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same as [`PulseSpec::new`] with σ = π/(2ρ).
    pub fn from_bandwidth(shape: Shape, rho: f64, omega0: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidPulse(format!(
                "bandwidth must be positive, got {rho}"
            )));
        }
        Self::new(shape, FRAC_PI_2 / rho, omega0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidPulse(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("sigma", self.sigma)?;
        positive("window_sigmas", self.window_sigmas)?;
        positive("sample_period", self.sample_period)?;
        if !(self.omega0.is_finite() && self.omega0 >= 0.0) {
            return Err(Error::InvalidPulse(format!(
                "omega0 must be non-negative, got {}",
                self.omega0
            )));
        }
        if self.bit_depth > Self::MAX_BIT_DEPTH {
            return Err(Error::InvalidPulse(format!(
                "bit depth {} exceeds {}",
                self.bit_depth,
                Self::MAX_BIT_DEPTH
            )));
        }
        Ok(())
    }

    pub fn with_amplitude(mut self, omega0: f64) -> Result<Self> {
        self.omega0 = omega0;
        self.validate()?;
        Ok(self)
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }

    pub fn with_window_sigmas(mut self, w: f64) -> Result<Self> {
        self.window_sigmas = w;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sample_period(mut self, dt: f64) -> Result<Self> {
        self.sample_period = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn with_bit_depth(mut self, bits: u32) -> Result<Self> {
        self.bit_depth = bits;
        self.validate()?;
        Ok(self)
    }

    /// Bandwidth ρ = π/(2σ) in rad/s.
    pub fn rho(&self) -> f64 {
        FRAC_PI_2 / self.sigma
    }

    /// Half-width of the window, window_sigmas·σ, in seconds.
    pub fn half_window(&self) -> f64 {
        self.window_sigmas * self.sigma
    }

    /// Envelope value Ω(t) in rad/s; zero outside ±window_sigmas·σ.
    pub fn eval_envelope(&self, t: f64) -> f64 {
        // The relative slack keeps grid points that land on ±wσ up to
        // rounding inside the window.
        if t.abs() > self.half_window() * (1.0 + 1e-12) {
            return 0.0;
        }
        match self.shape {
            Shape::Sech => self.omega0 / (self.rho() * t).cosh(),
            Shape::Gaussian => self.omega0 * (-t * t / (2.0 * self.sigma * self.sigma)).exp(),
            Shape::Square => self.omega0,
        }
    }

    /// Number of grid points, floor(2wσ/dt) + 1.
    pub fn sample_count(&self) -> usize {
        let intervals = 2.0 * self.half_window() / self.sample_period;
        (intervals + 1e-9).floor() as usize + 1
    }

    /// Samples the envelope on the uniform grid t_k = −wσ + k·dt and applies
    /// the quantizer when `bit_depth > 0`.
    pub fn sample_waveform(&self) -> Result<SampledWaveform> {
        self.validate()?;
        if self.sample_period >= self.sigma {
            return Err(Error::Undersampled {
                sample_period: self.sample_period,
                sigma: self.sigma,
            });
        }
        let t0 = -self.half_window();
        let samples = (0..self.sample_count())
            .map(|k| {
                let x = self.eval_envelope(t0 + k as f64 * self.sample_period);
                quantize(x, self.omega0, self.bit_depth)
            })
            .collect();
        Ok(SampledWaveform {
            t0,
            dt: self.sample_period,
            samples,
            quantized: self.bit_depth > 0,
            spec: *self,
        })
    }

    /// Time integral of the envelope over the window, by composite Simpson
    /// quadrature. For a square pulse this is the rectangle area.
    pub fn pulse_area(&self) -> f64 {
        const INTERVALS: usize = 4096;
        let a = -self.half_window();
        let h = 2.0 * self.half_window() / INTERVALS as f64;
        // Evaluate strictly inside the window so the square pulse's edges
        // are not double counted by the cutoff test.
        let f = |k: usize| {
            let t = if k == 0 {
                a
            } else if k == INTERVALS {
                -a
            } else {
                a + k as f64 * h
            };
            self.eval_envelope(t)
        };
        let mut sum = f(0) + f(INTERVALS);
        for k in 1..INTERVALS {
            sum += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k);
        }
        sum * h / 3.0
    }

    /// Area of the same pulse over an infinite window, where a closed form
    /// exists (sech: π·Ω0/ρ; Gaussian: √(2π)·σ·Ω0). Square pulses have no
    /// infinite-window limit.
    pub fn untruncated_area(&self) -> Option<f64> {
        match self.shape {
            Shape::Sech => Some(PI * self.omega0 / self.rho()),
            Shape::Gaussian => Some((2.0 * PI).sqrt() * self.sigma * self.omega0),
            Shape::Square => None,
        }
    }
}

/// Round-to-nearest onto codes 0..2^b − 1 spanning [0, full_scale].
pub fn quantize(x: f64, full_scale: f64, bit_depth: u32) -> f64 {
    if bit_depth == 0 || full_scale == 0.0 {
        return x;
    }
    let levels = ((1u64 << bit_depth) - 1) as f64;
    (x / full_scale * levels).round() / levels * full_scale
}

/// A digitized envelope. Sample k is held for one sample period centred on
/// t0 + k·dt, so the waveform spans `len()·dt` seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledWaveform {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
    pub quantized: bool,
    /// The pulse this waveform was sampled from.
    pub spec: PulseSpec,
}

impl SampledWaveform {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Start of the first hold interval.
    pub fn start(&self) -> f64 {
        self.t0 - 0.5 * self.dt
    }

    /// Total evolution time covered by the held samples.
    pub fn duration(&self) -> f64 {
        self.len() as f64 * self.dt
    }

    /// Writes `time_s,rabi_rate_rad_per_s` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time_s", "rabi_rate_rad_per_s"])?;
        for (k, s) in self.samples.iter().enumerate() {
            w.write_record([self.time(k).to_string(), s.to_string()])?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}
