// SPDX-License-Identifier: Apache-2.0

//! Simulation settings shared by the tomography and scan drivers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::{self, DissipationConfig, EvolutionConfig};
use crate::pulseshape::{PulseSpec, SampledWaveform, Shape};
use crate::transmon::{QuantumState, TransmonParams};

/// How the tomography preparation rotations are applied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrepMode {
    /// Instantaneous ideal qubit rotations.
    #[default]
    Ideal,
    /// Resonant sech pulses sharing the gate pulse's time scale and
    /// digitization.
    SimulatedSech,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub model: TransmonParams,
    /// Gate pulse; scans override its amplitude and shape per grid point.
    pub pulse: PulseSpec,
    pub evolution: EvolutionConfig,
    pub dissipation: DissipationConfig,
    /// Excited population of the initial incoherent mixture.
    pub thermal_excited: f64,
    /// Excited population assumed when building theory states.
    pub theory_excited: f64,
    pub prep_mode: PrepMode,
}

impl Default for SimConfig {
    /// Four-level transmon, σ = 25 ns sech at Ω0 = 2ρ, ±4σ, 1 ns, 8 bits,
    /// 90/10 initial mixture and a 9 % theory mixture.
    fn default() -> Self {
        let sigma = 25e-9;
        let rho = std::f64::consts::FRAC_PI_2 / sigma;
        Self {
            model: TransmonParams::default(),
            pulse: PulseSpec::new(Shape::Sech, sigma, 2.0 * rho).expect("default pulse is valid"),
            evolution: EvolutionConfig::default(),
            dissipation: DissipationConfig::default(),
            thermal_excited: 0.10,
            theory_excited: 0.09,
            prep_mode: PrepMode::Ideal,
        }
    }
}

impl SimConfig {
    /// Two-level, unquantized, ±8σ, pure ground-state initialisation.
    pub fn ideal_qubit() -> Self {
        let base = Self::default();
        Self {
            model: TransmonParams::qubit(),
            pulse: base
                .pulse
                .with_bit_depth(0)
                .unwrap()
                .with_window_sigmas(8.0)
                .unwrap(),
            thermal_excited: 0.0,
            theory_excited: 0.0,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.pulse.validate()?;
        self.evolution.validate()?;
        self.dissipation.validate()?;
        for p in [self.thermal_excited, self.theory_excited] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
        }
        Ok(())
    }

    /// Evolves with the master equation when dissipation is enabled and
    /// unitarily otherwise.
    pub fn evolve(
        &self,
        state: &QuantumState,
        waveform: &SampledWaveform,
        params: &TransmonParams,
    ) -> Result<QuantumState> {
        if self.dissipation.enabled {
            propagator::evolve_lindblad(state, waveform, params, &self.dissipation, &self.evolution)
        } else {
            propagator::evolve(state, waveform, params, &self.evolution)
        }
    }
}
