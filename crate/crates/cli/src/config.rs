// SPDX-License-Identifier: Apache-2.0

//! TOML experiment configuration. Frequencies are written in MHz/GHz
//! (cycles, not radians) and times in ns/µs; [`ConfigFile::resolve`]
//! converts everything to rad/s and seconds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sechgate::{
    calibrate_amplitude, ghz, mhz, DissipationConfig, EvolutionConfig, Method, PrepMode, PulseSpec,
    Shape, SimConfig, TransmonParams,
};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub levels: usize,
    pub qubit_frequency_ghz: f64,
    pub anharmonicity_mhz: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            levels: 4,
            qubit_frequency_ghz: 5.18,
            anharmonicity_mhz: 200.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub shape: Shape,
    pub sigma_ns: f64,
    /// Peak Rabi rate of the gate pulse, Ω0/2π. When absent the cyclic
    /// (2π-area) amplitude of the shape is used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude_mhz: Option<f64>,
    pub window_sigmas: f64,
    pub sample_period_ns: f64,
    pub bit_depth: u32,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            shape: Shape::Sech,
            sigma_ns: 25.0,
            amplitude_mhz: None,
            window_sigmas: PulseSpec::DEFAULT_WINDOW_SIGMAS,
            sample_period_ns: 1.0,
            bit_depth: PulseSpec::DEFAULT_BIT_DEPTH,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionSection {
    pub method: Method,
    pub rel_tol: f64,
    pub substeps_per_sample: usize,
    pub max_steps: usize,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        let e = EvolutionConfig::default();
        Self {
            method: e.method,
            rel_tol: e.rel_tol,
            substeps_per_sample: e.substeps_per_sample,
            max_steps: e.max_steps,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DissipationSection {
    pub enabled: bool,
    pub t1_us: f64,
    pub t2_star_us: f64,
}

impl Default for DissipationSection {
    fn default() -> Self {
        Self {
            enabled: DissipationConfig::default().enabled,
            t1_us: 8.6,
            t2_star_us: 10.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateSection {
    /// Excited population of the initial mixture used in simulations.
    pub thermal_excited: f64,
    /// Excited population assumed for the theory state in fidelities.
    pub theory_excited: f64,
    pub prep: PrepMode,
}

impl Default for StateSection {
    fn default() -> Self {
        Self {
            thermal_excited: 0.10,
            theory_excited: 0.09,
            prep: PrepMode::Ideal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Upper end of the amplitude axis in units of the shape's first-flop
    /// amplitude (2ρ for sech).
    pub amplitude_max_flops: f64,
    pub amplitude_points: usize,
    pub detuning_max_mhz: f64,
    pub detuning_points: usize,
    pub line_cuts_mhz: Vec<f64>,
    pub variation_bound_mhz: f64,
    /// Phase and fidelity sweeps: ±max in steps, Δ = 0 left out.
    pub gate_detuning_max_mhz: f64,
    pub gate_detuning_step_mhz: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            amplitude_max_flops: 3.2,
            amplitude_points: 101,
            detuning_max_mhz: 20.0,
            detuning_points: 81,
            line_cuts_mhz: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            variation_bound_mhz: 10.0,
            gate_detuning_max_mhz: 20.0,
            gate_detuning_step_mhz: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Worker threads; 0 uses every core.
    pub parallelism: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            parallelism: 0,
        }
    }
}

/// On-disk configuration, one section per component.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub model: ModelSection,
    pub pulse: PulseSection,
    pub evolution: EvolutionSection,
    pub dissipation: DissipationSection,
    pub state: StateSection,
    pub grids: GridSection,
    pub output: OutputSection,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub shape: Option<Shape>,
    pub bit_depth: Option<u32>,
    pub levels: Option<usize>,
    pub window_sigmas: Option<f64>,
    pub method: Option<Method>,
    pub parallelism: Option<usize>,
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config sections serialize")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.output.dir = v.clone();
        }
        if let Some(v) = o.shape {
            self.pulse.shape = v;
        }
        if let Some(v) = o.bit_depth {
            self.pulse.bit_depth = v;
        }
        if let Some(v) = o.levels {
            self.model.levels = v;
        }
        if let Some(v) = o.window_sigmas {
            self.pulse.window_sigmas = v;
        }
        if let Some(v) = o.method {
            self.evolution.method = v;
        }
        if let Some(v) = o.parallelism {
            self.output.parallelism = v;
        }
    }

    /// Converts to internal units and validates every component.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let p = &self.pulse;
        let sigma = p.sigma_ns / 1e9;
        let placeholder = 1.0;
        let pulse = PulseSpec::new(p.shape, sigma, p.amplitude_mhz.map_or(placeholder, mhz))
            .and_then(|s| s.with_window_sigmas(p.window_sigmas))
            .and_then(|s| s.with_sample_period(p.sample_period_ns / 1e9))
            .and_then(|s| s.with_bit_depth(p.bit_depth))
            .map_err(CliError::config)?;
        if p.sample_period_ns / 1e9 >= sigma {
            return Err(CliError::Config(format!(
                "sample period {} ns must be shorter than sigma {} ns",
                p.sample_period_ns, p.sigma_ns
            )));
        }
        let model = TransmonParams::new(
            self.model.levels,
            ghz(self.model.qubit_frequency_ghz),
            mhz(self.model.anharmonicity_mhz),
            0.0,
        )
        .map_err(CliError::config)?;
        let e = &self.evolution;
        let evolution = EvolutionConfig {
            method: e.method,
            rel_tol: e.rel_tol,
            substeps_per_sample: e.substeps_per_sample,
            max_steps: e.max_steps,
        };
        let d = &self.dissipation;
        let dissipation = DissipationConfig {
            t1: d.t1_us / 1e6,
            t2_star: d.t2_star_us / 1e6,
            enabled: d.enabled,
        };
        let sim = SimConfig {
            model,
            pulse,
            evolution,
            dissipation,
            thermal_excited: self.state.thermal_excited,
            theory_excited: self.state.theory_excited,
            prep_mode: self.state.prep,
        };
        sim.validate().map_err(CliError::config)?;
        let grids = self.grids.resolve()?;
        Ok(ExperimentConfig {
            sim,
            fixed_amplitude: p.amplitude_mhz.is_some(),
            grids,
            out_dir: self.output.dir.clone(),
            parallelism: self.output.parallelism,
        })
    }
}

/// Grid settings in rad/s.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grids {
    pub amplitude_max_flops: f64,
    pub amplitude_points: usize,
    pub detuning_max: f64,
    pub detuning_points: usize,
    pub line_cuts: Vec<f64>,
    pub variation_bound: f64,
    pub gate_detunings: Vec<f64>,
}

impl GridSection {
    fn resolve(&self) -> Result<Grids, CliError> {
        let bad = |m: &str| Err(CliError::Config(format!("grids: {m}")));
        if !(self.amplitude_max_flops > 0.0) || self.amplitude_points < 2 {
            return bad("amplitude axis needs a positive maximum and at least 2 points");
        }
        if !(self.detuning_max_mhz >= 0.0) || self.detuning_points < 1 {
            return bad("detuning axis needs a non-negative maximum and at least 1 point");
        }
        if self.detuning_max_mhz == 0.0 && self.detuning_points != 1 {
            return bad("a zero detuning span allows a single point only");
        }
        if !(self.gate_detuning_step_mhz > 0.0)
            || !(self.gate_detuning_max_mhz >= self.gate_detuning_step_mhz)
        {
            return bad("gate detuning step must be positive and no larger than the maximum");
        }
        if !(self.variation_bound_mhz > 0.0) {
            return bad("variation bound must be positive");
        }
        let steps =
            (self.gate_detuning_max_mhz / self.gate_detuning_step_mhz + 1e-9).floor() as i64;
        let gate_detunings = (-steps..=steps)
            .filter(|&k| k != 0)
            .map(|k| mhz(k as f64 * self.gate_detuning_step_mhz))
            .collect();
        Ok(Grids {
            amplitude_max_flops: self.amplitude_max_flops,
            amplitude_points: self.amplitude_points,
            detuning_max: mhz(self.detuning_max_mhz),
            detuning_points: self.detuning_points,
            line_cuts: self.line_cuts_mhz.iter().map(|&f| mhz(f)).collect(),
            variation_bound: mhz(self.variation_bound_mhz),
            gate_detunings,
        })
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub sim: SimConfig,
    /// False when the gate amplitude is the shape's calibrated cyclic value.
    pub fixed_amplitude: bool,
    pub grids: Grids,
    pub out_dir: PathBuf,
    pub parallelism: usize,
}

impl ExperimentConfig {
    /// The simulation config with the gate amplitude settled: the configured
    /// value, or the n = 1 cyclic amplitude of the configured shape.
    pub fn gate_config(&self) -> sechgate::Result<SimConfig> {
        let mut sim = self.sim;
        if !self.fixed_amplitude {
            let a = calibrate_amplitude(&sim.pulse, 1, &sim.model, &sim.evolution)?;
            sim.pulse = sim.pulse.with_amplitude(a)?;
        }
        Ok(sim)
    }

    pub fn shape(&self) -> Shape {
        self.sim.pulse.shape
    }
}
