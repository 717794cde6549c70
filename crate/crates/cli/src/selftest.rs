// SPDX-License-Identifier: Apache-2.0

//! Simulation-versus-closed-form checks run by `sechgate selftest`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use serde::Serialize;

use sechgate::tomography::{self, PrepLabel, Qubit};
use sechgate::{
    evolve, evolve_lindblad, initial_thermal_state, linalg, mhz, propagator,
    rz_transition_probability, sech_phase, DissipationConfig, EvolutionConfig, Frame, PulseSpec,
    QuantumState, RzParams, Shape, SimConfig, TransmonParams, C64,
};

use crate::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    /// Largest acceptable value.
    pub bound: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.bound
    }

    pub fn line(&self) -> String {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        format!(
            "{tag} {}: {:.3e} (bound {:.1e})",
            self.name, self.value, self.bound
        )
    }
}

pub fn write_csv<W: Write>(checks: &[Check], w: W) -> sechgate::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["check", "value", "bound", "passed"])?;
    for c in checks {
        out.write_record([
            c.name.to_string(),
            c.value.to_string(),
            c.bound.to_string(),
            c.passed().to_string(),
        ])?;
    }
    out.flush().map_err(|e| sechgate::Error::Csv(e.to_string()))
}

fn windowed_sech(sigma: f64, omega0: f64, window: f64) -> sechgate::Result<PulseSpec> {
    PulseSpec::new(Shape::Sech, sigma, omega0)?
        .with_window_sigmas(window)?
        .with_bit_depth(0)
}

fn excited_from_ground(
    spec: &PulseSpec,
    delta: f64,
    evolution: &EvolutionConfig,
) -> sechgate::Result<f64> {
    let ground = QuantumState::basis(2, 0).with_frame(Frame::DriveFrame);
    let out = evolve(
        &ground,
        &spec.sample_waveform()?,
        &TransmonParams::qubit().with_delta(delta),
        evolution,
    )?;
    Ok(out.population(1))
}

fn wrapped(x: f64) -> f64 {
    use std::f64::consts::PI;
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// Closed-form checks on the two-level model, using the configured σ, plus
/// invariants of the configured gate.
pub fn run_checks(cfg: &ExperimentConfig) -> sechgate::Result<Vec<Check>> {
    let sigma = cfg.sim.pulse.sigma;
    let rho = std::f64::consts::FRAC_PI_2 / sigma;
    let rk = EvolutionConfig::adaptive(1e-12);
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for a in [0.25, 0.5, 1.0, 2.0] {
        for d in [0.0, 3.0, 7.0, 10.0, 15.0] {
            let spec = windowed_sech(sigma, a * rho, 12.0)?;
            let exact = rz_transition_probability(&RzParams::new(a * rho, rho, mhz(d))?);
            worst = worst.max((excited_from_ground(&spec, mhz(d), &rk)? - exact).abs());
        }
    }
    checks.push(Check {
        name: "transition probability vs closed form",
        value: worst,
        bound: 1e-8,
    });

    let mut worst = 0.0f64;
    for n in 1..=3 {
        let spec = windowed_sech(sigma, 2.0 * n as f64 * rho, 12.0)?;
        for d in [0.0, 3.0, 7.0, 10.0] {
            worst = worst.max(excited_from_ground(&spec, mhz(d), &rk)?);
        }
    }
    checks.push(Check {
        name: "cyclic sech return (n = 1..3)",
        value: worst,
        bound: 1e-6,
    });

    let mut ideal = SimConfig::ideal_qubit();
    ideal.pulse = windowed_sech(sigma, 2.0 * rho, 8.0)?;
    let mut worst = 0.0f64;
    for d in [-10.0, -5.0, -2.0, 2.0, 5.0, 10.0] {
        let rec = tomography::zgate_tomography(mhz(d), PrepLabel::YPlusHalfPi, &ideal)?;
        worst = worst.max(wrapped(rec.phi - sech_phase(rho, mhz(d))?).abs());
    }
    checks.push(Check {
        name: "two-level gate phase vs 4 atan(rho/delta)",
        value: worst,
        bound: 1e-3,
    });

    let gate = cfg.gate_config()?;
    let wf = gate.pulse.sample_waveform()?;
    let init = tomography::prepare(
        PrepLabel::YPlusHalfPi,
        &initial_thermal_state(gate.thermal_excited, gate.model.dim())?,
    )?
    .with_frame(Frame::DriveFrame);
    let (mut unitarity, mut trace, mut negativity) = (0.0f64, 0.0f64, 0.0f64);
    for d in [-15.0, -5.0, 0.0, 5.0, 15.0] {
        let params = gate.model.with_delta(mhz(d));
        unitarity = unitarity.max(linalg::unitarity_deviation(&propagator(
            &wf,
            &params,
            &gate.evolution,
        )?));
        let out = gate.evolve(&init, &wf, &params)?;
        trace = trace.max((linalg::trace(out.rho()) - C64::from(1.0)).norm());
        negativity = negativity.max(-out.min_eigenvalue());
    }
    checks.push(Check {
        name: "configured gate unitarity",
        value: unitarity,
        bound: 1e-9,
    });
    checks.push(Check {
        name: "configured gate trace",
        value: trace,
        bound: 1e-9,
    });
    checks.push(Check {
        name: "configured gate positivity",
        value: negativity.max(0.0),
        bound: 1e-9,
    });

    let diss = DissipationConfig {
        enabled: true,
        ..gate.dissipation
    };
    let idle = PulseSpec::new(Shape::Sech, sigma, 0.0)?
        .with_window_sigmas(40.0)?
        .sample_waveform()?;
    let t = idle.duration();
    let excited = QuantumState::basis(2, 1).with_frame(Frame::DriveFrame);
    let decayed = evolve_lindblad(
        &excited,
        &idle,
        &TransmonParams::qubit(),
        &diss,
        &EvolutionConfig::adaptive(1e-10),
    )?;
    checks.push(Check {
        name: "free decay vs exp(-T/T1)",
        value: (decayed.population(1) - (-t / diss.t1).exp()).abs(),
        bound: 1e-6,
    });
    let plus = QuantumState::from_pure(
        &[C64::from(FRAC_1_SQRT_2), C64::from(FRAC_1_SQRT_2)],
        Frame::DriveFrame,
    )?;
    let dephased = evolve_lindblad(
        &plus,
        &idle,
        &TransmonParams::qubit(),
        &diss,
        &EvolutionConfig::adaptive(1e-10),
    )?;
    checks.push(Check {
        name: "coherence vs 0.5 exp(-T/T2*)",
        value: (dephased.rho()[(0, 1)].norm() - 0.5 * (-t / diss.t2_star).exp()).abs(),
        bound: 1e-6,
    });

    let ground = Qubit::new(
        C64::from(1.0),
        C64::from(0.0),
        C64::from(0.0),
        C64::from(0.0),
    );
    let mixed = Qubit::identity() * C64::from(0.5);
    checks.push(Check {
        name: "fidelity of |0> against I/2",
        value: (tomography::uhlmann_fidelity(&ground, &mixed)? - FRAC_1_SQRT_2).abs(),
        bound: 1e-12,
    });
    Ok(checks)
}
