// SPDX-License-Identifier: Apache-2.0

//! Pulse-level simulation of single-qubit phase gates driven by
//! hyperbolic-secant microwave pulses on a multi-level transmon.
//!
//! The crate is organised bottom-up:
//!
//! * [`pulseshape`] defines sech, Gaussian and square envelopes, their
//!   digitized samples and amplitude calibration.
//! * [`transmon`] builds the rotating-frame Hamiltonian of an N-level
//!   transmon and handles frame bookkeeping.
//! * [`propagator`] evolves density matrices, unitarily or under a
//!   Lindblad master equation.
//! * [`oracle`] holds the closed-form Rosen–Zener results.
//! * [`tomography`] prepares input states, measures Pauli expectations and
//!   computes Uhlmann fidelities.
//! * [`scans`] drives grids of simulations: Rabi maps, cyclic-amplitude
//!   curves, phase curves and fidelity sweeps.
//!
//! All frequencies are angular (rad/s) and all times are in seconds.

// NaN-rejecting `!(x > 0.0)` guards are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod linalg;
mod ode;
pub mod oracle;
pub mod propagator;
pub mod pulseshape;
pub mod scans;
pub mod tomography;
pub mod transmon;

pub use config::{PrepMode, SimConfig};
pub use error::{Error, Result};
pub use linalg::{Matrix, C64};
pub use oracle::{rz_2pi_propagator, rz_transition_probability, sech_phase, RzParams};
pub use propagator::{
    evolve, evolve_lindblad, matrix_exp_skew_hermitian, propagator, DissipationConfig,
    EvolutionConfig, Method,
};
pub use pulseshape::{calibrate_amplitude, PulseSpec, SampledWaveform, Shape};
pub use scans::{CyclicCurve, FidelityPoint, LineCut, ScanGrid, ScanResult};
pub use tomography::{PauliExpectations, PrepLabel, TomographyRecord};
pub use transmon::{initial_thermal_state, to_qubit_frame, Frame, QuantumState, TransmonParams};

/// 2π, for converting between cycles and radians.
pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Converts a frequency in MHz to an angular frequency in rad/s.
pub fn mhz(f: f64) -> f64 {
    TWO_PI * f * 1e6
}

/// Converts a frequency in GHz to an angular frequency in rad/s.
pub fn ghz(f: f64) -> f64 {
    TWO_PI * f * 1e9
}
