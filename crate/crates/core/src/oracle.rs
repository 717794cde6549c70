// SPDX-License-Identifier: Apache-2.0

//! Closed-form Rosen–Zener results for the sech pulse Ω(t) = Ω0·sech(ρt)
//! over an infinite window, in the rotating-frame amplitude convention of
//! [`crate::pulseshape`].

use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RzParams {
    pub omega0: f64,
    pub rho: f64,
    pub delta: f64,
}

impl RzParams {
    pub fn new(omega0: f64, rho: f64, delta: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidPulse(format!(
                "bandwidth must be positive, got {rho}"
            )));
        }
        Ok(Self { omega0, rho, delta })
    }
}

/// Relative phase φ = 4·atan(ρ/Δ) of |1⟩ against |0⟩ after the n = 1 cyclic
/// pulse. Lies in (0, 2π) for Δ > 0 and (−2π, 0) for Δ < 0.
pub fn sech_phase(rho: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::SingularDetuning);
    }
    Ok(4.0 * (rho / delta).atan())
}

/// Transition probability out of |0⟩:
/// P = sin²(π·Ω0/(2ρ)) · sech²(π·Δ/(2ρ)).
pub fn rz_transition_probability(p: &RzParams) -> f64 {
    let area_half = PI * p.omega0 / (2.0 * p.rho);
    let sech = 1.0 / (PI * p.delta / (2.0 * p.rho)).cosh();
    (area_half.sin() * sech).powi(2)
}

/// Ideal n = 1 gate, diag(e^{−iφ/2}, e^{+iφ/2}) with φ = [`sech_phase`]; it
/// maps a|0⟩ + b|1⟩ to a|0⟩ + b·e^{iφ}|1⟩ up to a global phase.
pub fn rz_2pi_propagator(rho: f64, delta: f64) -> Result<Matrix2<C64>> {
    let phi = sech_phase(rho, delta)?;
    Ok(Matrix2::new(
        C64::from_polar(1.0, -0.5 * phi),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::from_polar(1.0, 0.5 * phi),
    ))
}
