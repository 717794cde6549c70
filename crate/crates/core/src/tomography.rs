// SPDX-License-Identifier: Apache-2.0

//! State preparation, Pauli tomography of the qubit block, Bloch angles and
//! Uhlmann fidelity for the sech phase gate.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::config::{PrepMode, SimConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, C64};
use crate::oracle;
use crate::propagator;
use crate::pulseshape::Shape;
use crate::transmon::{self, initial_thermal_state, Frame, QuantumState};

pub type Qubit = Matrix2<C64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// The six preparation rotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrepLabel {
    YMinusHalfPi,
    YPlusHalfPi,
    XPlusHalfPi,
    XMinusHalfPi,
    XPi,
    Identity,
}

impl PrepLabel {
    pub const ALL: [PrepLabel; 6] = [
        PrepLabel::YMinusHalfPi,
        PrepLabel::YPlusHalfPi,
        PrepLabel::XPlusHalfPi,
        PrepLabel::XMinusHalfPi,
        PrepLabel::XPi,
        PrepLabel::Identity,
    ];

    /// Rotation axis and signed angle, `None` for the identity.
    pub fn rotation(&self) -> Option<(Axis, f64)> {
        match self {
            PrepLabel::YMinusHalfPi => Some((Axis::Y, -FRAC_PI_2)),
            PrepLabel::YPlusHalfPi => Some((Axis::Y, FRAC_PI_2)),
            PrepLabel::XPlusHalfPi => Some((Axis::X, FRAC_PI_2)),
            PrepLabel::XMinusHalfPi => Some((Axis::X, -FRAC_PI_2)),
            PrepLabel::XPi => Some((Axis::X, PI)),
            PrepLabel::Identity => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PrepLabel::YMinusHalfPi => "Y-pi/2",
            PrepLabel::YPlusHalfPi => "Y+pi/2",
            PrepLabel::XPlusHalfPi => "X+pi/2",
            PrepLabel::XMinusHalfPi => "X-pi/2",
            PrepLabel::XPi => "X+pi",
            PrepLabel::Identity => "I",
        }
    }

    /// Ideal 2×2 rotation exp(−iθσ/2).
    pub fn qubit_unitary(&self) -> Qubit {
        match self.rotation() {
            None => Qubit::identity(),
            Some((axis, angle)) => qubit_rotation(axis, angle),
        }
    }
}

impl fmt::Display for PrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrepLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PrepLabel::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::NonPhysical(format!("unknown preparation `{s}`")))
    }
}

pub fn pauli_x() -> Qubit {
    Qubit::new(
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
    )
}

pub fn pauli_y() -> Qubit {
    Qubit::new(
        C64::new(0.0, 0.0),
        C64::new(0.0, -1.0),
        C64::new(0.0, 1.0),
        C64::new(0.0, 0.0),
    )
}

pub fn pauli_z() -> Qubit {
    Qubit::new(
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(-1.0, 0.0),
    )
}

pub fn qubit_rotation(axis: Axis, angle: f64) -> Qubit {
    let sigma = match axis {
        Axis::X => pauli_x(),
        Axis::Y => pauli_y(),
    };
    Qubit::identity() * C64::new((angle / 2.0).cos(), 0.0)
        - sigma * C64::new(0.0, (angle / 2.0).sin())
}

fn require_qubit_frame(state: &QuantumState) -> Result<()> {
    if state.frame() != Frame::QubitFrame {
        return Err(Error::FrameMismatch {
            expected: Frame::QubitFrame,
            found: state.frame(),
        });
    }
    Ok(())
}

/// Applies the ideal preparation rotation on the {|0⟩, |1⟩} block,
/// identity on higher levels.
pub fn prepare(label: PrepLabel, rho_init: &QuantumState) -> Result<QuantumState> {
    require_qubit_frame(rho_init)?;
    let u = linalg::embed_qubit(&label.qubit_unitary(), rho_init.dim());
    rho_init.transformed(&u)
}

/// Preparation by a resonant sech pulse with the config's time scale and
/// digitization. Axis and sign are set by the drive phase, which acts as
/// conjugation by diag(e^{iϕn}).
pub fn prepare_simulated(
    label: PrepLabel,
    rho_init: &QuantumState,
    cfg: &SimConfig,
) -> Result<QuantumState> {
    require_qubit_frame(rho_init)?;
    let Some((axis, angle)) = label.rotation() else {
        return Ok(rho_init.clone());
    };
    let template = cfg.pulse.with_shape(Shape::Sech).with_amplitude(1.0)?;
    let pulse = template.with_amplitude(angle.abs() / template.pulse_area())?;
    let waveform = pulse.sample_waveform()?;
    let params = cfg.model.with_delta(0.0);
    let u_x = propagator::propagator(&waveform, &params, &cfg.evolution)?;
    let drive_phase = match (axis, angle >= 0.0) {
        (Axis::X, true) => 0.0,
        (Axis::X, false) => PI,
        (Axis::Y, true) => FRAC_PI_2,
        (Axis::Y, false) => -FRAC_PI_2,
    };
    let z: Vec<C64> = (0..rho_init.dim())
        .map(|n| C64::from_polar(1.0, drive_phase * n as f64))
        .collect();
    let z = linalg::diag(&z);
    let u = &z * u_x * z.adjoint();
    rho_init.transformed(&u)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliExpectations {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Population outside the qubit block, 1 − ρ00 − ρ11.
    pub leakage: f64,
}

impl PauliExpectations {
    pub fn bloch_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Pauli expectations on the {|0⟩, |1⟩} block of a qubit-frame state.
pub fn measure_pauli(state: &QuantumState) -> Result<PauliExpectations> {
    require_qubit_frame(state)?;
    let r = state.rho();
    let rho01 = r[(0, 1)];
    Ok(PauliExpectations {
        x: 2.0 * rho01.re,
        y: -2.0 * rho01.im,
        z: r[(0, 0)].re - r[(1, 1)].re,
        leakage: 1.0 - r[(0, 0)].re - r[(1, 1)].re,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochAngles {
    /// Polar angle from +z, in [0, π].
    pub theta: f64,
    /// Azimuth in (−π, π].
    pub phi: f64,
}

/// Tolerance below which a Bloch vector has no direction.
pub const DEGENERATE_NORM: f64 = 1e-6;

pub fn bloch_angles(x: f64, y: f64, z: f64) -> Result<BlochAngles> {
    let r = (x * x + y * y + z * z).sqrt();
    if !(r > DEGENERATE_NORM) {
        return Err(Error::DegenerateBlochVector(r));
    }
    let theta = (z / r).clamp(-1.0, 1.0).acos();
    let transverse = (x * x + y * y).sqrt();
    let phi = if transverse <= 1e-12 * r {
        0.0
    } else {
        let p = y.atan2(x);
        if p <= -PI {
            PI
        } else {
            p
        }
    };
    Ok(BlochAngles { theta, phi })
}

/// ρ = (p·I + x·σx + y·σy + z·σz)/(2p) with p = 1 − leakage.
pub fn reconstruct_qubit_dm(e: &PauliExpectations) -> Result<Qubit> {
    let p = 1.0 - e.leakage;
    if !(p > 0.0 && p <= 1.0 + 1e-12) {
        return Err(Error::NonPhysical(format!(
            "qubit-block population {p} outside (0, 1]"
        )));
    }
    let r = e.bloch_norm();
    if r > p + 1e-9 {
        return Err(Error::NonPhysical(format!(
            "Bloch norm {r} exceeds qubit population {p}"
        )));
    }
    // Clip the smaller eigenvalue at zero.
    let shrink = if r > p { p / r } else { 1.0 };
    let (x, y, z) = (e.x * shrink, e.y * shrink, e.z * shrink);
    let m = Qubit::identity() * C64::new(p, 0.0)
        + pauli_x() * C64::new(x, 0.0)
        + pauli_y() * C64::new(y, 0.0)
        + pauli_z() * C64::new(z, 0.0);
    Ok(m / C64::new(2.0 * p, 0.0))
}

fn check_density_matrix(m: &Qubit) -> Result<()> {
    let herm = (m[(0, 1)] - m[(1, 0)].conj())
        .norm()
        .max(m[(0, 0)].im.abs())
        .max(m[(1, 1)].im.abs());
    if herm > 1e-9 {
        return Err(Error::NotDensityMatrix(format!(
            "not Hermitian (deviation {herm:e})"
        )));
    }
    let tr = m[(0, 0)].re + m[(1, 1)].re;
    if (tr - 1.0).abs() > 1e-9 {
        return Err(Error::NotDensityMatrix(format!("trace {tr}")));
    }
    let det = m[(0, 0)].re * m[(1, 1)].re - m[(0, 1)].norm_sqr();
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let lmin = 0.5 * (tr - disc);
    if lmin < -1e-9 {
        return Err(Error::NotDensityMatrix(format!(
            "negative eigenvalue {lmin:e}"
        )));
    }
    Ok(())
}

/// √M = (M + √det(M)·I)/√(tr M + 2√det(M)) for a 2×2 PSD matrix.
pub fn sqrtm_psd_2x2(m: &Qubit) -> Qubit {
    let det = m.determinant().re.max(0.0);
    let s = det.sqrt();
    let t = (m.trace().re + 2.0 * s).max(0.0).sqrt();
    if t == 0.0 {
        return Qubit::zeros();
    }
    (m + Qubit::identity() * C64::new(s, 0.0)) / C64::new(t, 0.0)
}

/// Determinant with rounding noise of rank-deficient inputs set to zero. F
/// depends on √det, so an O(ε) determinant would otherwise move F by O(√ε).
fn settled_det(m: &Qubit) -> f64 {
    let det = m.determinant().re;
    let tr = m.trace().re;
    if det <= 64.0 * f64::EPSILON * tr * tr {
        0.0
    } else {
        det
    }
}

/// F = Tr √(√ρ1 · ρ2 · √ρ1), clamped to [0, 1].
pub fn uhlmann_fidelity(rho1: &Qubit, rho2: &Qubit) -> Result<f64> {
    check_density_matrix(rho1)?;
    check_density_matrix(rho2)?;
    // Tr √M = √(tr M + 2√det M) with M = √ρ1·ρ2·√ρ1. Using det M = det ρ1·det ρ2
    // and tr M = tr(ρ1·ρ2) avoids cancellation when either input is pure.
    let det = settled_det(rho1) * settled_det(rho2);
    let tr = (rho1 * rho2).trace().re;
    Ok((tr + 2.0 * det.sqrt()).max(0.0).sqrt().clamp(0.0, 1.0))
}

/// One point of the gate tomography. `theta`/`phi` are NaN when the Bloch
/// vector is degenerate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TomographyRecord {
    pub delta: f64,
    pub prep: PrepLabel,
    pub exp_x: f64,
    pub exp_y: f64,
    pub exp_z: f64,
    pub leakage: f64,
    pub theta: f64,
    pub phi: f64,
}

impl TomographyRecord {
    pub fn expectations(&self) -> PauliExpectations {
        PauliExpectations {
            x: self.exp_x,
            y: self.exp_y,
            z: self.exp_z,
            leakage: self.leakage,
        }
    }
}

pub const RECORD_CSV_HEADER: [&str; 8] = [
    "delta_hz",
    "prep",
    "exp_x",
    "exp_y",
    "exp_z",
    "leakage",
    "theta_rad",
    "phi_rad",
];

pub fn write_records_csv<W: Write>(records: &[TomographyRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_CSV_HEADER)?;
    for r in records {
        w.write_record([
            (r.delta / crate::TWO_PI).to_string(),
            r.prep.to_string(),
            r.exp_x.to_string(),
            r.exp_y.to_string(),
            r.exp_z.to_string(),
            r.leakage.to_string(),
            r.theta.to_string(),
            r.phi.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

/// Qubit-frame state after preparation and the gate pulse at detuning Δ.
pub fn zgate_final_state(delta: f64, prep: PrepLabel, cfg: &SimConfig) -> Result<QuantumState> {
    cfg.validate()?;
    let dim = cfg.model.dim();
    let init = initial_thermal_state(cfg.thermal_excited, dim)?;
    let prepared = match cfg.prep_mode {
        PrepMode::Ideal => prepare(prep, &init)?,
        PrepMode::SimulatedSech => prepare_simulated(prep, &init, cfg)?,
    };
    let waveform = cfg.pulse.sample_waveform()?;
    let params = cfg.model.with_delta(delta);
    let driven = cfg.evolve(&prepared.with_frame(Frame::DriveFrame), &waveform, &params)?;
    transmon::to_qubit_frame(&driven, delta, waveform.duration())
}

/// Prepare, apply the gate pulse at detuning Δ, return to the qubit frame
/// and measure.
pub fn zgate_tomography(delta: f64, prep: PrepLabel, cfg: &SimConfig) -> Result<TomographyRecord> {
    let state = zgate_final_state(delta, prep, cfg)?;
    let e = measure_pauli(&state)?;
    let (theta, phi) = match bloch_angles(e.x, e.y, e.z) {
        Ok(a) => (a.theta, a.phi),
        Err(Error::DegenerateBlochVector(_)) => (f64::NAN, f64::NAN),
        Err(other) => return Err(other),
    };
    Ok(TomographyRecord {
        delta,
        prep,
        exp_x: e.x,
        exp_y: e.y,
        exp_z: e.z,
        leakage: e.leakage,
        theta,
        phi,
    })
}

/// Theory state: the `theory_excited` mixture, ideally prepared, then the
/// ideal cyclic gate at Δ.
pub fn theory_state(delta: f64, prep: PrepLabel, theory_excited: f64, rho: f64) -> Result<Qubit> {
    if !(0.0..=1.0).contains(&theory_excited) {
        return Err(Error::InvalidProbability(theory_excited));
    }
    let init = Qubit::new(
        C64::new(1.0 - theory_excited, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(theory_excited, 0.0),
    );
    let p = prep.qubit_unitary();
    let g = oracle::rz_2pi_propagator(rho, delta)? * p;
    Ok(g * init * g.adjoint())
}

/// Top-left 2×2 block of a state, renormalised.
pub fn qubit_block(state: &QuantumState) -> Qubit {
    let r: &Matrix = state.rho();
    let m = Qubit::new(r[(0, 0)], r[(0, 1)], r[(1, 0)], r[(1, 1)]);
    let p = (r[(0, 0)] + r[(1, 1)]).re;
    m / C64::new(p, 0.0)
}
