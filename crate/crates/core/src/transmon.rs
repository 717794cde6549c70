// SPDX-License-Identifier: Apache-2.0

//! N-level transmon in the frame rotating at the drive frequency, plus the
//! density-matrix state type and frame bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, C64};

/// Sign of the exponent in the drive-frame to qubit-frame rotation,
/// R = diag(exp(i·FRAME_SIGN·n·Δ·t)). With ψ_qubit = exp(iω10·N·t)·exp(−iω_D·N·t)·ψ_drive
/// the sign is negative; the phase-law regression test pins it.
pub const FRAME_SIGN: f64 = -1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    /// Number of retained levels, 2..=10.
    pub n_levels: usize,
    /// Lowest transition frequency ω10 in rad/s.
    pub omega10: f64,
    /// Anharmonicity α = ω10 − ω21 in rad/s.
    pub alpha: f64,
    /// Detuning Δ = ω_D − ω10 in rad/s.
    pub delta: f64,
}

impl Default for TransmonParams {
    fn default() -> Self {
        Self {
            n_levels: 4,
            omega10: crate::ghz(5.18),
            alpha: crate::mhz(200.0),
            delta: 0.0,
        }
    }
}

impl TransmonParams {
    pub const MAX_LEVELS: usize = 10;

    pub fn new(n_levels: usize, omega10: f64, alpha: f64, delta: f64) -> Result<Self> {
        let p = Self {
            n_levels,
            omega10,
            alpha,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    /// A two-level system with the same frequencies.
    pub fn qubit() -> Self {
        Self {
            n_levels: 2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=Self::MAX_LEVELS).contains(&self.n_levels) {
            return Err(Error::InvalidModel(format!(
                "n_levels must be in [2, {}], got {}",
                Self::MAX_LEVELS,
                self.n_levels
            )));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "anharmonicity must be >= 0, got {}",
                self.alpha
            )));
        }
        if !self.omega10.is_finite() || !self.delta.is_finite() {
            return Err(Error::InvalidModel("frequencies must be finite".into()));
        }
        Ok(())
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_levels(mut self, n_levels: usize) -> Result<Self> {
        self.n_levels = n_levels;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n_levels
    }

    /// Drive-frame energy of level n: −n·Δ − (α/2)·n·(n − 1).
    pub fn level_energy(&self, n: usize) -> f64 {
        let n = n as f64;
        -n * self.delta - 0.5 * self.alpha * n * (n - 1.0)
    }

    /// RWA Hamiltonian (rad/s) for a real envelope value: diagonal level
    /// energies and ladder couplings (Ω/2)·√(n+1) between n and n+1.
    pub fn build_drive_frame_hamiltonian(&self, envelope: f64) -> Matrix {
        let dim = self.dim();
        let mut h = Matrix::zeros(dim, dim);
        for n in 0..dim {
            h[(n, n)] = C64::new(self.level_energy(n), 0.0);
        }
        for n in 0..dim - 1 {
            let g = C64::new(0.5 * envelope * ((n + 1) as f64).sqrt(), 0.0);
            h[(n, n + 1)] = g;
            h[(n + 1, n)] = g.conj();
        }
        h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    /// Rotating at the drive frequency ω_D.
    DriveFrame,
    /// Rotating at the qubit frequency ω10.
    QubitFrame,
}

/// Density matrix tagged with the frame it is expressed in.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    rho: Matrix,
    frame: Frame,
}

impl QuantumState {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const EIGEN_TOL: f64 = 1e-10;

    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: Matrix, frame: Frame) -> Result<Self> {
        let s = Self { rho, frame };
        s.check_invariants()?;
        Ok(s)
    }

    /// Pure state |ψ⟩⟨ψ|; `psi` is normalised first.
    pub fn from_pure(psi: &[C64], frame: Frame) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState(
                "zero or non-finite state vector".into(),
            ));
        }
        let v = nalgebra::DVector::from_iterator(psi.len(), psi.iter().map(|z| z / norm));
        Ok(Self {
            rho: &v * v.adjoint(),
            frame,
        })
    }

    /// Basis state |level⟩ in the qubit frame.
    pub fn basis(dim: usize, level: usize) -> Self {
        let mut rho = Matrix::zeros(dim, dim);
        rho[(level, level)] = C64::new(1.0, 0.0);
        Self {
            rho,
            frame: Frame::QubitFrame,
        }
    }

    pub(crate) fn from_matrix_unchecked(mut rho: Matrix, frame: Frame) -> Self {
        linalg::hermitize(&mut rho);
        Self { rho, frame }
    }

    pub fn check_invariants(&self) -> Result<()> {
        let n = self.rho.nrows();
        if n == 0 || n != self.rho.ncols() {
            return Err(Error::InvalidState(
                "density matrix must be square and non-empty".into(),
            ));
        }
        let herm = linalg::hermitian_deviation(&self.rho);
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = linalg::trace(&self.rho);
        if (tr - C64::new(1.0, 0.0)).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -Self::EIGEN_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    pub fn rho(&self) -> &Matrix {
        &self.rho
    }

    pub fn into_rho(self) -> Matrix {
        self.rho
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Retags the state. The drive and qubit frames coincide at the instant
    /// the drive starts, so entering the drive frame there is a relabelling.
    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn population(&self, level: usize) -> f64 {
        self.rho[(level, level)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.population(n)).collect()
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::eigvalsh(&self.rho)[0]
    }

    /// Applies U·ρ·U†, keeping the frame tag.
    pub fn transformed(&self, u: &Matrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ok(Self::from_matrix_unchecked(
            linalg::conjugate(u, &self.rho),
            self.frame,
        ))
    }
}

/// Incoherent mixture diag(1 − p, p, 0, …) in the qubit frame.
pub fn initial_thermal_state(p_excited: f64, dim: usize) -> Result<QuantumState> {
    if !(0.0..=1.0).contains(&p_excited) {
        return Err(Error::InvalidProbability(p_excited));
    }
    if dim < 2 {
        return Err(Error::InvalidModel(format!(
            "dimension must be >= 2, got {dim}"
        )));
    }
    let mut rho = Matrix::zeros(dim, dim);
    rho[(0, 0)] = C64::new(1.0 - p_excited, 0.0);
    rho[(1, 1)] = C64::new(p_excited, 0.0);
    Ok(QuantumState {
        rho,
        frame: Frame::QubitFrame,
    })
}

/// Diagonal rotation taking drive-frame operators to the qubit frame after
/// `elapsed` seconds of drive.
pub fn drive_to_qubit_rotation(dim: usize, delta: f64, elapsed: f64) -> Matrix {
    let entries: Vec<C64> = (0..dim)
        .map(|n| C64::from_polar(1.0, FRAME_SIGN * n as f64 * delta * elapsed))
        .collect();
    linalg::diag(&entries)
}

/// ρ ← R·ρ·R† with R = diag(exp(i·s·n·Δ·elapsed)).
pub fn to_qubit_frame(state: &QuantumState, delta: f64, elapsed: f64) -> Result<QuantumState> {
    if state.frame != Frame::DriveFrame {
        return Err(Error::FrameMismatch {
            expected: Frame::DriveFrame,
            found: state.frame,
        });
    }
    let r = drive_to_qubit_rotation(state.dim(), delta, elapsed);
    Ok(QuantumState::from_matrix_unchecked(
        linalg::conjugate(&r, &state.rho),
        Frame::QubitFrame,
    ))
}
