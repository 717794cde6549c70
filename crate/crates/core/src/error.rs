// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::transmon::Frame;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error(
        "undersampled waveform: sample period {sample_period:e} s is not below sigma {sigma:e} s"
    )]
    Undersampled { sample_period: f64, sigma: f64 },
    #[error("invalid transmon parameters: {0}")]
    InvalidModel(String),
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("state is in the {found:?} frame, expected {expected:?}")]
    FrameMismatch { expected: Frame, found: Frame },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("invalid evolution config: {0}")]
    InvalidEvolution(String),
    #[error("tolerance {rel_tol:e} not achieved within {max_steps} steps")]
    ToleranceNotAchieved { rel_tol: f64, max_steps: usize },
    #[error("invalid dissipation rates: {0}")]
    InvalidRates(String),
    #[error("zero detuning: the resonant cyclic pulse has no defined phase")]
    SingularDetuning,
    #[error("Bloch vector norm {0:e} is too small to define angles")]
    DegenerateBlochVector(f64),
    #[error("non-physical tomography data: {0}")]
    NonPhysical(String),
    #[error("matrix is not a positive semidefinite unit-trace state: {0}")]
    NotDensityMatrix(String),
    #[error("invalid scan grid: {0}")]
    InvalidGrid(String),
    #[error("empty scan")]
    EmptyScan,
    #[error("no interior minimum inside [{lo:e}, {hi:e}]")]
    NoMinimum { lo: f64, hi: f64 },
    #[error("quadratic fit has non-positive curvature {0:e}")]
    NonConvexFit(f64),
    #[error("curve does not cover |delta| <= {0:e} rad/s")]
    RangeNotCovered(f64),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("csv output failed: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
