// SPDX-License-Identifier: Apache-2.0

//! Time evolution under the drive-frame Hamiltonian.
//!
//! Two unitary paths are provided. [`Method::PiecewiseExponential`] holds
//! each digitized sample constant for one sample period and multiplies the
//! exact short-time propagators, which is what the hardware emits.
//! [`Method::AdaptiveRk`] integrates the continuous envelope with an
//! adaptive Dormand–Prince scheme and serves as the reference for the
//! digitization-free ideal. [`evolve_lindblad`] adds T1 relaxation and pure
//! dephasing.

use std::collections::hash_map::{Entry, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, C64, I};
use crate::ode::DormandPrince;
use crate::pulseshape::SampledWaveform;
use crate::transmon::{Frame, QuantumState, TransmonParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PiecewiseExponential,
    AdaptiveRk,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "piecewise-exponential" | "piecewise" => Ok(Method::PiecewiseExponential),
            "adaptive-rk" | "rk" => Ok(Method::AdaptiveRk),
            other => Err(Error::InvalidEvolution(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub method: Method,
    /// Relative tolerance of the adaptive integrator.
    pub rel_tol: f64,
    /// Sub-intervals per sample period for the piecewise path.
    pub substeps_per_sample: usize,
    /// Step budget of the adaptive integrator.
    pub max_steps: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            method: Method::PiecewiseExponential,
            rel_tol: 1e-10,
            substeps_per_sample: 1,
            max_steps: 2_000_000,
        }
    }
}

impl EvolutionConfig {
    pub fn adaptive(rel_tol: f64) -> Self {
        Self {
            method: Method::AdaptiveRk,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn piecewise(substeps_per_sample: usize) -> Self {
        Self {
            method: Method::PiecewiseExponential,
            substeps_per_sample,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-4) {
            return Err(Error::InvalidEvolution(format!(
                "rel_tol must be in (0, 1e-4], got {}",
                self.rel_tol
            )));
        }
        if self.substeps_per_sample == 0 {
            return Err(Error::InvalidEvolution(
                "substeps_per_sample must be >= 1".into(),
            ));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidEvolution("max_steps must be >= 1".into()));
        }
        Ok(())
    }

    fn integrator(&self) -> DormandPrince {
        DormandPrince {
            rel_tol: self.rel_tol,
            abs_tol: self.rel_tol * 1e-3,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipationConfig {
    /// Energy relaxation time in seconds.
    pub t1: f64,
    /// Ramsey coherence time in seconds.
    pub t2_star: f64,
    pub enabled: bool,
}

impl Default for DissipationConfig {
    fn default() -> Self {
        Self {
            t1: 8.6e-6,
            t2_star: 10.25e-6,
            enabled: false,
        }
    }
}

impl DissipationConfig {
    pub fn enabled(t1: f64, t2_star: f64) -> Self {
        Self {
            t1,
            t2_star,
            enabled: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.enabled {
            return Ok(());
        }
        if !(self.t1 > 0.0 && self.t2_star > 0.0) {
            return Err(Error::InvalidRates(format!(
                "T1 = {} and T2* = {} must be positive",
                self.t1, self.t2_star
            )));
        }
        if self.t2_star > 2.0 * self.t1 {
            return Err(Error::InvalidRates(format!(
                "T2* = {:e} s exceeds 2·T1 = {:e} s",
                self.t2_star,
                2.0 * self.t1
            )));
        }
        Ok(())
    }

    /// Amplitude-damping rate 1/T1 (zero when disabled).
    pub fn relaxation_rate(&self) -> f64 {
        if self.enabled {
            1.0 / self.t1
        } else {
            0.0
        }
    }

    /// Pure dephasing rate 1/T2* − 1/(2·T1) (zero when disabled).
    pub fn dephasing_rate(&self) -> f64 {
        if self.enabled {
            (1.0 / self.t2_star - 0.5 / self.t1).max(0.0)
        } else {
            0.0
        }
    }
}

/// exp(−i·H·dt) from the eigendecomposition of H.
pub fn matrix_exp_skew_hermitian(h: &Matrix, dt: f64) -> Result<Matrix> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: h.ncols(),
        });
    }
    let scale = h.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    let dev = linalg::hermitian_deviation(h);
    if dev > 1e-10 * scale {
        return Err(Error::NotHermitian(dev));
    }
    let (values, vectors) = linalg::eigh(h);
    let phases: Vec<C64> = values
        .iter()
        .map(|&e| C64::from_polar(1.0, -e * dt))
        .collect();
    let mut scaled = vectors.clone();
    for (j, p) in phases.iter().enumerate() {
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= p;
        }
    }
    Ok(scaled * vectors.adjoint())
}

fn check_dims(waveform: &SampledWaveform, params: &TransmonParams) -> Result<()> {
    params.validate()?;
    if waveform.is_empty() {
        return Err(Error::InvalidPulse("empty waveform".into()));
    }
    Ok(())
}

/// Evaluates `f(t0, t1, envelope)` on every constant-Hamiltonian interval of
/// the piecewise path.
fn for_each_hold_interval<F>(waveform: &SampledWaveform, substeps: usize, mut f: F) -> Result<()>
where
    F: FnMut(f64, f64, f64) -> Result<()>,
{
    let dt = waveform.dt;
    for (k, &held) in waveform.samples.iter().enumerate() {
        let a = waveform.time(k) - 0.5 * dt;
        if substeps == 1 || waveform.quantized {
            f(a, a + dt, held)?;
        } else {
            let h = dt / substeps as f64;
            for j in 0..substeps {
                let lo = a + j as f64 * h;
                f(lo, lo + h, waveform.spec.eval_envelope(lo + 0.5 * h))?;
            }
        }
    }
    Ok(())
}

/// Segment boundaries for the continuous path: the waveform span split at
/// the envelope cutoffs, where the square pulse is discontinuous.
fn continuous_segments(waveform: &SampledWaveform) -> Vec<(f64, f64)> {
    let start = waveform.start();
    let end = start + waveform.duration();
    let w = waveform.spec.half_window();
    let mut points = vec![start];
    for b in [-w, w] {
        if b > start && b < end {
            points.push(b);
        }
    }
    points.push(end);
    points.windows(2).map(|p| (p[0], p[1])).collect()
}

/// Composed drive-frame propagator of the whole waveform.
pub fn propagator(
    waveform: &SampledWaveform,
    params: &TransmonParams,
    cfg: &EvolutionConfig,
) -> Result<Matrix> {
    cfg.validate()?;
    check_dims(waveform, params)?;
    let dim = params.dim();
    match cfg.method {
        Method::PiecewiseExponential => {
            let mut u = Matrix::identity(dim, dim);
            let mut cache: HashMap<(u64, u64), Matrix> = HashMap::new();
            for_each_hold_interval(waveform, cfg.substeps_per_sample, |a, b, env| {
                let len = b - a;
                let key = (env.to_bits(), len.to_bits());
                let step = match cache.entry(key) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => e.insert(matrix_exp_skew_hermitian(
                        &params.build_drive_frame_hamiltonian(env),
                        len,
                    )?),
                };
                u = &*step * &u;
                Ok(())
            })?;
            Ok(u)
        }
        Method::AdaptiveRk => {
            let mut u = Matrix::identity(dim, dim);
            let dp = cfg.integrator();
            let spec = waveform.spec;
            for (a, b) in continuous_segments(waveform) {
                dp.integrate(
                    |t, y| params.build_drive_frame_hamiltonian(spec.eval_envelope(t)) * y * (-I),
                    a,
                    b,
                    &mut u,
                    waveform.dt,
                )?;
            }
            Ok(u)
        }
    }
}

fn require_drive_frame(state: &QuantumState, params: &TransmonParams) -> Result<()> {
    if state.frame() != Frame::DriveFrame {
        return Err(Error::FrameMismatch {
            expected: Frame::DriveFrame,
            found: state.frame(),
        });
    }
    if state.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: state.dim(),
        });
    }
    Ok(())
}

/// Unitary evolution of a drive-frame state over the waveform.
pub fn evolve(
    state: &QuantumState,
    waveform: &SampledWaveform,
    params: &TransmonParams,
    cfg: &EvolutionConfig,
) -> Result<QuantumState> {
    require_drive_frame(state, params)?;
    // Both methods build U and conjugate, so positivity is exact up to the
    // unitarity error of U.
    let u = propagator(waveform, params, cfg)?;
    state.transformed(&u)
}

/// Collapse operators: √(1/T1)·a for relaxation and √(2Γφ)·N for pure
/// dephasing, on the truncated ladder.
pub fn collapse_operators(dim: usize, diss: &DissipationConfig) -> Vec<Matrix> {
    let mut ops = Vec::new();
    let g1 = diss.relaxation_rate();
    if g1 > 0.0 {
        let mut a = Matrix::zeros(dim, dim);
        for n in 1..dim {
            a[(n - 1, n)] = C64::new((g1 * n as f64).sqrt(), 0.0);
        }
        ops.push(a);
    }
    let gphi = diss.dephasing_rate();
    if gphi > 0.0 {
        let mut num = Matrix::zeros(dim, dim);
        for n in 0..dim {
            num[(n, n)] = C64::new((2.0 * gphi).sqrt() * n as f64, 0.0);
        }
        ops.push(num);
    }
    ops
}

struct Lindbladian {
    ops: Vec<Matrix>,
    ops_dag: Vec<Matrix>,
    half_sum: Matrix,
}

impl Lindbladian {
    fn new(dim: usize, diss: &DissipationConfig) -> Self {
        let ops = collapse_operators(dim, diss);
        let ops_dag: Vec<Matrix> = ops.iter().map(|l| l.adjoint()).collect();
        let mut half_sum = Matrix::zeros(dim, dim);
        for (l, ld) in ops.iter().zip(&ops_dag) {
            half_sum += ld * l * C64::new(0.5, 0.0);
        }
        Self {
            ops,
            ops_dag,
            half_sum,
        }
    }

    fn rhs(&self, h: &Matrix, rho: &Matrix) -> Matrix {
        let mut out = (h * rho - rho * h) * (-I);
        for (l, ld) in self.ops.iter().zip(&self.ops_dag) {
            out += l * rho * ld;
        }
        out -= &self.half_sum * rho + rho * &self.half_sum;
        out
    }
}

/// Master-equation evolution with relaxation at 1/T1 and pure dephasing at
/// 1/T2* − 1/(2·T1). With a disabled config the dissipator is zero and the
/// same integrator runs the unitary dynamics.
pub fn evolve_lindblad(
    state: &QuantumState,
    waveform: &SampledWaveform,
    params: &TransmonParams,
    diss: &DissipationConfig,
    cfg: &EvolutionConfig,
) -> Result<QuantumState> {
    cfg.validate()?;
    diss.validate()?;
    check_dims(waveform, params)?;
    require_drive_frame(state, params)?;
    let lind = Lindbladian::new(params.dim(), diss);
    let dp = cfg.integrator();
    let mut rho = state.rho().clone();
    match cfg.method {
        Method::PiecewiseExponential => {
            for_each_hold_interval(waveform, cfg.substeps_per_sample, |a, b, env| {
                let h = params.build_drive_frame_hamiltonian(env);
                dp.integrate(|_, r| lind.rhs(&h, r), a, b, &mut rho, b - a)?;
                Ok(())
            })?;
        }
        Method::AdaptiveRk => {
            let spec = waveform.spec;
            for (a, b) in continuous_segments(waveform) {
                dp.integrate(
                    |t, r| {
                        lind.rhs(
                            &params.build_drive_frame_hamiltonian(spec.eval_envelope(t)),
                            r,
                        )
                    },
                    a,
                    b,
                    &mut rho,
                    waveform.dt,
                )?;
            }
        }
    }
    Ok(QuantumState::from_matrix_unchecked(rho, Frame::DriveFrame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulseshape::{PulseSpec, Shape};
    use crate::{mhz, oracle};
    use std::f64::consts::PI;

    fn sx() -> Matrix {
        Matrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        )
    }

    fn max_abs(m: &Matrix) -> f64 {
        m.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = matrix_exp_skew_hermitian(&Matrix::zeros(3, 3), 1.0).unwrap();
        assert!(max_abs(&(u - Matrix::identity(3, 3))) < 1e-15);
    }

    #[test]
    fn pauli_x_exponential_closed_form() {
        let om = 4.0e7;
        let dt = 3.3e-8;
        let h = sx() * C64::new(om / 2.0, 0.0);
        let u = matrix_exp_skew_hermitian(&h, dt).unwrap();
        let c = (om * dt / 2.0).cos();
        let s = (om * dt / 2.0).sin();
        let expected = Matrix::identity(2, 2) * C64::new(c, 0.0) - sx() * C64::new(0.0, s);
        assert!(max_abs(&(u.clone() - expected)) < 1e-12);
        assert!(linalg::unitarity_deviation(&u) < 1e-11);
    }

    #[test]
    fn two_pi_rotation_is_minus_identity() {
        let om = 1.0e8;
        let h = sx() * C64::new(om / 2.0, 0.0);
        let u = matrix_exp_skew_hermitian(&h, 2.0 * PI / om).unwrap();
        assert!(max_abs(&(u + Matrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut h = sx();
        h[(0, 1)] = C64::new(1.0, 0.5);
        assert!(matches!(
            matrix_exp_skew_hermitian(&h, 1.0),
            Err(Error::NotHermitian(_))
        ));
    }

    fn ground_drive(dim: usize) -> QuantumState {
        QuantumState::basis(dim, 0).with_frame(Frame::DriveFrame)
    }

    #[test]
    fn zero_envelope_leaves_state() {
        let w = PulseSpec::new(Shape::Sech, 25e-9, 0.0)
            .unwrap()
            .sample_waveform()
            .unwrap();
        let s = 0.5f64.sqrt();
        let plus =
            QuantumState::from_pure(&[C64::new(s, 0.0), C64::new(s, 0.0)], Frame::DriveFrame)
                .unwrap();
        let out = evolve(
            &plus,
            &w,
            &TransmonParams::qubit(),
            &EvolutionConfig::default(),
        )
        .unwrap();
        assert!(max_abs(&(out.rho() - plus.rho())) < 1e-14);
    }

    #[test]
    fn resonant_pi_sech_inverts() {
        let rho_bw = mhz(10.0);
        let w = PulseSpec::from_bandwidth(Shape::Sech, rho_bw, rho_bw)
            .unwrap()
            .with_window_sigmas(8.0)
            .unwrap()
            .with_bit_depth(0)
            .unwrap()
            .sample_waveform()
            .unwrap();
        let expected =
            oracle::rz_transition_probability(&oracle::RzParams::new(rho_bw, rho_bw, 0.0).unwrap());
        assert!((expected - 1.0).abs() < 1e-15);
        let out = evolve(
            &ground_drive(2),
            &w,
            &TransmonParams::qubit(),
            &EvolutionConfig::default(),
        )
        .unwrap();
        assert!(
            out.population(1) >= 1.0 - 1e-4,
            "P1 = {}",
            out.population(1)
        );
    }

    #[test]
    fn detuned_two_pi_sech_returns() {
        let rho_bw = mhz(10.0);
        let w = PulseSpec::from_bandwidth(Shape::Sech, rho_bw, 2.0 * rho_bw)
            .unwrap()
            .sample_waveform()
            .unwrap();
        let p = TransmonParams::qubit().with_delta(mhz(7.0));
        let out = evolve(&ground_drive(2), &w, &p, &EvolutionConfig::default()).unwrap();
        assert!(
            out.population(0) >= 1.0 - 1e-3,
            "P0 = {}",
            out.population(0)
        );
    }

    #[test]
    fn frame_and_dimension_checked() {
        let w = PulseSpec::new(Shape::Sech, 25e-9, 1e7)
            .unwrap()
            .sample_waveform()
            .unwrap();
        let cfg = EvolutionConfig::default();
        let q = QuantumState::basis(2, 0);
        assert!(matches!(
            evolve(&q, &w, &TransmonParams::qubit(), &cfg),
            Err(Error::FrameMismatch { .. })
        ));
        assert!(matches!(
            evolve(&ground_drive(3), &w, &TransmonParams::qubit(), &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(EvolutionConfig::adaptive(1e-3).validate().is_err());
        assert!(EvolutionConfig::adaptive(0.0).validate().is_err());
        assert!(EvolutionConfig::piecewise(0).validate().is_err());
        assert!(DissipationConfig::enabled(1e-6, 3e-6).validate().is_err());
        assert!(DissipationConfig::enabled(8.6e-6, 10.25e-6)
            .validate()
            .is_ok());
    }

    #[test]
    fn rk_budget_error_propagates() {
        let w = PulseSpec::new(Shape::Sech, 25e-9, 1e8)
            .unwrap()
            .sample_waveform()
            .unwrap();
        let cfg = EvolutionConfig {
            max_steps: 3,
            ..EvolutionConfig::adaptive(1e-10)
        };
        let r = evolve(&ground_drive(2), &w, &TransmonParams::qubit(), &cfg);
        assert!(matches!(r, Err(Error::ToleranceNotAchieved { .. })));
    }

    #[test]
    fn free_decay_and_dephasing_closed_forms() {
        let diss = DissipationConfig::default();
        let diss = DissipationConfig {
            enabled: true,
            ..diss
        };
        let spec = PulseSpec::new(Shape::Sech, 25e-9, 0.0)
            .unwrap()
            .with_window_sigmas(40.0)
            .unwrap();
        let w = spec.sample_waveform().unwrap();
        let t = w.duration();
        let cfg = EvolutionConfig::adaptive(1e-10);
        let excited = QuantumState::basis(2, 1).with_frame(Frame::DriveFrame);
        let out = evolve_lindblad(&excited, &w, &TransmonParams::qubit(), &diss, &cfg).unwrap();
        assert!((out.population(1) - (-t / diss.t1).exp()).abs() < 1e-6);
        let s = 0.5f64.sqrt();
        let plus =
            QuantumState::from_pure(&[C64::new(s, 0.0), C64::new(s, 0.0)], Frame::DriveFrame)
                .unwrap();
        let out = evolve_lindblad(&plus, &w, &TransmonParams::qubit(), &diss, &cfg).unwrap();
        assert!((out.rho()[(0, 1)].norm() - 0.5 * (-t / diss.t2_star).exp()).abs() < 1e-6);
    }
}
