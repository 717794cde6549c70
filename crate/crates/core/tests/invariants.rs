// SPDX-License-Identifier: Apache-2.0

//! Property tests over randomized inputs.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use proptest::prelude::*;
use sechgate::pulseshape::quantize;
use sechgate::tomography::{self, measure_pauli, qubit_rotation, uhlmann_fidelity, Axis, Qubit};
use sechgate::{
    evolve, initial_thermal_state, linalg, mhz, propagator, EvolutionConfig, Frame, PrepLabel,
    PulseSpec, Shape, SimConfig, TransmonParams, C64,
};

const SIGMA: f64 = 25e-9;

fn rho() -> f64 {
    PI / (2.0 * SIGMA)
}

fn qubit_dm(x: f64, y: f64, z: f64) -> Qubit {
    let half = C64::from(0.5);
    (Qubit::identity()
        + tomography::pauli_x() * C64::from(x)
        + tomography::pauli_y() * C64::from(y)
        + tomography::pauli_z() * C64::from(z))
        * half
}

prop_compose! {
    fn bloch()(u in -1.0..1.0f64, phi in -PI..PI, r in 0.0..1.0f64) -> (f64, f64, f64) {
        let s = (1.0 - u * u).sqrt();
        (r * s * phi.cos(), r * s * phi.sin(), r * u)
    }
}

prop_compose! {
    fn unitary()(a in -PI..PI, b in -PI..PI, c in -PI..PI) -> Qubit {
        qubit_rotation(Axis::X, a) * qubit_rotation(Axis::Y, b) * qubit_rotation(Axis::X, c)
    }
}

fn shapes() -> impl Strategy<Value = Shape> {
    prop_oneof![
        Just(Shape::Sech),
        Just(Shape::Gaussian),
        Just(Shape::Square)
    ]
}

fn preps() -> impl Strategy<Value = PrepLabel> {
    (0..6usize).prop_map(|k| PrepLabel::ALL[k])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn randomized_evolution_keeps_density_matrix(
        shape in shapes(),
        amp in 0.0..6.0f64,
        delta_mhz in -25.0..25.0f64,
        levels in 2..6usize,
        p in 0.0..0.5f64,
        prep in preps(),
        bits in 0..10u32,
        rk in any::<bool>(),
    ) {
        let spec = PulseSpec::new(shape, SIGMA, amp * rho()).unwrap().with_bit_depth(bits).unwrap();
        let model = TransmonParams::default().with_levels(levels).unwrap().with_delta(mhz(delta_mhz));
        let cfg = if rk { EvolutionConfig::adaptive(1e-10) } else { EvolutionConfig::default() };
        let init = tomography::prepare(prep, &initial_thermal_state(p, levels).unwrap()).unwrap();
        let out = evolve(&init.clone().with_frame(Frame::DriveFrame), &spec.sample_waveform().unwrap(), &model, &cfg).unwrap();
        let tr = linalg::trace(out.rho());
        prop_assert!((tr.re - 1.0).abs() <= 1e-9 && tr.im.abs() <= 1e-9);
        prop_assert!(linalg::hermitian_deviation(out.rho()) <= 1e-9);
        prop_assert!(out.min_eigenvalue() >= -1e-9);
        if !rk {
            prop_assert!((out.purity() - init.purity()).abs() <= 1e-9);
        }
    }

    #[test]
    fn composed_propagator_is_unitary(
        shape in shapes(),
        amp in 0.0..8.0f64,
        delta_mhz in -30.0..30.0f64,
        levels in 2..8usize,
        bits in 0..12u32,
        substeps in 1..4usize,
    ) {
        let spec = PulseSpec::new(shape, SIGMA, amp * rho()).unwrap().with_bit_depth(bits).unwrap();
        let model = TransmonParams::default().with_levels(levels).unwrap().with_delta(mhz(delta_mhz));
        let u = propagator(&spec.sample_waveform().unwrap(), &model, &EvolutionConfig::piecewise(substeps)).unwrap();
        prop_assert!(linalg::unitarity_deviation(&u) <= 1e-9);
    }

    #[test]
    fn quantization_error_bounded(x in 0.0..1.0f64, full in 1e6..1e9f64, bits in 1..=16u32) {
        let q = quantize(x * full, full, bits);
        prop_assert!((q - x * full).abs() <= full / (2.0 * ((1u64 << bits) - 1) as f64) * (1.0 + 1e-12));
    }

    #[test]
    fn pulse_area_increases_with_amplitude(shape in shapes(), a in 0.01..5.0f64, factor in 1.001..3.0f64) {
        let spec = PulseSpec::new(shape, SIGMA, a * rho()).unwrap();
        let bigger = spec.with_amplitude(a * factor * rho()).unwrap();
        prop_assert!(bigger.pulse_area() > spec.pulse_area());
    }

    #[test]
    fn unquantized_samples_equal_envelope(shape in shapes(), a in 0.1..5.0f64, w in 1.0..8.0f64) {
        let spec = PulseSpec::new(shape, SIGMA, a * rho()).unwrap()
            .with_window_sigmas(w).unwrap().with_bit_depth(0).unwrap();
        let wf = spec.sample_waveform().unwrap();
        for (k, s) in wf.samples.iter().enumerate() {
            prop_assert_eq!(*s, spec.eval_envelope(wf.time(k)));
        }
    }

    #[test]
    fn fidelity_symmetric_and_unitarily_invariant(a in bloch(), b in bloch(), u in unitary()) {
        let (r1, r2) = (qubit_dm(a.0, a.1, a.2), qubit_dm(b.0, b.1, b.2));
        let f12 = uhlmann_fidelity(&r1, &r2).unwrap();
        let f21 = uhlmann_fidelity(&r2, &r1).unwrap();
        prop_assert!((f12 - f21).abs() <= 1e-10);
        let conj = |m: &Qubit| u * m * u.adjoint();
        let fu = uhlmann_fidelity(&conj(&r1), &conj(&r2)).unwrap();
        prop_assert!((f12 - fu).abs() <= 1e-10);
        prop_assert!((0.0..=1.0).contains(&f12));
    }

    #[test]
    fn fidelity_with_pure_state(a in bloch(), theta in 0.0..PI, phi in -PI..PI) {
        let psi = [C64::from((theta / 2.0).cos()), C64::from_polar((theta / 2.0).sin(), phi)];
        let pure: Qubit = Matrix2::from_fn(|i, j| psi[i] * psi[j].conj());
        let r1 = qubit_dm(a.0, a.1, a.2);
        let overlap = (0..2).flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| psi[i].conj() * r1[(i, j)] * psi[j])
            .sum::<C64>().re;
        let f = uhlmann_fidelity(&r1, &pure).unwrap();
        prop_assert!((f * f - overlap).abs() <= 1e-10, "{} vs {}", f * f, overlap);
    }

    #[test]
    fn pauli_round_trip_on_qubit(a in bloch()) {
        let m = qubit_dm(a.0, a.1, a.2);
        let state = sechgate::QuantumState::new(linalg::embed_qubit(&m, 2), Frame::QubitFrame).unwrap();
        let back = tomography::reconstruct_qubit_dm(&measure_pauli(&state).unwrap()).unwrap();
        prop_assert!((back - m).norm() <= 1e-12);
    }
}

#[test]
fn ideal_chain_phase_is_odd() {
    let cfg = SimConfig::ideal_qubit();
    for d in [1.0, 2.5, 5.0, 7.0, 10.0, 15.0] {
        let plus = tomography::zgate_tomography(mhz(d), PrepLabel::YPlusHalfPi, &cfg).unwrap();
        let minus = tomography::zgate_tomography(mhz(-d), PrepLabel::YPlusHalfPi, &cfg).unwrap();
        let sum = (plus.phi + minus.phi + PI).rem_euclid(2.0 * PI) - PI;
        assert!(sum.abs() < 1e-9, "Δ={d}: {} {}", plus.phi, minus.phi);
    }
}

#[test]
fn ideal_gate_conserves_populations() {
    let cfg = SimConfig::ideal_qubit();
    let init = initial_thermal_state(cfg.thermal_excited, 2).unwrap();
    for prep in PrepLabel::ALL {
        let before = measure_pauli(&tomography::prepare(prep, &init).unwrap()).unwrap();
        for d in [-15.0, -7.0, -2.0, 3.0, 10.0, 18.0] {
            let after = tomography::zgate_tomography(mhz(d), prep, &cfg).unwrap();
            assert!(
                (after.exp_z - before.z).abs() <= 1e-3,
                "{prep} Δ={d}: {} vs {}",
                after.exp_z,
                before.z
            );
        }
    }
}

#[test]
fn identity_prep_has_no_coherence() {
    // The simulated pulse is only approximately diagonal, so the bound is the
    // same as for population invariance.
    let cfg = SimConfig::ideal_qubit();
    for d in [-12.0, -3.0, 4.0, 11.0] {
        let rec = tomography::zgate_tomography(mhz(d), PrepLabel::Identity, &cfg).unwrap();
        assert!(rec.exp_x.abs() < 1e-3 && rec.exp_y.abs() < 1e-3, "{rec:?}");
    }
}

#[test]
fn piecewise_converges_to_adaptive() {
    let model = TransmonParams::default();
    let init = initial_thermal_state(0.1, 4)
        .unwrap()
        .with_frame(Frame::DriveFrame);
    for (shape, amp) in [
        (Shape::Sech, 2.0),
        (Shape::Gaussian, 1.6),
        (Shape::Sech, 5.0),
    ] {
        for d in [-12.0, 0.0, 6.0] {
            let spec = PulseSpec::new(shape, SIGMA, amp * rho())
                .unwrap()
                .with_bit_depth(0)
                .unwrap();
            let wf = spec.sample_waveform().unwrap();
            let params = model.with_delta(mhz(d));
            let rk = evolve(&init, &wf, &params, &EvolutionConfig::adaptive(1e-11)).unwrap();
            let pw = evolve(&init, &wf, &params, &EvolutionConfig::piecewise(4)).unwrap();
            let worst = rk
                .populations()
                .iter()
                .zip(pw.populations())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-6, "{shape} amp={amp} Δ={d}: {worst:e}");
        }
    }
}
