// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the benchmarks.

use sechgate::{SampledWaveform, SimConfig};

/// Default configuration and its cyclic sech waveform.
pub fn reference_fixture() -> (SimConfig, SampledWaveform) {
    let cfg = SimConfig::default();
    let waveform = cfg.pulse.sample_waveform().expect("default pulse samples");
    (cfg, waveform)
}
