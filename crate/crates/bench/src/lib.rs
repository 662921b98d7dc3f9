// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the benchmarks.

use feme_core::{IntegratorConfig, ModelParams};

/// Default drive and coupling with `n_units` calorimeter units.
pub fn ridge_params(n_units: usize) -> ModelParams {
    ModelParams::default().with_n_units(n_units)
}

/// A shortened horizon so one iteration stays in the millisecond range.
pub fn short_run(t_end: f64) -> IntegratorConfig {
    IntegratorConfig::default().with_t_end(t_end)
}
