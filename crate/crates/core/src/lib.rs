// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Driven qubit coupled to a finite calorimeter of N resonant two-level units.
//!
//! The calorimeter is assumed to dephase into microcanonical shells, so the
//! joint state is carried by N + 1 conditional qubit blocks σ(n,t) whose
//! evolution is a Lindblad-type equation with energy-dependent jump rates.
//! On top of the dynamics this crate computes qubit and total trace
//! distances, the BLP backflow measure maximized over orthogonal initial
//! pairs, and sweeps of that measure over drive amplitude and coupling.
//!
//! ```
//! use feme_core::{blp_search, BlpSearch, IntegratorConfig, ModelParams};
//!
//! let params = ModelParams::new(0.0, 0.066, 2.0, 5).unwrap();
//! let cfg = IntegratorConfig::default().with_t_end(50.0);
//! let result = blp_search(&params, &cfg, &BlpSearch::default()).unwrap();
//! assert_eq!(result.value, 0.0);
//! ```

pub mod dynamics;
pub mod error;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod state;
pub mod sweep;

pub use dynamics::{
    analytic_undriven_distance, feme_rhs, integrate, integrate_with, IntegratorConfig, Picture,
    TrajectoryRecord,
};
pub use error::{FemeError, Result};
pub use measures::{
    backflow_onset, blp_from_trace, blp_measure, blp_search, distance_trace, external_distance,
    internal_distance, BlpResult, BlpSearch, BlpSummary, Crossing, Direction, DistanceTrace,
};
pub use model::ModelParams;
pub use state::{
    build_difference_state, reduce_state, BlochPair, FemeState, QubitBlock, StateMode,
};
pub use sweep::{
    extract_ridge, loglog_fit, run_sweep, tr_scan, LogLogFit, RidgeFit, SweepGrid, SweepSpec,
    TrScan,
};
