// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the model, integrator and measures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FemeError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("level index {n} out of range 0..={n_units}")]
    LevelOutOfRange { n: usize, n_units: usize },

    #[error("shape mismatch: expected {expected} blocks, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite value at t = {time} in block {block}")]
    NonFinite { time: f64, block: usize },
}

pub type Result<T> = std::result::Result<T, FemeError>;
