// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Configuration, output formatting and subcommands behind the `feme` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{Format, Overrides, RunConfig};
pub use error::CliError;
