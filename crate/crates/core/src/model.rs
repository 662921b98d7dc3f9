// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Physical parameters of the driven qubit + calorimeter model.
//!
//! Units are natural: ℏ = 1 and, by default, ω₀ = 1, so `lambda0`, `g` and
//! `1/beta` are all expressed in units of ℏω₀ and time in units of 1/ω₀.

use serde::{Deserialize, Serialize};

use crate::error::{FemeError, Result};

/// Drive, coupling, temperature and calorimeter size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Qubit (and calorimeter unit) angular frequency.
    pub omega0: f64,
    /// Amplitude of the resonant drive λ(t) = λ₀ sin(ω₀t).
    pub lambda0: f64,
    /// Qubit–calorimeter coupling rate.
    pub g: f64,
    /// Inverse temperature of the initial calorimeter state. `f64::INFINITY` is zero temperature.
    pub beta: f64,
    /// Number of two-level units in the calorimeter.
    pub n_units: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            lambda0: 0.08,
            g: 0.066,
            beta: 2.0,
            n_units: 20,
        }
    }
}

impl ModelParams {
    pub fn new(lambda0: f64, g: f64, beta: f64, n_units: usize) -> Result<Self> {
        let p = Self {
            omega0: 1.0,
            lambda0,
            g,
            beta,
            n_units,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_lambda0(mut self, lambda0: f64) -> Self {
        self.lambda0 = lambda0;
        self
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_n_units(mut self, n_units: usize) -> Self {
        self.n_units = n_units;
        self
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, reason: impl Into<String>) -> FemeError {
            FemeError::InvalidParameter {
                name,
                reason: reason.into(),
            }
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(bad(
                "omega0",
                format!("must be finite and > 0, got {}", self.omega0),
            ));
        }
        if !(self.lambda0.is_finite() && self.lambda0 >= 0.0) {
            return Err(bad(
                "lambda0",
                format!("must be finite and >= 0, got {}", self.lambda0),
            ));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(bad("g", format!("must be finite and >= 0, got {}", self.g)));
        }
        // NaN fails the comparison; +inf is allowed (zero temperature).
        if self.beta.is_nan() || self.beta <= 0.0 {
            return Err(bad("beta", format!("must be > 0, got {}", self.beta)));
        }
        if self.n_units == 0 {
            return Err(bad("n_units", "must be >= 1"));
        }
        Ok(())
    }

    /// Number of calorimeter energy levels, N + 1.
    pub fn levels(&self) -> usize {
        self.n_units + 1
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n > self.n_units {
            return Err(FemeError::LevelOutOfRange {
                n,
                n_units: self.n_units,
            });
        }
        Ok(())
    }

    /// Emission rate Γ↓(n) = g (1 − n/N) with the calorimeter holding `n` quanta.
    pub fn rate_down(&self, n: usize) -> Result<f64> {
        self.check_level(n)?;
        Ok(self.g * (self.n_units - n) as f64 / self.n_units as f64)
    }

    /// Absorption rate Γ↑(n) = g n/N.
    pub fn rate_up(&self, n: usize) -> Result<f64> {
        self.check_level(n)?;
        Ok(self.g * n as f64 / self.n_units as f64)
    }

    /// Both rate tables for n = 0..=N.
    pub fn rate_tables(&self) -> (Vec<f64>, Vec<f64>) {
        let up = (0..=self.n_units)
            .map(|n| self.g * n as f64 / self.n_units as f64)
            .collect();
        let down = (0..=self.n_units)
            .map(|n| self.g * (self.n_units - n) as f64 / self.n_units as f64)
            .collect();
        (up, down)
    }

    /// Canonical occupation probabilities of the calorimeter levels.
    ///
    /// pₙ = C(N,n) e^{−βnℏω₀} / Z with Z = (1 + e^{−βℏω₀})^N, evaluated in log space.
    pub fn thermal_weights(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n_units = self.n_units;
        let x = self.beta * self.omega0;
        let log_z = n_units as f64 * (-x).exp().ln_1p();
        let mut log_binom = 0.0_f64;
        let mut weights = Vec::with_capacity(n_units + 1);
        for n in 0..=n_units {
            if n > 0 {
                log_binom += ((n_units - n + 1) as f64 / n as f64).ln();
            }
            // n = 0 is special-cased so that β = ∞ does not produce ∞·0.
            let energy_term = if n == 0 { 0.0 } else { x * n as f64 };
            weights.push((log_binom - energy_term - log_z).exp());
        }
        if let Some(n) = weights.iter().position(|w| !w.is_finite()) {
            return Err(FemeError::InvalidParameter {
                name: "beta",
                reason: format!("thermal weight p_{n} is not finite"),
            });
        }
        Ok(weights)
    }
}
