// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Conditional qubit blocks σ(n,t) and their reduced sum.
//!
//! The qubit–calorimeter state is ρ = Σₙ σ(n) ⊗ σ_c(Eₙ) where σ_c(Eₙ) is the
//! microcanonical state of the calorimeter shell holding n quanta. Only the
//! N + 1 unnormalized 2×2 blocks σ(n) are tracked. Each block is Hermitian,
//! so σ₁₀ is never stored.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FemeError, Result};
use crate::model::ModelParams;

/// Tolerance for conserved traces after long integrations.
pub const CONSERVATION_TOL: f64 = 1e-9;
/// Tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// One unnormalized Hermitian 2×2 block, `[[s00, s01], [conj(s01), s11]]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct QubitBlock {
    pub s00: f64,
    pub s11: f64,
    pub s01: Complex64,
}

impl QubitBlock {
    pub const ZERO: QubitBlock = QubitBlock {
        s00: 0.0,
        s11: 0.0,
        s01: Complex64 { re: 0.0, im: 0.0 },
    };

    pub fn new(s00: f64, s11: f64, s01: Complex64) -> Self {
        Self { s00, s11, s01 }
    }

    pub fn s10(&self) -> Complex64 {
        self.s01.conj()
    }

    pub fn trace(&self) -> f64 {
        self.s00 + self.s11
    }

    /// Eigenvalues (λ₋, λ₊) of the Hermitian block.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.s00 + self.s11);
        let radius = (0.5 * (self.s00 - self.s11)).hypot(self.s01.norm());
        (mean - radius, mean + radius)
    }

    /// Half the trace norm, (|λ₊| + |λ₋|)/2 = max(|mean|, radius).
    pub fn half_trace_norm(&self) -> f64 {
        let mean = 0.5 * (self.s00 + self.s11);
        let radius = (0.5 * (self.s00 - self.s11)).hypot(self.s01.norm());
        mean.abs().max(radius)
    }

    pub fn is_finite(&self) -> bool {
        self.s00.is_finite()
            && self.s11.is_finite()
            && self.s01.re.is_finite()
            && self.s01.im.is_finite()
    }

    /// Positive semidefinite within `tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.eigenvalues().0 >= -tol
    }

    #[inline]
    pub(crate) fn axpy(&mut self, a: f64, x: &QubitBlock) {
        self.s00 += a * x.s00;
        self.s11 += a * x.s11;
        self.s01 += x.s01 * a;
    }
}

impl Add for QubitBlock {
    type Output = QubitBlock;
    fn add(self, rhs: QubitBlock) -> QubitBlock {
        QubitBlock::new(self.s00 + rhs.s00, self.s11 + rhs.s11, self.s01 + rhs.s01)
    }
}

impl Sub for QubitBlock {
    type Output = QubitBlock;
    fn sub(self, rhs: QubitBlock) -> QubitBlock {
        QubitBlock::new(self.s00 - rhs.s00, self.s11 - rhs.s11, self.s01 - rhs.s01)
    }
}

impl Mul<QubitBlock> for f64 {
    type Output = QubitBlock;
    fn mul(self, rhs: QubitBlock) -> QubitBlock {
        QubitBlock::new(self * rhs.s00, self * rhs.s11, rhs.s01 * self)
    }
}

/// Whether a [`FemeState`] is a physical state (unit total trace) or the
/// difference of two physical states (zero total trace).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateMode {
    State,
    Difference,
}

impl StateMode {
    pub fn expected_trace(self) -> f64 {
        match self {
            StateMode::State => 1.0,
            StateMode::Difference => 0.0,
        }
    }
}

/// The N + 1 conditional blocks at a given time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemeState {
    pub blocks: Vec<QubitBlock>,
    pub time: f64,
    pub mode: StateMode,
}

impl FemeState {
    pub fn new(blocks: Vec<QubitBlock>, time: f64, mode: StateMode) -> Self {
        Self { blocks, time, mode }
    }

    pub fn zeros(levels: usize, mode: StateMode) -> Self {
        Self::new(vec![QubitBlock::ZERO; levels], 0.0, mode)
    }

    /// Product state pₙ ρ_q with the calorimeter in canonical equilibrium.
    pub fn thermal_product(qubit: QubitBlock, params: &ModelParams) -> Result<Self> {
        let weights = params.thermal_weights()?;
        let blocks = weights.iter().map(|&p| p * qubit).collect();
        Ok(Self::new(blocks, 0.0, StateMode::State))
    }

    pub fn levels(&self) -> usize {
        self.blocks.len()
    }

    pub fn total_trace(&self) -> f64 {
        self.blocks.iter().map(QubitBlock::trace).sum()
    }

    /// Checks the mode-dependent trace invariant and, for physical states,
    /// blockwise positivity.
    pub fn check(&self, tol: f64) -> Result<()> {
        let trace = self.total_trace();
        let expected = self.mode.expected_trace();
        if (trace - expected).abs() > tol {
            return Err(FemeError::Contract(format!(
                "total trace {trace} deviates from {expected} by more than {tol}"
            )));
        }
        if self.mode == StateMode::State {
            if let Some(n) = self.blocks.iter().position(|b| !b.is_psd(tol)) {
                return Err(FemeError::Contract(format!(
                    "block {n} is not positive semidefinite"
                )));
            }
        }
        Ok(())
    }

    /// Linear combination a·self + b·other, blockwise.
    pub fn combine(&self, a: f64, other: &FemeState, b: f64) -> Result<FemeState> {
        if self.levels() != other.levels() {
            return Err(FemeError::Shape {
                expected: self.levels(),
                got: other.levels(),
            });
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(x, y)| a * *x + b * *y)
            .collect();
        Ok(FemeState::new(blocks, self.time, self.mode))
    }

    /// Reduced qubit matrix σ = Σₙ σ(n).
    pub fn reduce(&self) -> QubitBlock {
        reduce_state(self)
    }
}

/// Entrywise sum of all conditional blocks.
pub fn reduce_state(state: &FemeState) -> QubitBlock {
    state
        .blocks
        .iter()
        .fold(QubitBlock::ZERO, |acc, b| acc + *b)
}

/// An orthogonal pair of pure qubit states, parametrized by Bloch angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPair {
    pub theta: f64,
    pub phi: f64,
}

impl BlochPair {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        let pair = Self { theta, phi };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        use std::f64::consts::PI;
        for (name, v) in [("theta", self.theta), ("phi", self.phi)] {
            if !(v.is_finite() && (0.0..PI).contains(&v)) {
                return Err(FemeError::InvalidParameter {
                    name,
                    reason: format!("must lie in [0, pi), got {v}"),
                });
            }
        }
        Ok(())
    }

    /// ρ₁ − ρ₂ = [[cosθ, e^{iφ} sinθ], [e^{−iφ} sinθ, −cosθ]].
    pub fn difference_matrix(&self) -> QubitBlock {
        let (s, c) = self.theta.sin_cos();
        QubitBlock::new(c, -c, Complex64::from_polar(s, self.phi))
    }
}

/// Difference state pₙ (ρ₁ − ρ₂) with the calorimeter in canonical equilibrium.
pub fn build_difference_state(pair: &BlochPair, params: &ModelParams) -> Result<FemeState> {
    pair.validate()?;
    let weights = params.thermal_weights()?;
    let delta = pair.difference_matrix();
    let blocks = weights.iter().map(|&p| p * delta).collect();
    Ok(FemeState::new(blocks, 0.0, StateMode::Difference))
}
