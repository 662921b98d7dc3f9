// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time evolution of the conditional blocks.
//!
//! Per block n, in the interaction picture with respect to H₀ = ℏω₀a†a and
//! with v(t) = λ₀ e^{−iω₀t} sin(ω₀t):
//!
//! ```text
//! dσ₀₀ⁿ = i v* σ₀₁ⁿ − i v σ₁₀ⁿ − Γ↑(n) σ₀₀ⁿ + Γ↓(n−1) σ₁₁ⁿ⁻¹
//! dσ₁₁ⁿ = i v σ₁₀ⁿ − i v* σ₀₁ⁿ − Γ↓(n) σ₁₁ⁿ + Γ↑(n+1) σ₀₀ⁿ⁺¹
//! dσ₀₁ⁿ = i v (σ₀₀ⁿ − σ₁₁ⁿ) − (g/2) σ₀₁ⁿ
//! ```
//!
//! Blocks outside 0..=N are zero. The Schrödinger-picture form replaces v by
//! λ(t) = λ₀ sin(ω₀t) and adds the free precession i ω₀ σ₀₁ⁿ.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FemeError, Result};
use crate::model::ModelParams;
use crate::state::{FemeState, QubitBlock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    #[default]
    Interaction,
    Schroedinger,
}

/// Fixed-step integration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Maximum step size. The grid is uniform and ends exactly at `t_end`.
    pub dt: f64,
    pub t_end: f64,
    /// Record every `sample_every`-th step.
    pub sample_every: usize,
    pub picture: Picture,
}

/// Default step, 200 steps per drive period.
pub const DEFAULT_DT: f64 = 2.0 * PI / 200.0;
/// Default truncation time ω₀τ = 1000π.
pub const DEFAULT_T_END: f64 = 1000.0 * PI;

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            t_end: DEFAULT_T_END,
            sample_every: 1,
            picture: Picture::Interaction,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(FemeError::InvalidParameter {
                name: "dt",
                reason: format!("must be finite and > 0, got {}", self.dt),
            });
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(FemeError::InvalidParameter {
                name: "t_end",
                reason: format!("must be finite and > 0, got {}", self.t_end),
            });
        }
        if self.sample_every == 0 {
            return Err(FemeError::InvalidParameter {
                name: "sample_every",
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }

    /// Number of uniform steps covering [0, t_end] with step ≤ dt.
    pub fn steps(&self) -> usize {
        let ratio = self.t_end / self.dt;
        // Tolerate rounding in t_end/dt so that e.g. 1000π / (2π/200) gives 100000.
        (ratio * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        self.t_end / self.steps() as f64
    }

    /// Sample times 0, h·s, 2h·s, … with s = `sample_every`.
    pub fn sample_times(&self) -> Vec<f64> {
        let steps = self.steps();
        (0..=steps)
            .step_by(self.sample_every)
            .map(|k| self.t_end * k as f64 / steps as f64)
            .collect()
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }
}

/// Precomputed generator of the block equations.
#[derive(Debug, Clone)]
pub struct Generator {
    up: Vec<f64>,
    down: Vec<f64>,
    half_g: f64,
    lambda0: f64,
    omega0: f64,
    picture: Picture,
}

impl Generator {
    pub fn new(params: &ModelParams, picture: Picture) -> Result<Self> {
        params.validate()?;
        let (up, down) = params.rate_tables();
        Ok(Self {
            up,
            down,
            half_g: 0.5 * params.g,
            lambda0: params.lambda0,
            omega0: params.omega0,
            picture,
        })
    }

    pub fn levels(&self) -> usize {
        self.up.len()
    }

    /// Drive coupling entering ⟨0|H|1⟩ in the solved picture.
    #[inline]
    pub fn drive(&self, t: f64) -> Complex64 {
        let (s, c) = (self.omega0 * t).sin_cos();
        let amp = self.lambda0 * s;
        match self.picture {
            Picture::Interaction => Complex64::new(amp * c, -amp * s),
            Picture::Schroedinger => Complex64::new(amp, 0.0),
        }
    }

    /// Writes dσ/dt for all blocks into `out`.
    pub fn eval(&self, t: f64, blocks: &[QubitBlock], out: &mut [QubitBlock]) {
        let levels = self.levels();
        debug_assert_eq!(blocks.len(), levels);
        debug_assert_eq!(out.len(), levels);
        let v = self.drive(t);
        let (vr, vi) = (v.re, v.im);
        let hg = self.half_g;
        let free = match self.picture {
            Picture::Interaction => 0.0,
            Picture::Schroedinger => self.omega0,
        };
        let up = &self.up[..levels];
        let down = &self.down[..levels];
        let mut gain_from_below = 0.0;
        for n in 0..levels {
            let b = blocks[n];
            let (a, c) = (b.s01.re, b.s01.im);
            // i v* σ01 − i v σ10 = −2 Im(v* σ01)
            let coherent = -2.0 * (vr * c - vi * a);
            let gain_from_above = if n + 1 < levels {
                up[n + 1] * blocks[n + 1].s00
            } else {
                0.0
            };
            let d00 = coherent - up[n] * b.s00 + gain_from_below;
            let d11 = -coherent - down[n] * b.s11 + gain_from_above;
            let dz = b.s00 - b.s11;
            // i v (σ00 − σ11) − (g/2) σ01 + i ω σ01
            let d01 = Complex64::new(-vi * dz - hg * a - free * c, vr * dz - hg * c + free * a);
            out[n] = QubitBlock::new(d00, d11, d01);
            gain_from_below = down[n] * b.s11;
        }
    }
}

/// Right-hand side of the block equations (interaction picture) at time `t`.
pub fn feme_rhs(state: &FemeState, t: f64, params: &ModelParams) -> Result<FemeState> {
    feme_rhs_in(state, t, params, Picture::Interaction)
}

/// Right-hand side in the requested picture.
pub fn feme_rhs_in(
    state: &FemeState,
    t: f64,
    params: &ModelParams,
    picture: Picture,
) -> Result<FemeState> {
    let gen = Generator::new(params, picture)?;
    if state.levels() != gen.levels() {
        return Err(FemeError::Shape {
            expected: gen.levels(),
            got: state.levels(),
        });
    }
    let mut out = vec![QubitBlock::ZERO; gen.levels()];
    gen.eval(t, &state.blocks, &mut out);
    Ok(FemeState::new(out, t, state.mode))
}

/// Classical fourth-order Runge–Kutta stepper with reusable stage buffers.
struct Rk4 {
    k1: Vec<QubitBlock>,
    k2: Vec<QubitBlock>,
    k3: Vec<QubitBlock>,
    k4: Vec<QubitBlock>,
    tmp: Vec<QubitBlock>,
}

impl Rk4 {
    fn new(levels: usize) -> Self {
        let z = vec![QubitBlock::ZERO; levels];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    fn step(&mut self, gen: &Generator, t: f64, h: f64, y: &mut [QubitBlock]) {
        let half = 0.5 * h;
        gen.eval(t, y, &mut self.k1);
        stage(&mut self.tmp, y, half, &self.k1);
        gen.eval(t + half, &self.tmp, &mut self.k2);
        stage(&mut self.tmp, y, half, &self.k2);
        gen.eval(t + half, &self.tmp, &mut self.k3);
        stage(&mut self.tmp, y, h, &self.k3);
        gen.eval(t + h, &self.tmp, &mut self.k4);
        let w = h / 6.0;
        for n in 0..y.len() {
            let mut incr = self.k1[n];
            incr.axpy(2.0, &self.k2[n]);
            incr.axpy(2.0, &self.k3[n]);
            incr.axpy(1.0, &self.k4[n]);
            y[n].axpy(w, &incr);
        }
    }
}

#[inline]
fn stage(out: &mut [QubitBlock], y: &[QubitBlock], a: f64, k: &[QubitBlock]) {
    for ((o, yn), kn) in out.iter_mut().zip(y).zip(k) {
        *o = *yn;
        o.axpy(a, kn);
    }
}

fn check_finite(blocks: &[QubitBlock], time: f64) -> Result<()> {
    match blocks.iter().position(|b| !b.is_finite()) {
        Some(block) => Err(FemeError::NonFinite { time, block }),
        None => Ok(()),
    }
}

/// Integrates from `initial` (taken at t = 0) and calls `observe(t, blocks)` at
/// every sample, including t = 0. Returns the final state.
///
/// Blocks are passed in the configured picture.
pub fn integrate_with<F>(
    initial: &FemeState,
    params: &ModelParams,
    cfg: &IntegratorConfig,
    mut observe: F,
) -> Result<FemeState>
where
    F: FnMut(f64, &[QubitBlock]),
{
    cfg.validate()?;
    let gen = Generator::new(params, cfg.picture)?;
    if initial.levels() != gen.levels() {
        return Err(FemeError::Shape {
            expected: gen.levels(),
            got: initial.levels(),
        });
    }
    let steps = cfg.steps();
    let h = cfg.effective_dt();
    let mut y = initial.blocks.clone();
    check_finite(&y, 0.0)?;
    observe(0.0, &y);

    let mut rk = Rk4::new(y.len());
    for k in 0..steps {
        let t = cfg.t_end * k as f64 / steps as f64;
        rk.step(&gen, t, h, &mut y);
        let done = k + 1;
        if done % cfg.sample_every == 0 {
            let t_next = cfg.t_end * done as f64 / steps as f64;
            check_finite(&y, t_next)?;
            observe(t_next, &y);
        }
    }
    check_finite(&y, cfg.t_end)?;
    Ok(FemeState::new(y, cfg.t_end, initial.mode))
}

/// K blocks at the same level n, one per independent trajectory.
#[derive(Debug, Clone, Copy)]
struct LaneBlock<const K: usize> {
    s00: [f64; K],
    s11: [f64; K],
    re: [f64; K],
    im: [f64; K],
}

impl<const K: usize> LaneBlock<K> {
    const ZERO: Self = Self {
        s00: [0.0; K],
        s11: [0.0; K],
        re: [0.0; K],
        im: [0.0; K],
    };

    #[inline]
    fn axpy(&mut self, a: f64, x: &Self) {
        for k in 0..K {
            self.s00[k] += a * x.s00[k];
            self.s11[k] += a * x.s11[k];
            self.re[k] += a * x.re[k];
            self.im[k] += a * x.im[k];
        }
    }
}

impl Generator {
    fn eval_lanes<const K: usize>(&self, t: f64, y: &[LaneBlock<K>], out: &mut [LaneBlock<K>]) {
        let levels = self.levels();
        let v = self.drive(t);
        let (vr, vi) = (v.re, v.im);
        let hg = self.half_g;
        let free = match self.picture {
            Picture::Interaction => 0.0,
            Picture::Schroedinger => self.omega0,
        };
        let up = &self.up[..levels];
        let down = &self.down[..levels];
        let y = &y[..levels];
        let out = &mut out[..levels];
        let mut below = [0.0; K];
        for n in 0..levels {
            let b = &y[n];
            let (u, d) = (up[n], down[n]);
            let above_rate = if n + 1 < levels { up[n + 1] } else { 0.0 };
            let above = if n + 1 < levels {
                y[n + 1].s00
            } else {
                [0.0; K]
            };
            let o = &mut out[n];
            for k in 0..K {
                let coherent = -2.0 * (vr * b.im[k] - vi * b.re[k]);
                let dz = b.s00[k] - b.s11[k];
                o.s00[k] = coherent - u * b.s00[k] + below[k];
                o.s11[k] = -coherent - d * b.s11[k] + above_rate * above[k];
                o.re[k] = -vi * dz - hg * b.re[k] - free * b.im[k];
                o.im[k] = vr * dz - hg * b.im[k] + free * b.re[k];
                below[k] = d * b.s11[k];
            }
        }
    }
}

/// Integrates K initial states in lockstep and calls `observe(t, reduced)`
/// with the reduced sum Σₙ σ(n) of each lane at every sample.
///
/// Same step sequence and arithmetic per lane as [`integrate_with`].
pub fn integrate_reduced<const K: usize, F>(
    initials: [&FemeState; K],
    params: &ModelParams,
    cfg: &IntegratorConfig,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(f64, &[QubitBlock; K]),
{
    cfg.validate()?;
    let gen = Generator::new(params, cfg.picture)?;
    let levels = gen.levels();
    let mut y = vec![LaneBlock::<K>::ZERO; levels];
    for (k, s) in initials.iter().enumerate() {
        if s.levels() != levels {
            return Err(FemeError::Shape {
                expected: levels,
                got: s.levels(),
            });
        }
        check_finite(&s.blocks, 0.0)?;
        for (n, b) in s.blocks.iter().enumerate() {
            y[n].s00[k] = b.s00;
            y[n].s11[k] = b.s11;
            y[n].re[k] = b.s01.re;
            y[n].im[k] = b.s01.im;
        }
    }
    let reduce = |y: &[LaneBlock<K>], t: f64| -> Result<[QubitBlock; K]> {
        let mut acc = [QubitBlock::ZERO; K];
        for b in y {
            for (k, a) in acc.iter_mut().enumerate() {
                a.s00 += b.s00[k];
                a.s11 += b.s11[k];
                a.s01.re += b.re[k];
                a.s01.im += b.im[k];
            }
        }
        if acc.iter().any(|a| !a.is_finite()) {
            // Locate the offending block for the diagnostic.
            let block = y
                .iter()
                .position(|b| {
                    (0..K).any(|k| {
                        !(b.s00[k].is_finite()
                            && b.s11[k].is_finite()
                            && b.re[k].is_finite()
                            && b.im[k].is_finite())
                    })
                })
                .unwrap_or(0);
            return Err(FemeError::NonFinite { time: t, block });
        }
        Ok(acc)
    };
    observe(0.0, &reduce(&y, 0.0)?);

    let steps = cfg.steps();
    let h = cfg.effective_dt();
    let half = 0.5 * h;
    let w = h / 6.0;
    let mut k1 = vec![LaneBlock::<K>::ZERO; levels];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let stage = |out: &mut [LaneBlock<K>], y: &[LaneBlock<K>], a: f64, k: &[LaneBlock<K>]| {
        for ((o, yn), kn) in out.iter_mut().zip(y).zip(k) {
            *o = *yn;
            o.axpy(a, kn);
        }
    };
    for step in 0..steps {
        let t = cfg.t_end * step as f64 / steps as f64;
        gen.eval_lanes(t, &y, &mut k1);
        stage(&mut tmp, &y, half, &k1);
        gen.eval_lanes(t + half, &tmp, &mut k2);
        stage(&mut tmp, &y, half, &k2);
        gen.eval_lanes(t + half, &tmp, &mut k3);
        stage(&mut tmp, &y, h, &k3);
        gen.eval_lanes(t + h, &tmp, &mut k4);
        for n in 0..levels {
            let mut incr = k1[n];
            incr.axpy(2.0, &k2[n]);
            incr.axpy(2.0, &k3[n]);
            incr.axpy(1.0, &k4[n]);
            y[n].axpy(w, &incr);
        }
        let done = step + 1;
        if done % cfg.sample_every == 0 || done == steps {
            let t_next = cfg.t_end * done as f64 / steps as f64;
            let r = reduce(&y, t_next)?;
            if done % cfg.sample_every == 0 {
                observe(t_next, &r);
            }
        }
    }
    Ok(())
}

/// Sampled trajectory with full block snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<FemeState>,
    pub picture: Picture,
}

impl TrajectoryRecord {
    /// Largest deviation of the total trace from its mode value.
    pub fn max_trace_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.total_trace() - s.mode.expected_trace()).abs())
            .fold(0.0, f64::max)
    }
}

/// Integrates and stores every sampled snapshot.
///
/// Memory grows as samples × (N + 1); use [`integrate_with`] for long runs at
/// large N.
pub fn integrate(
    initial: &FemeState,
    params: &ModelParams,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryRecord> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    integrate_with(initial, params, cfg, |t, blocks| {
        times.push(t);
        states.push(FemeState::new(blocks.to_vec(), t, initial.mode));
    })?;
    Ok(TrajectoryRecord {
        times,
        states,
        picture: cfg.picture,
    })
}

/// Maps blocks between pictures at time `t`: σ₀₁ᴵ = σ₀₁ˢ e^{−iω₀t}.
pub fn to_interaction(blocks: &mut [QubitBlock], omega0: f64, t: f64) {
    let phase = Complex64::from_polar(1.0, -omega0 * t);
    for b in blocks {
        b.s01 *= phase;
    }
}

pub fn to_schroedinger(blocks: &mut [QubitBlock], omega0: f64, t: f64) {
    to_interaction(blocks, omega0, -t);
}

/// Closed-form qubit trace distance of the undriven model for the thermal
/// initial condition: √(f² cos²θ + h² sin²θ) with
/// f(t) = (N e^{−g(1+1/N)t} + 1)/(N+1) and h(t) = e^{−gt/2}.
///
/// The drive amplitude in `params` is ignored.
pub fn analytic_undriven_distance(theta: f64, params: &ModelParams, t: f64) -> f64 {
    let n = params.n_units as f64;
    let g = params.g;
    let f = (n * (-g * (1.0 + 1.0 / n) * t).exp() + 1.0) / (n + 1.0);
    let h = (-0.5 * g * t).exp();
    let (s, c) = theta.sin_cos();
    (f * c).hypot(h * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{build_difference_state, BlochPair, StateMode, ALGEBRAIC_TOL};
    use approx::assert_abs_diff_eq;

    fn random_state(levels: usize, seed: u64) -> FemeState {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let blocks = (0..levels)
            .map(|_| {
                QubitBlock::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            })
            .collect();
        FemeState::new(blocks, 0.0, StateMode::Difference)
    }

    #[test]
    fn derivative_is_traceless() {
        let p = ModelParams::new(0.08, 0.066, 2.0, 20).unwrap();
        for (seed, t) in [(1, 0.0), (2, 0.37), (3, 11.0)] {
            let s = random_state(21, seed);
            for picture in [Picture::Interaction, Picture::Schroedinger] {
                let d = feme_rhs_in(&s, t, &p, picture).unwrap();
                assert!(d.total_trace().abs() < ALGEBRAIC_TOL);
            }
        }
    }

    #[test]
    fn undriven_keeps_coherence_zero() {
        let p = ModelParams::new(0.0, 0.1, 2.0, 5).unwrap();
        let mut s = random_state(6, 7);
        for b in &mut s.blocks {
            b.s01 = Complex64::new(0.0, 0.0);
        }
        let d = feme_rhs(&s, 1.3, &p).unwrap();
        assert!(d.blocks.iter().all(|b| b.s01 == Complex64::new(0.0, 0.0)));
        // Population part is the birth-death chain.
        let (up, down) = p.rate_tables();
        for n in 0..6 {
            let mut d00 = -up[n] * s.blocks[n].s00;
            let mut d11 = -down[n] * s.blocks[n].s11;
            if n > 0 {
                d00 += down[n - 1] * s.blocks[n - 1].s11;
            }
            if n < 5 {
                d11 += up[n + 1] * s.blocks[n + 1].s00;
            }
            assert_abs_diff_eq!(d.blocks[n].s00, d00, epsilon = 1e-15);
            assert_abs_diff_eq!(d.blocks[n].s11, d11, epsilon = 1e-15);
        }
    }

    #[test]
    fn initial_rate_of_distance_is_negative_for_reference_pair() {
        let p = ModelParams::new(0.08, 0.066, 2.0, 20).unwrap();
        let d0 = build_difference_state(&BlochPair::new(1.69, 0.0).unwrap(), &p).unwrap();
        let dd = feme_rhs(&d0, 0.0, &p).unwrap();
        let r = d0.reduce();
        let dr = dd.reduce();
        // d/dt √(x² + |c|²) with x = (σ00 − σ11)/2
        let x = 0.5 * (r.s00 - r.s11);
        let dx = 0.5 * (dr.s00 - dr.s11);
        let dist = x.hypot(r.s01.norm());
        let rate = (x * dx + (r.s01.conj() * dr.s01).re) / dist;
        assert!(rate < 0.0, "rate = {rate}");
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let p = ModelParams::new(0.08, 0.066, 2.0, 20).unwrap();
        let s = FemeState::zeros(5, StateMode::Difference);
        assert_eq!(
            feme_rhs(&s, 0.0, &p),
            Err(FemeError::Shape {
                expected: 21,
                got: 5
            })
        );
        assert!(integrate(&s, &p, &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn step_grid_hits_t_end() {
        let cfg = IntegratorConfig::default();
        assert_eq!(cfg.steps(), 100_000);
        let times = cfg.with_t_end(10.0).with_dt(0.3).sample_times();
        assert_eq!(times.len(), 35);
        assert_eq!(*times.last().unwrap(), 10.0);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn non_finite_is_detected() {
        let p = ModelParams::new(0.08, 0.066, 2.0, 2).unwrap();
        let mut s = FemeState::zeros(3, StateMode::Difference);
        s.blocks[1].s00 = f64::NAN;
        let err = integrate(&s, &p, &IntegratorConfig::default().with_t_end(1.0)).unwrap_err();
        assert_eq!(
            err,
            FemeError::NonFinite {
                time: 0.0,
                block: 1
            }
        );
    }

    #[test]
    fn analytic_limits() {
        let p = ModelParams::new(0.0, 0.066, 2.0, 20).unwrap();
        for theta in [0.0, 0.7, 2.0] {
            assert_abs_diff_eq!(
                analytic_undriven_distance(theta, &p, 0.0),
                1.0,
                epsilon = 1e-15
            );
        }
        let t = 13.0;
        assert_abs_diff_eq!(
            analytic_undriven_distance(std::f64::consts::FRAC_PI_2, &p, t),
            (-0.5 * 0.066 * t).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            analytic_undriven_distance(0.0, &p, 1e5),
            1.0 / 21.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pictures_are_related_by_phase() {
        let p = ModelParams::new(0.1, 0.05, 2.0, 3).unwrap();
        let s0 = build_difference_state(&BlochPair::new(0.9, 0.3).unwrap(), &p).unwrap();
        let base = IntegratorConfig::default()
            .with_t_end(20.0)
            .with_dt(2.0 * PI / 4000.0);
        let ip = integrate_with(&s0, &p, &base, |_, _| {}).unwrap();
        let cfg = IntegratorConfig {
            picture: Picture::Schroedinger,
            ..base
        };
        let mut sp = integrate_with(&s0, &p, &cfg, |_, _| {}).unwrap();
        to_interaction(&mut sp.blocks, 1.0, 20.0);
        for (a, b) in ip.blocks.iter().zip(&sp.blocks) {
            assert_abs_diff_eq!(a.s00, b.s00, epsilon = 1e-10);
            assert_abs_diff_eq!(a.s01.re, b.s01.re, epsilon = 1e-10);
            assert_abs_diff_eq!(a.s01.im, b.s01.im, epsilon = 1e-10);
        }
    }
}
