// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Trace distances, information backflow and the BLP maximization.
//!
//! The pair of initial states is propagated as a single difference state.
//! For the angle search the dynamics are linear, so the reduced difference for
//! any Bloch pair is a fixed combination of three basis trajectories
//! (p_n σ_z, p_n σ_x and p_n σ_y-like initial blocks). Only those are integrated;
//! every grid angle is then evaluated from the stored reduced sums.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate_reduced, integrate_with, IntegratorConfig};
use crate::error::{FemeError, Result};
use crate::model::ModelParams;
use crate::state::{
    build_difference_state, reduce_state, BlochPair, FemeState, QubitBlock, StateMode,
    CONSERVATION_TOL,
};

/// Ascending runs of the qubit distance smaller than this are rounding noise.
pub const BLP_FLOOR: f64 = 1e-12;
/// Rates with magnitude below this carry no sign information.
pub const RATE_FLOOR: f64 = 1e-10;
/// Default angular resolution of the Bloch-sphere grid.
pub const DEFAULT_ANGLE_STEP: f64 = 0.08;

/// Half the trace norm of a traceless Hermitian 2×2 matrix, √(Δ₀₀² + |Δ₀₁|²).
pub fn internal_distance(block_sum: &QubitBlock) -> Result<f64> {
    if block_sum.trace().abs() > CONSERVATION_TOL {
        return Err(FemeError::Contract(format!(
            "internal distance needs a traceless matrix, trace = {}",
            block_sum.trace()
        )));
    }
    Ok(qubit_distance(
        0.5 * (block_sum.s00 - block_sum.s11),
        block_sum.s01,
    ))
}

#[inline]
fn qubit_distance(half_z: f64, coherence: Complex64) -> f64 {
    (half_z * half_z + coherence.norm_sqr()).sqrt()
}

/// Total-state trace distance and the part of it not visible in the qubit.
///
/// The full difference Σₙ Δσ(n) ⊗ σ_c(Eₙ) is block diagonal over calorimeter
/// microstates with each shell carrying Δσ(n)/N(Eₙ) on N(Eₙ) microstates, so
/// the shell multiplicities cancel and d_total = ½ Σₙ ‖Δσ(n)‖₁.
pub fn external_distance(diff: &FemeState) -> Result<(f64, f64)> {
    if diff.mode != StateMode::Difference {
        return Err(FemeError::Contract(
            "external distance is defined for difference states only".into(),
        ));
    }
    let d_total = total_distance(&diff.blocks);
    let i_int = internal_distance(&reduce_state(diff))?;
    Ok((d_total, d_total - i_int))
}

fn total_distance(blocks: &[QubitBlock]) -> f64 {
    blocks.iter().map(QubitBlock::half_trace_norm).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Negative to positive: information starts flowing back.
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub time: f64,
    pub direction: Direction,
}

/// Sampled distances, their rates and the sign changes of the qubit rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceTrace {
    pub times: Vec<f64>,
    pub i_int: Vec<f64>,
    pub i_ext: Vec<f64>,
    pub d_total: Vec<f64>,
    pub rate_int: Vec<f64>,
    pub rate_ext: Vec<f64>,
    pub crossings: Vec<Crossing>,
}

impl DistanceTrace {
    /// Builds a trace from sampled distances, differentiating numerically.
    pub fn from_samples(times: Vec<f64>, i_int: Vec<f64>, d_total: Vec<f64>) -> Self {
        let i_ext: Vec<f64> = d_total.iter().zip(&i_int).map(|(d, i)| d - i).collect();
        let rate_int = finite_difference(&times, &i_int);
        let rate_ext = finite_difference(&times, &i_ext);
        let crossings = sign_crossings(&times, &rate_int);
        Self {
            times,
            i_int,
            i_ext,
            d_total,
            rate_int,
            rate_ext,
            crossings,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Rate of the total distance, rate_int + rate_ext.
    pub fn rate_total(&self) -> Vec<f64> {
        self.rate_int
            .iter()
            .zip(&self.rate_ext)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// Qubit distance at the truncation time.
    pub fn tail_i_int(&self) -> f64 {
        self.i_int.last().copied().unwrap_or(0.0)
    }
}

/// Centered differences in the interior, one-sided at the ends.
///
/// One-sided first-order ends keep the sign of a monotone sequence.
pub fn finite_difference(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mut out = Vec::with_capacity(n);
    out.push((values[1] - values[0]) / (times[1] - times[0]));
    for k in 1..n - 1 {
        out.push((values[k + 1] - values[k - 1]) / (times[k + 1] - times[k - 1]));
    }
    out.push((values[n - 1] - values[n - 2]) / (times[n - 1] - times[n - 2]));
    out
}

/// Sign changes of `rates`, ignoring samples below [`RATE_FLOOR`].
///
/// The crossing time is linearly interpolated between the two samples that
/// bracket the first significant sample of the new sign.
pub fn sign_crossings(times: &[f64], rates: &[f64]) -> Vec<Crossing> {
    let mut out = Vec::new();
    let mut last_sign = 0i8;
    for k in 0..rates.len() {
        let r = rates[k];
        let sign = if r > RATE_FLOOR {
            1
        } else if r < -RATE_FLOOR {
            -1
        } else {
            0
        };
        if sign == 0 {
            continue;
        }
        if last_sign != 0 && sign != last_sign && k > 0 {
            let (t0, t1) = (times[k - 1], times[k]);
            let (r0, r1) = (rates[k - 1], r);
            let time = if r1 != r0 {
                (t0 - r0 * (t1 - t0) / (r1 - r0)).clamp(t0, t1)
            } else {
                t0
            };
            let direction = if sign > 0 {
                Direction::Up
            } else {
                Direction::Down
            };
            out.push(Crossing { time, direction });
        }
        last_sign = sign;
    }
    out
}

/// Information regained by the qubit: the summed rise of every ascending run of
/// the sampled qubit distance.
///
/// This telescopes ∫_{İ>0} İ dt over the samples. Runs rising by less than
/// [`BLP_FLOOR`] are discarded as rounding noise.
pub fn blp_from_series(i_int: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut run = 0.0;
    for w in i_int.windows(2) {
        let inc = w[1] - w[0];
        if inc > 0.0 {
            run += inc;
        } else {
            if run > BLP_FLOOR {
                total += run;
            }
            run = 0.0;
        }
    }
    if run > BLP_FLOOR {
        total += run;
    }
    total
}

pub fn blp_from_trace(trace: &DistanceTrace) -> f64 {
    blp_from_series(&trace.i_int)
}

/// First negative-to-positive crossing of the qubit rate.
pub fn backflow_onset(trace: &DistanceTrace) -> Option<f64> {
    first_up_crossing(&trace.crossings)
}

fn first_up_crossing(crossings: &[Crossing]) -> Option<f64> {
    crossings
        .iter()
        .find(|c| c.direction == Direction::Up)
        .map(|c| c.time)
}

/// Integrates the difference state of `pair` and samples all distances.
pub fn distance_trace(
    pair: &BlochPair,
    params: &ModelParams,
    cfg: &IntegratorConfig,
) -> Result<DistanceTrace> {
    let initial = build_difference_state(pair, params)?;
    distance_trace_from(&initial, params, cfg)
}

/// As [`distance_trace`] for an arbitrary difference state.
pub fn distance_trace_from(
    initial: &FemeState,
    params: &ModelParams,
    cfg: &IntegratorConfig,
) -> Result<DistanceTrace> {
    if initial.mode != StateMode::Difference {
        return Err(FemeError::Contract(
            "distance traces are defined for difference states only".into(),
        ));
    }
    let capacity = cfg.steps() / cfg.sample_every + 1;
    let mut times = Vec::with_capacity(capacity);
    let mut i_int = Vec::with_capacity(capacity);
    let mut d_total = Vec::with_capacity(capacity);
    let mut contract = Ok(());
    integrate_with(initial, params, cfg, |t, blocks| {
        let sum = blocks.iter().fold(QubitBlock::ZERO, |acc, b| acc + *b);
        match internal_distance(&sum) {
            Ok(i) => i_int.push(i),
            Err(e) => {
                if contract.is_ok() {
                    contract = Err(e);
                }
                i_int.push(f64::NAN);
            }
        }
        times.push(t);
        d_total.push(total_distance(blocks));
    })?;
    contract?;
    Ok(DistanceTrace::from_samples(times, i_int, d_total))
}

/// Angle grid and refinement options for the BLP maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlpSearch {
    pub angle_step: f64,
    /// Fix φ = 0 instead of scanning φ ∈ [0, π).
    pub restrict_phi: bool,
    /// Golden-section refinement of θ around the grid optimum.
    pub refine: bool,
}

impl Default for BlpSearch {
    fn default() -> Self {
        Self {
            angle_step: DEFAULT_ANGLE_STEP,
            restrict_phi: true,
            refine: true,
        }
    }
}

impl BlpSearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.angle_step.is_finite() && self.angle_step > 0.0 && self.angle_step < PI) {
            return Err(FemeError::InvalidParameter {
                name: "angle_step",
                reason: format!("must lie in (0, pi), got {}", self.angle_step),
            });
        }
        Ok(())
    }

    /// Grid angles k·step in [0, π).
    pub fn grid(&self) -> Vec<f64> {
        (0..)
            .map(|k| k as f64 * self.angle_step)
            .take_while(|&a| a < PI)
            .collect()
    }
}

/// Outcome of the maximization without the full distance trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlpSummary {
    pub value: f64,
    pub pair: BlochPair,
    pub t_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlpResult {
    pub value: f64,
    pub argmax_pair: BlochPair,
    pub t_r: Option<f64>,
    pub trace: DistanceTrace,
}

/// Reduced qubit differences of the basis trajectories.
///
/// Each basis stores (Δ₀₀ − Δ₁₁)/2 and Δ₀₁ per sample.
#[derive(Debug, Clone)]
pub struct ReducedBasis {
    pub times: Vec<f64>,
    z: BasisSeries,
    x: BasisSeries,
    y: Option<BasisSeries>,
}

#[derive(Debug, Clone, Default)]
struct BasisSeries {
    half_z: Vec<f64>,
    coherence: Vec<Complex64>,
}

impl ReducedBasis {
    /// Integrates the σ_z and σ_x basis states, and σ_y unless `restrict_phi`.
    pub fn compute(
        params: &ModelParams,
        cfg: &IntegratorConfig,
        restrict_phi: bool,
    ) -> Result<Self> {
        let weights = params.thermal_weights()?;
        let basis_state = |q: QubitBlock| {
            let blocks = weights.iter().map(|&p| p * q).collect();
            FemeState::new(blocks, 0.0, StateMode::Difference)
        };
        let zero = Complex64::new(0.0, 0.0);
        let sz = basis_state(QubitBlock::new(1.0, -1.0, zero));
        let sx = basis_state(QubitBlock::new(0.0, 0.0, Complex64::new(1.0, 0.0)));
        let capacity = cfg.steps() / cfg.sample_every + 1;
        let mut times = Vec::with_capacity(capacity);
        let mut series: Vec<BasisSeries> = (0..if restrict_phi { 2 } else { 3 })
            .map(|_| BasisSeries {
                half_z: Vec::with_capacity(capacity),
                coherence: Vec::with_capacity(capacity),
            })
            .collect();
        let mut push = |t: f64, reduced: &[QubitBlock]| {
            times.push(t);
            for (s, r) in series.iter_mut().zip(reduced) {
                s.half_z.push(0.5 * (r.s00 - r.s11));
                s.coherence.push(r.s01);
            }
        };
        if restrict_phi {
            integrate_reduced([&sz, &sx], params, cfg, |t, r| push(t, r))?;
        } else {
            let sy = basis_state(QubitBlock::new(0.0, 0.0, Complex64::new(0.0, 1.0)));
            integrate_reduced([&sz, &sx, &sy], params, cfg, |t, r| push(t, r))?;
        }
        let y = if restrict_phi { None } else { series.pop() };
        let x = series.pop().expect("x basis");
        let z = series.pop().expect("z basis");
        Ok(Self { times, z, x, y })
    }

    /// Qubit distance series of the pair at angles (θ, φ).
    ///
    /// φ ≠ 0 needs the σ_y basis.
    pub fn distance_series(&self, theta: f64, phi: f64) -> Vec<f64> {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let (wx, wy) = (st * cp, st * sp);
        let y = self.y.as_ref();
        assert!(
            y.is_some() || wy == 0.0,
            "phi != 0 requires the sigma_y basis"
        );
        (0..self.times.len())
            .map(|k| {
                let mut hz = ct * self.z.half_z[k] + wx * self.x.half_z[k];
                let mut c = self.z.coherence[k] * ct + self.x.coherence[k] * wx;
                if let Some(y) = y {
                    hz += wy * y.half_z[k];
                    c += y.coherence[k] * wy;
                }
                qubit_distance(hz, c)
            })
            .collect()
    }

    pub fn blp(&self, theta: f64, phi: f64) -> f64 {
        blp_from_series(&self.distance_series(theta, phi))
    }

    pub fn onset(&self, theta: f64, phi: f64) -> Option<f64> {
        let series = self.distance_series(theta, phi);
        let rates = finite_difference(&self.times, &series);
        first_up_crossing(&sign_crossings(&self.times, &rates))
    }
}

/// Golden-section maximization of `f` on [lo, hi].
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..iters {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Maximizes the backflow over the angle grid of `search` using precomputed
/// basis trajectories.
pub fn search_basis(basis: &ReducedBasis, search: &BlpSearch) -> Result<BlpSummary> {
    search.validate()?;
    let thetas = search.grid();
    let phis = if search.restrict_phi {
        vec![0.0]
    } else {
        search.grid()
    };
    let points: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&t| phis.iter().map(move |&p| (t, p)))
        .collect();
    let values: Vec<f64> = points.par_iter().map(|&(t, p)| basis.blp(t, p)).collect();

    // Ordered reduction: the first (smallest θ, then φ) of equal maxima wins.
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = k;
        }
    }
    let (mut theta, phi) = points[best];
    let mut value = values[best];

    if search.refine && value > 0.0 {
        let (t, v) = golden_max(
            |t| basis.blp(t, phi),
            theta - search.angle_step,
            theta + search.angle_step,
            30,
        );
        if v > value {
            theta = t.rem_euclid(PI);
            if theta >= PI {
                theta = 0.0;
            }
            value = v;
        }
    }
    let t_r = if value > BLP_FLOOR {
        basis.onset(theta, phi)
    } else {
        None
    };
    Ok(BlpSummary {
        value,
        pair: BlochPair { theta, phi },
        t_r,
    })
}

/// BLP measure maximized over the Bloch-sphere grid, without the trace of the
/// optimal pair.
pub fn blp_search(
    params: &ModelParams,
    cfg: &IntegratorConfig,
    search: &BlpSearch,
) -> Result<BlpSummary> {
    search.validate()?;
    let basis = ReducedBasis::compute(params, cfg, search.restrict_phi)?;
    search_basis(&basis, search)
}

/// BLP measure with the full distance trace of the optimal pair.
pub fn blp_measure(
    params: &ModelParams,
    cfg: &IntegratorConfig,
    search: &BlpSearch,
) -> Result<BlpResult> {
    let summary = blp_search(params, cfg, search)?;
    let trace = distance_trace(&summary.pair, params, cfg)?;
    let value = blp_from_trace(&trace);
    let t_r = if value > BLP_FLOOR {
        backflow_onset(&trace)
    } else {
        None
    };
    Ok(BlpResult {
        value,
        argmax_pair: summary.pair,
        t_r,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn traceless(d00: f64, c: Complex64) -> QubitBlock {
        QubitBlock::new(d00, -d00, c)
    }

    #[test]
    fn internal_distance_examples() {
        let z = Complex64::new(0.0, 0.0);
        assert_abs_diff_eq!(internal_distance(&traceless(0.6, z)).unwrap(), 0.6);
        assert_abs_diff_eq!(
            internal_distance(&traceless(0.0, Complex64::new(0.8, 0.0))).unwrap(),
            0.8
        );
        assert_abs_diff_eq!(
            internal_distance(&traceless(0.3, Complex64::new(0.0, 0.4))).unwrap(),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn internal_distance_rejects_trace() {
        let b = QubitBlock::new(0.5, 0.1, Complex64::new(0.0, 0.0));
        assert!(matches!(internal_distance(&b), Err(FemeError::Contract(_))));
    }

    #[test]
    fn external_distance_requires_difference_mode() {
        let s = FemeState::zeros(3, StateMode::State);
        assert!(external_distance(&s).is_err());
    }

    #[test]
    fn external_distance_single_block() {
        let mut s = FemeState::zeros(4, StateMode::Difference);
        s.blocks[2] = traceless(0.3, Complex64::new(0.0, 0.4));
        let (d, ext) = external_distance(&s).unwrap();
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ext, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn external_distance_at_start_is_zero() {
        let p = ModelParams::new(0.08, 0.066, 2.0, 20).unwrap();
        let d = build_difference_state(&BlochPair::new(1.69, 0.0).unwrap(), &p).unwrap();
        let (total, ext) = external_distance(&d).unwrap();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ext, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn blp_from_series_examples() {
        assert_eq!(blp_from_series(&[1.0, 0.8, 0.5, 0.1]), 0.0);
        assert_abs_diff_eq!(
            blp_from_series(&[1.0, 0.4, 0.6, 0.3, 0.35]),
            0.25,
            epsilon = 1e-15
        );
        assert_eq!(blp_from_series(&[]), 0.0);
        assert_eq!(blp_from_series(&[0.5, 0.5 + 1e-14, 0.4]), 0.0);
    }

    #[test]
    fn onset_interpolates_linearly() {
        let times = vec![0.0, 1.0, 2.0];
        let trace = DistanceTrace {
            times: times.clone(),
            i_int: vec![1.0, 0.5, 0.6],
            i_ext: vec![0.0; 3],
            d_total: vec![1.0; 3],
            rate_int: vec![-1.0, -0.5, 0.5],
            rate_ext: vec![0.0; 3],
            crossings: sign_crossings(&times, &[-1.0, -0.5, 0.5]),
        };
        assert_abs_diff_eq!(backflow_onset(&trace).unwrap(), 1.5);
    }

    #[test]
    fn onset_absent_for_monotone_decay() {
        let times: Vec<f64> = (0..100).map(|k| k as f64 * 0.1).collect();
        let values: Vec<f64> = times.iter().map(|t| (-0.3 * t).exp()).collect();
        let trace = DistanceTrace::from_samples(times, values.clone(), values);
        assert!(trace.crossings.is_empty());
        assert_eq!(backflow_onset(&trace), None);
        assert_eq!(blp_from_trace(&trace), 0.0);
    }

    #[test]
    fn crossings_skip_noise() {
        let times = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let rates = vec![-1.0, 1e-14, -1e-13, -0.5, 2.0];
        let c = sign_crossings(&times, &rates);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].direction, Direction::Up);
        assert_abs_diff_eq!(c[0].time, 3.2);
    }

    #[test]
    fn finite_difference_is_exact_on_lines() {
        let times = vec![0.0, 0.5, 1.5, 2.0];
        let values: Vec<f64> = times.iter().map(|t| 3.0 * t - 1.0).collect();
        for r in finite_difference(&times, &values) {
            assert_abs_diff_eq!(r, 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 60);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(fx, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn search_grid_covers_half_open_interval() {
        let s = BlpSearch::default();
        let g = s.grid();
        assert_eq!(g.len(), 40);
        assert!(*g.last().unwrap() < PI);
        assert!(BlpSearch {
            angle_step: 0.0,
            ..s
        }
        .validate()
        .is_err());
    }

    proptest::proptest! {
        #[test]
        fn internal_distance_is_symmetric_and_homogeneous(
            d in -1.0f64..1.0, re in -1.0f64..1.0, im in -1.0f64..1.0, c in 0.0f64..10.0
        ) {
            let m = traceless(d, Complex64::new(re, im));
            let base = internal_distance(&m).unwrap();
            let neg = internal_distance(&(-1.0 * m)).unwrap();
            let scaled = internal_distance(&(c * m)).unwrap();
            proptest::prop_assert!((base - neg).abs() <= 1e-15);
            proptest::prop_assert!((scaled - c * base).abs() <= 1e-14 * (1.0 + c));
        }

        #[test]
        fn blp_is_zero_iff_no_rise(values in proptest::collection::vec(0.0f64..1.0, 2..60)) {
            let v = blp_from_series(&values);
            let any_rise = values.windows(2).any(|w| w[1] - w[0] > BLP_FLOOR);
            proptest::prop_assert_eq!(v > 0.0, any_rise);
            proptest::prop_assert!(v >= 0.0);
        }
    }
}
