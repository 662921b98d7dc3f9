// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use feme_core::dynamics::{integrate_with, to_interaction};
use feme_core::measures::{distance_trace, internal_distance, RATE_FLOOR};
use feme_core::state::CONSERVATION_TOL;
use feme_core::sweep::linspace;
use feme_core::{
    build_difference_state, run_sweep, BlochPair, BlpSearch, FemeState, IntegratorConfig,
    ModelParams, Picture, QubitBlock, SweepSpec,
};
use num_complex::Complex64;

fn operating_point() -> ModelParams {
    ModelParams::new(0.08, 0.066, 2.0, 20).unwrap()
}

fn pure(theta: f64, phi: f64) -> QubitBlock {
    let (s, c) = (0.5 * theta).sin_cos();
    let a = Complex64::new(c, 0.0);
    let b = Complex64::from_polar(s, phi);
    QubitBlock::new(c * c, s * s, a * b.conj())
}

fn final_blocks(
    initial: &FemeState,
    params: &ModelParams,
    cfg: &IntegratorConfig,
) -> Vec<QubitBlock> {
    integrate_with(initial, params, cfg, |_, _| {})
        .unwrap()
        .blocks
}

#[test]
fn traces_are_conserved_in_both_modes() {
    let params = operating_point();
    let cfg = IntegratorConfig::default().with_t_end(300.0 * PI);

    let state = FemeState::thermal_product(pure(0.9, 0.3), &params).unwrap();
    let mut worst = 0.0_f64;
    let mut psd = true;
    integrate_with(&state, &params, &cfg, |_, blocks| {
        worst = worst.max((blocks.iter().map(QubitBlock::trace).sum::<f64>() - 1.0).abs());
        psd &= blocks.iter().all(|b| b.is_psd(1e-12));
    })
    .unwrap();
    assert!(worst < CONSERVATION_TOL, "state drift {worst:e}");
    assert!(psd, "a conditional block lost positivity");

    let diff = build_difference_state(&BlochPair::new(1.69, 0.0).unwrap(), &params).unwrap();
    let mut worst = 0.0_f64;
    integrate_with(&diff, &params, &cfg, |_, blocks| {
        worst = worst.max(blocks.iter().map(QubitBlock::trace).sum::<f64>().abs());
    })
    .unwrap();
    assert!(worst < CONSERVATION_TOL, "difference drift {worst:e}");
}

#[test]
fn evolution_is_linear() {
    let params = operating_point();
    let cfg = IntegratorConfig::default().with_t_end(50.0 * PI);
    let a = FemeState::thermal_product(pure(0.4, 0.0), &params).unwrap();
    let b = FemeState::thermal_product(pure(2.2, 1.3), &params).unwrap();
    let mixed = a.combine(0.35, &b, 0.65).unwrap();
    let fa = final_blocks(&a, &params, &cfg);
    let fb = final_blocks(&b, &params, &cfg);
    let fm = final_blocks(&mixed, &params, &cfg);
    for n in 0..params.levels() {
        let expect = 0.35 * fa[n] + 0.65 * fb[n];
        let err = (fm[n] - expect).half_trace_norm();
        assert!(err < 1e-13, "block {n}: {err:e}");
    }
}

#[test]
fn difference_of_states_equals_evolved_difference() {
    let params = operating_point();
    let cfg = IntegratorConfig::default().with_t_end(40.0 * PI);
    let theta = 1.69;
    let rho1 = FemeState::thermal_product(pure(theta, 0.0), &params).unwrap();
    let rho2 = FemeState::thermal_product(pure(theta + PI, 0.0), &params).unwrap();
    let diff = build_difference_state(&BlochPair::new(theta, 0.0).unwrap(), &params).unwrap();
    let f1 = final_blocks(&rho1, &params, &cfg);
    let f2 = final_blocks(&rho2, &params, &cfg);
    let fd = final_blocks(&diff, &params, &cfg);
    for n in 0..params.levels() {
        assert!((fd[n] - (f1[n] - f2[n])).half_trace_norm() < 1e-13);
    }
}

#[test]
fn schroedinger_and_interaction_pictures_agree() {
    let params = operating_point();
    // The Schrödinger picture carries the fast ω₀ rotation, so a finer step
    // is needed to push its phase error below the comparison tolerance.
    let base = IntegratorConfig::default()
        .with_t_end(40.0 * PI)
        .with_dt(2.0 * PI / 2000.0);
    let diff = build_difference_state(&BlochPair::new(1.3, 0.7).unwrap(), &params).unwrap();
    let mut inter = Vec::new();
    integrate_with(&diff, &params, &base, |_, b| inter.push(b.to_vec())).unwrap();
    let schr_cfg = IntegratorConfig {
        picture: Picture::Schroedinger,
        ..base
    };
    let mut k = 0;
    let mut worst = 0.0_f64;
    integrate_with(&diff, &params, &schr_cfg, |t, b| {
        let mut mapped = b.to_vec();
        to_interaction(&mut mapped, params.omega0, t);
        for (x, y) in mapped.iter().zip(&inter[k]) {
            worst = worst.max((*x - *y).half_trace_norm());
        }
        k += 1;
    })
    .unwrap();
    assert_eq!(k, inter.len());
    assert!(worst < 1e-8, "picture mismatch {worst:e}");
}

#[test]
fn halving_the_step_changes_nothing_visible() {
    let params = operating_point();
    let pair = BlochPair::new(1.69, 0.0).unwrap();
    let coarse = IntegratorConfig::default().with_t_end(200.0 * PI);
    let fine = IntegratorConfig {
        dt: coarse.dt / 2.0,
        sample_every: 2,
        ..coarse
    };
    let a = distance_trace(&pair, &params, &coarse).unwrap();
    let b = distance_trace(&pair, &params, &fine).unwrap();
    assert_eq!(a.times, b.times);
    let worst = a
        .i_int
        .iter()
        .zip(&b.i_int)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst:e}");
}

#[test]
fn undriven_distance_never_grows() {
    let params = ModelParams::new(0.0, 0.066, 2.0, 20).unwrap();
    for theta in [0.3, 1.69, 2.9] {
        let trace = distance_trace(
            &BlochPair::new(theta, 0.0).unwrap(),
            &params,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(trace.i_int.windows(2).all(|w| w[1] <= w[0] + 1e-14));
        assert!(trace.crossings.is_empty());
    }
}

#[test]
fn total_distance_never_grows_under_drive() {
    let params = operating_point();
    let trace = distance_trace(
        &BlochPair::new(1.69, 0.0).unwrap(),
        &params,
        &IntegratorConfig::default(),
    )
    .unwrap();
    assert!(trace.d_total.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    assert!(trace.rate_total().iter().all(|&r| r <= RATE_FLOOR));
    // The qubit part alone does recover information.
    assert!(trace.rate_int.iter().any(|&r| r > RATE_FLOOR));
    assert!(trace.i_ext.iter().all(|&e| e >= -1e-15));
}

#[test]
fn reduced_distance_is_bounded() {
    let params = operating_point();
    let diff = build_difference_state(&BlochPair::new(0.8, 2.0).unwrap(), &params).unwrap();
    let cfg = IntegratorConfig::default().with_t_end(100.0 * PI);
    integrate_with(&diff, &params, &cfg, |_, blocks| {
        let reduced = blocks.iter().fold(QubitBlock::ZERO, |acc, b| acc + *b);
        let d = internal_distance(&reduced).unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&d));
    })
    .unwrap();
}

#[test]
fn sweeps_do_not_depend_on_worker_count() {
    let spec = SweepSpec {
        lambda0_values: linspace(0.02, 0.18, 3),
        g_values: linspace(0.02, 0.18, 3),
        n_units: 4,
    };
    let cfg = IntegratorConfig::default().with_t_end(100.0);
    let search = BlpSearch {
        angle_step: 0.3,
        ..BlpSearch::default()
    };
    let base = ModelParams::default();
    let one = run_sweep(&spec, &base, &cfg, &search, 1).unwrap();
    for workers in [2, 4, 0] {
        let other = run_sweep(&spec, &base, &cfg, &search, workers).unwrap();
        assert_eq!(one, other, "workers = {workers}");
    }
    assert_eq!(one.cells.len(), 9);
    assert!(one.cells.iter().all(|c| c.error.is_none()));
}
