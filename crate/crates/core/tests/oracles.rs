// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dynamics against references that share no code with the integrator.

use std::f64::consts::FRAC_PI_2;

use feme_core::dynamics::integrate_with;
use feme_core::measures::{distance_trace, external_distance};
use feme_core::oracle::full_space_distance;
use feme_core::{
    analytic_undriven_distance, build_difference_state, BlochPair, FemeState, IntegratorConfig,
    ModelParams, QubitBlock,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[test]
fn undriven_distance_follows_closed_form() {
    let cfg = IntegratorConfig::default();
    for n_units in [1, 5] {
        for g in [0.01, 0.2] {
            for theta in [0.0, 0.7, FRAC_PI_2] {
                let params = ModelParams::new(0.0, g, 2.0, n_units).unwrap();
                let trace =
                    distance_trace(&BlochPair::new(theta, 0.0).unwrap(), &params, &cfg).unwrap();
                for (t, i) in trace.times.iter().zip(&trace.i_int) {
                    let exact = analytic_undriven_distance(theta, &params, *t);
                    assert!(
                        (i - exact).abs() < 1e-6,
                        "N={n_units} g={g} θ={theta} t={t}: {i} vs {exact}"
                    );
                }
            }
        }
    }
}

/// Generator of the populations (P₀(n), P₁(n)) of the undriven model,
/// assembled directly from the jump rates: an excited qubit decays while the
/// calorimeter gains a quantum, and vice versa.
fn population_generator(n_units: usize, g: f64) -> DMatrix<f64> {
    let levels = n_units + 1;
    let nn = n_units as f64;
    let idx0 = |n: usize| n;
    let idx1 = |n: usize| levels + n;
    let mut m = DMatrix::zeros(2 * levels, 2 * levels);
    for n in 0..levels {
        let absorb = g * n as f64 / nn; // |0,n⟩ → |1,n−1⟩
        let emit = g * (nn - n as f64) / nn; // |1,n⟩ → |0,n+1⟩
        m[(idx0(n), idx0(n))] -= absorb;
        if n > 0 {
            m[(idx1(n - 1), idx0(n))] += absorb;
        }
        m[(idx1(n), idx1(n))] -= emit;
        if n < n_units {
            m[(idx0(n + 1), idx1(n))] += emit;
        }
    }
    m
}

#[test]
fn undriven_populations_match_matrix_exponential() {
    for (n_units, g) in [(1, 0.2), (4, 0.066), (12, 0.1)] {
        let params = ModelParams::new(0.0, g, 2.0, n_units).unwrap();
        let excited = QubitBlock::new(0.3, 0.7, Complex64::new(0.2, -0.1));
        let initial = FemeState::thermal_product(excited, &params).unwrap();
        let levels = n_units + 1;
        let p0 = DVector::from_iterator(
            2 * levels,
            initial
                .blocks
                .iter()
                .map(|b| b.s00)
                .chain(initial.blocks.iter().map(|b| b.s11)),
        );
        let m = population_generator(n_units, g);
        let cfg = IntegratorConfig::default().with_t_end(60.0);
        let mut checked = 0;
        integrate_with(&initial, &params, &cfg, |t, blocks| {
            let k = (t / cfg.effective_dt()).round() as usize;
            if !k.is_multiple_of(500) {
                return;
            }
            let exact = (&m * t).exp() * &p0;
            for n in 0..levels {
                assert!((blocks[n].s00 - exact[n]).abs() < 1e-10, "t={t} n={n}");
                assert!(
                    (blocks[n].s11 - exact[levels + n]).abs() < 1e-10,
                    "t={t} n={n}"
                );
                // Coherences only dephase, at half the coupling.
                let coh = initial.blocks[n].s01 * (-0.5 * g * t).exp();
                assert!((blocks[n].s01 - coh).norm() < 1e-10, "t={t} n={n}");
            }
            checked += 1;
        })
        .unwrap();
        assert!(checked >= 4);
    }
}

#[test]
fn evolved_total_distance_matches_dense_matrix() {
    let params = ModelParams::new(0.12, 0.1, 2.0, 3).unwrap();
    let diff = build_difference_state(&BlochPair::new(1.1, 0.4).unwrap(), &params).unwrap();
    let cfg = IntegratorConfig::default().with_t_end(40.0);
    let mut checked = 0;
    integrate_with(&diff, &params, &cfg, |t, blocks| {
        let k = (t / cfg.effective_dt()).round() as usize;
        if !k.is_multiple_of(100) {
            return;
        }
        let state = FemeState::new(blocks.to_vec(), t, diff.mode);
        let (blockwise, _) = external_distance(&state).unwrap();
        let full = full_space_distance(&state).unwrap();
        assert!(
            (blockwise - full).abs() < 1e-10,
            "t={t}: {blockwise} vs {full}"
        );
        checked += 1;
    })
    .unwrap();
    assert!(checked > 10);
}
