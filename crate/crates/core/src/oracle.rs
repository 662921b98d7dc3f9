// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Reference computations that share no code path with the production
//! measures. Used by tests and by the `selftest` command.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::state::FemeState;

/// Largest calorimeter for which the dense matrix is built.
pub const MAX_BRUTE_FORCE_UNITS: usize = 10;

/// Half the trace norm of Σₙ Δσ(n) ⊗ σ_c(Eₙ), built explicitly on the
/// 2·2^N-dimensional qubit ⊗ calorimeter space and diagonalized.
///
/// σ_c(Eₙ) is the uniform mixture of all N-bit microstates with n bits set.
/// Returns `None` if the state does not have N + 1 blocks for some
/// N ≤ [`MAX_BRUTE_FORCE_UNITS`].
pub fn full_space_distance(diff: &FemeState) -> Option<f64> {
    let n_units = diff.levels().checked_sub(1)?;
    if n_units == 0 || n_units > MAX_BRUTE_FORCE_UNITS {
        return None;
    }
    let micro = 1usize << n_units;
    let dim = 2 * micro;
    let shell_size: Vec<f64> = (0..=n_units).map(|n| binomial(n_units, n)).collect();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..micro {
        let n = k.count_ones() as usize;
        let b = diff.blocks[n];
        let w = 1.0 / shell_size[n];
        // qubit index q occupies the high bit: row = q * micro + k
        m[(k, k)] = Complex64::new(b.s00 * w, 0.0);
        m[(micro + k, micro + k)] = Complex64::new(b.s11 * w, 0.0);
        m[(k, micro + k)] = b.s01 * w;
        m[(micro + k, k)] = b.s01.conj() * w;
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    Some(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
