// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::FRAC_PI_2;

use feme_core::dynamics::integrate_with;
use feme_core::measures::distance_trace;
use feme_core::oracle::full_space_distance;
use feme_core::state::CONSERVATION_TOL;
use feme_core::sweep::{run_sweep_with, synthetic_ridge};
use feme_core::{
    analytic_undriven_distance, blp_measure, external_distance, extract_ridge, run_sweep, tr_scan,
    Direction, FemeState, IntegratorConfig, ModelParams, QubitBlock, RidgeFit, StateMode,
    SweepGrid, SweepSpec,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{json_number, json_opt, Cell, OutputDir, Table};

fn output_dir(cfg: &RunConfig) -> OutputDir {
    OutputDir::new(&cfg.output.dir, cfg.output.format, cfg.output.precision)
}

fn echo_config(out: &mut OutputDir, cfg: &RunConfig) -> Result<(), CliError> {
    out.write_text("config.toml", &cfg.to_toml())?;
    Ok(())
}

/// Distance trace of the configured pair.
pub fn trace(cfg: &RunConfig) -> Result<OutputDir, CliError> {
    let params = cfg.params();
    let trace = distance_trace(&cfg.pair(), &params, &cfg.integrator())?;
    let mut out = output_dir(cfg);

    let mut table = Table::new(&[
        "t",
        "i_int",
        "i_ext",
        "d_total",
        "rate_int",
        "rate_ext",
        "rate_total",
    ]);
    let rate_total = trace.rate_total();
    for k in 0..trace.len() {
        table.push(vec![
            trace.times[k].into(),
            trace.i_int[k].into(),
            trace.i_ext[k].into(),
            trace.d_total[k].into(),
            trace.rate_int[k].into(),
            trace.rate_ext[k].into(),
            rate_total[k].into(),
        ]);
    }
    out.write_table("trace", &table)?;

    let mut crossings = Table::new(&["t", "direction"]);
    for c in &trace.crossings {
        let dir = match c.direction {
            Direction::Up => "up",
            Direction::Down => "down",
        };
        crossings.push(vec![c.time.into(), Cell::Text(dir.into())]);
    }
    out.write_table("crossings", &crossings)?;
    echo_config(&mut out, cfg)?;
    Ok(out)
}

/// BLP maximization at the configured (λ₀, g, N).
pub fn blp(cfg: &RunConfig) -> Result<OutputDir, CliError> {
    let result = blp_measure(&cfg.params(), &cfg.integrator(), &cfg.search())?;
    let mut out = output_dir(cfg);
    let d = out.digits();
    let value = json!({
        "value": json_number(result.value, d),
        "theta": json_number(result.argmax_pair.theta, d),
        "phi": json_number(result.argmax_pair.phi, d),
        "t_r": json_opt(result.t_r, d),
        "tail_i_int": json_number(result.trace.tail_i_int(), d),
    });
    out.write_json("blp.json", &value)?;
    echo_config(&mut out, cfg)?;
    Ok(out)
}

fn sweep_for(
    cfg: &RunConfig,
    n_units: usize,
    synthetic: Option<f64>,
) -> Result<SweepGrid, CliError> {
    let spec = SweepSpec {
        lambda0_values: cfg.sweep.lambda0.values(),
        g_values: cfg.sweep.g.values(),
        n_units,
    };
    let base = cfg.params();
    let grid = match synthetic {
        Some(ratio) => run_sweep_with(&spec, &base, cfg.workers, synthetic_ridge(ratio))?,
        None => run_sweep(
            &spec,
            &base,
            &cfg.integrator(),
            &cfg.cell_search(),
            cfg.workers,
        )?,
    };
    for cell in grid.failed_cells() {
        eprintln!(
            "warning: N={n_units} cell lambda0={} g={} failed: {}",
            cell.lambda0,
            cell.g,
            cell.error.as_deref().unwrap_or("")
        );
    }
    Ok(grid)
}

fn ridge_json(ridge: Option<&RidgeFit>, digits: usize) -> Value {
    match ridge {
        Some(r) => json!({
            "a_n": json_number(r.a_n, digits),
            "n_max": json_number(r.n_max, digits),
            "peak_lambda0": json_number(r.peak_lambda0, digits),
            "peak_g": json_number(r.peak_g, digits),
            "residual": json_number(r.residual, digits),
        }),
        // No cell shows backflow: the whole grid is Markovian.
        None => json!({
            "a_n": null,
            "n_max": 0,
            "peak_lambda0": null,
            "peak_g": null,
            "residual": null,
        }),
    }
}

/// BLP grids over (λ₀, g) and their ridges, one pair of files per size.
pub fn sweep(cfg: &RunConfig, synthetic: Option<f64>) -> Result<OutputDir, CliError> {
    let mut out = output_dir(cfg);
    for &n_units in &cfg.sweep.n_units {
        let grid = sweep_for(cfg, n_units, synthetic)?;
        let mut table = Table::new(&["lambda0", "g", "blp", "theta_max", "t_r"]);
        for c in &grid.cells {
            let failed = c.error.is_some();
            table.push(vec![
                c.lambda0.into(),
                c.g.into(),
                if failed {
                    Cell::Missing
                } else {
                    c.value.into()
                },
                if failed {
                    Cell::Missing
                } else {
                    c.theta.into()
                },
                c.t_r.into(),
            ]);
        }
        out.write_table(&format!("sweep_N{n_units}"), &table)?;
        let ridge = extract_ridge(&grid);
        let d = out.digits();
        out.write_json(
            &format!("ridge_N{n_units}.json"),
            &ridge_json(ridge.as_ref(), d),
        )?;
        match &ridge {
            Some(r) => eprintln!("N={n_units}: a_N = {:.4}, peak BLP = {:.4}", r.a_n, r.n_max),
            None => eprintln!("N={n_units}: no backflow anywhere on the grid"),
        }
    }
    echo_config(&mut out, cfg)?;
    Ok(out)
}

/// Onset times along each ridge and their log-log fits.
pub fn trscan(cfg: &RunConfig) -> Result<OutputDir, CliError> {
    let mut out = output_dir(cfg);
    let d = out.digits();
    let lambda0_values = cfg.trscan.lambda0.values();
    let mut fits = Map::new();
    for &n_units in &cfg.trscan.n_units {
        let a_n = match cfg.ratio_for(n_units) {
            Some(a) => Some(a),
            None => extract_ridge(&sweep_for(cfg, n_units, None)?).map(|r| r.a_n),
        };
        let Some(a_n) = a_n else {
            eprintln!("N={n_units}: no ridge, scan skipped");
            fits.insert(
                n_units.to_string(),
                json!({ "a_n": null, "slope": null, "intercept": null,
                        "points": 0, "underdetermined": true, "skipped": [] }),
            );
            continue;
        };
        let scan = tr_scan(
            n_units,
            a_n,
            &lambda0_values,
            &cfg.params(),
            &cfg.integrator(),
            &cfg.search(),
            cfg.workers,
        )?;
        let mut table = Table::new(&["lambda0", "g", "t_r"]);
        for p in &scan.points {
            table.push(vec![p.lambda0.into(), p.g.into(), p.t_r.into()]);
        }
        out.write_table(&format!("trscan_N{n_units}"), &table)?;
        let skipped: Vec<Value> = scan.skipped.iter().map(|&l| json_number(l, d)).collect();
        let entry = match scan.fit {
            Some(f) => json!({
                "a_n": json_number(a_n, d),
                "slope": json_number(f.slope, d),
                "intercept": json_number(f.intercept, d),
                "points": f.points,
                "underdetermined": false,
                "skipped": skipped,
            }),
            None => json!({
                "a_n": json_number(a_n, d),
                "slope": null,
                "intercept": null,
                "points": scan.points.len(),
                "underdetermined": true,
                "skipped": skipped,
            }),
        };
        fits.insert(n_units.to_string(), entry);
    }
    out.write_json("trscan_fit.json", &Value::Object(fits))?;
    echo_config(&mut out, cfg)?;
    Ok(out)
}

/// One line of the self-test report.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

/// Fast internal consistency checks against independent references.
pub fn selftest() -> Result<Vec<Check>, CliError> {
    let cfg = IntegratorConfig::default();
    let mut checks = Vec::new();

    // Undriven qubit against the closed-form relaxation.
    let mut worst = 0.0_f64;
    for n_units in [1, 5, 20] {
        for g in [0.01, 0.066, 0.2] {
            for theta in [0.0, 0.7, FRAC_PI_2] {
                let params = ModelParams::new(0.0, g, 2.0, n_units)?;
                let pair = feme_core::BlochPair::new(theta, 0.0)?;
                let trace = distance_trace(&pair, &params, &cfg)?;
                for (t, i) in trace.times.iter().zip(&trace.i_int) {
                    worst = worst.max((i - analytic_undriven_distance(theta, &params, *t)).abs());
                }
            }
        }
    }
    checks.push(check(
        "undriven-analytic",
        worst < 1e-6,
        format!("max deviation {worst:.3e}"),
    ));

    // Blockwise trace distance against the dense qubit ⊗ calorimeter matrix.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2026);
    let mut worst = 0.0_f64;
    for n_units in [2, 3] {
        for _ in 0..100 {
            let mut blocks: Vec<QubitBlock> = (0..=n_units)
                .map(|_| {
                    QubitBlock::new(
                        rng.random_range(-0.5..0.5),
                        rng.random_range(-0.5..0.5),
                        Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)),
                    )
                })
                .collect();
            let excess: f64 = blocks.iter().map(QubitBlock::trace).sum();
            blocks[0].s11 -= excess;
            let diff = FemeState::new(blocks, 0.0, StateMode::Difference);
            let (blockwise, _) = external_distance(&diff)?;
            let full = full_space_distance(&diff).expect("size is supported");
            worst = worst.max((blockwise - full).abs());
        }
    }
    checks.push(check(
        "blockwise-vs-dense",
        worst < 1e-10,
        format!("max deviation {worst:.3e}"),
    ));

    // Trace conservation of a driven physical state.
    let params = ModelParams::default();
    let ground = QubitBlock::new(1.0, 0.0, Complex64::new(0.0, 0.0));
    let initial = FemeState::thermal_product(ground, &params)?;
    let mut drift = 0.0_f64;
    integrate_with(&initial, &params, &cfg, |_, blocks| {
        let tr: f64 = blocks.iter().map(QubitBlock::trace).sum();
        drift = drift.max((tr - 1.0).abs());
    })?;
    checks.push(check(
        "trace-conservation",
        drift < CONSERVATION_TOL,
        format!("max drift {drift:.3e}"),
    ));

    // Ridge extraction on planted ridges.
    let axis = feme_core::sweep::linspace(0.005, 0.2, 40);
    let spec = SweepSpec {
        lambda0_values: axis.clone(),
        g_values: axis,
        n_units: 1,
    };
    let mut worst = 0.0_f64;
    for ratio in [0.5, 1.0, 2.5] {
        let grid = run_sweep_with(&spec, &params, 1, synthetic_ridge(ratio))?;
        let a = extract_ridge(&grid).map_or(f64::INFINITY, |r| r.a_n);
        worst = worst.max((a / ratio - 1.0).abs());
    }
    checks.push(check(
        "synthetic-ridge",
        worst < 0.05,
        format!("max relative error {worst:.3e}"),
    ));

    Ok(checks)
}
