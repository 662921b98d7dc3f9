// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps over drive amplitude and coupling, ridge extraction and
//! backflow-onset scans along the ridge.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::IntegratorConfig;
use crate::error::{FemeError, Result};
use crate::measures::{blp_search, BlpSearch, BlpSummary, BLP_FLOOR};
use crate::model::ModelParams;
use crate::state::BlochPair;

/// Default axis bounds for both λ₀ and g, in units of ℏω₀.
pub const DEFAULT_AXIS_MIN: f64 = 0.005;
pub const DEFAULT_AXIS_MAX: f64 = 0.2;
pub const DEFAULT_AXIS_POINTS: usize = 40;
/// Per-cell angle step used by sweeps.
pub const DEFAULT_CELL_ANGLE_STEP: f64 = 0.16;
/// Quantile of all cell values above which a traced ridge point enters the
/// fit (0.9: the top decile of cells).
pub const RIDGE_BAND: f64 = 0.9;

/// `count` evenly spaced values from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![min],
        _ => (0..count)
            .map(|k| min + (max - min) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// `count` logarithmically spaced values from `min` to `max` inclusive.
pub fn logspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    linspace(min.ln(), max.ln(), count)
        .into_iter()
        .map(f64::exp)
        .collect()
}

fn check_axis(name: &'static str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(FemeError::InvalidParameter {
            name,
            reason: "axis is empty".into(),
        });
    }
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(FemeError::InvalidParameter {
            name,
            reason: "axis values must be finite and >= 0".into(),
        });
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FemeError::InvalidParameter {
            name,
            reason: "axis must be strictly increasing".into(),
        });
    }
    Ok(())
}

/// Axes of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub lambda0_values: Vec<f64>,
    pub g_values: Vec<f64>,
    pub n_units: usize,
}

impl SweepSpec {
    /// 40×40 grid over [0.005, 0.2]² for calorimeter size `n_units`.
    pub fn default_for(n_units: usize) -> Self {
        let axis = linspace(DEFAULT_AXIS_MIN, DEFAULT_AXIS_MAX, DEFAULT_AXIS_POINTS);
        Self {
            lambda0_values: axis.clone(),
            g_values: axis,
            n_units,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_axis("lambda0_values", &self.lambda0_values)?;
        check_axis("g_values", &self.g_values)?;
        if self.n_units == 0 {
            return Err(FemeError::InvalidParameter {
                name: "n_units",
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }
}

/// Summary of the maximization at one (λ₀, g).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub lambda0: f64,
    pub g: f64,
    pub value: f64,
    pub theta: f64,
    pub t_r: Option<f64>,
    /// Set when the cell failed; `value` is then 0.
    pub error: Option<String>,
}

/// BLP values over a (λ₀, g) grid. Cells are stored λ₀-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub lambda0_values: Vec<f64>,
    pub g_values: Vec<f64>,
    pub n_units: usize,
    pub cells: Vec<CellResult>,
}

impl SweepGrid {
    pub fn shape(&self) -> (usize, usize) {
        (self.lambda0_values.len(), self.g_values.len())
    }

    pub fn cell(&self, i: usize, j: usize) -> &CellResult {
        &self.cells[i * self.g_values.len() + j]
    }

    pub fn failed_cells(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.error.is_some())
    }
}

fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| FemeError::InvalidParameter {
            name: "workers",
            reason: e.to_string(),
        })
}

/// Evaluates `eval` on every grid cell using `workers` threads (0 = all
/// available). Results are ordered by cell, independent of scheduling.
pub fn run_sweep_with<F>(
    spec: &SweepSpec,
    base: &ModelParams,
    workers: usize,
    eval: F,
) -> Result<SweepGrid>
where
    F: Fn(&ModelParams) -> Result<BlpSummary> + Sync,
{
    spec.validate()?;
    let points: Vec<(f64, f64)> = spec
        .lambda0_values
        .iter()
        .flat_map(|&l| spec.g_values.iter().map(move |&g| (l, g)))
        .collect();
    let base = base.with_n_units(spec.n_units);
    let run_cell = |&(lambda0, g): &(f64, f64)| {
        let params = base.with_lambda0(lambda0).with_g(g);
        let outcome = params.validate().and_then(|_| eval(&params));
        match outcome {
            Ok(s) => CellResult {
                lambda0,
                g,
                value: s.value,
                theta: s.pair.theta,
                t_r: s.t_r,
                error: None,
            },
            Err(e) => CellResult {
                lambda0,
                g,
                value: 0.0,
                theta: 0.0,
                t_r: None,
                error: Some(e.to_string()),
            },
        }
    };
    let cells = worker_pool(workers)?.install(|| points.par_iter().map(run_cell).collect());
    Ok(SweepGrid {
        lambda0_values: spec.lambda0_values.clone(),
        g_values: spec.g_values.clone(),
        n_units: spec.n_units,
        cells,
    })
}

/// BLP measure on every cell of the grid.
pub fn run_sweep(
    spec: &SweepSpec,
    base: &ModelParams,
    cfg: &IntegratorConfig,
    search: &BlpSearch,
    workers: usize,
) -> Result<SweepGrid> {
    cfg.validate()?;
    search.validate()?;
    run_sweep_with(spec, base, workers, |p| blp_search(p, cfg, search))
}

/// Planted ridge exp(−(λ₀/g − ratio)²) used to check ridge extraction.
pub fn synthetic_ridge(ratio: f64) -> impl Fn(&ModelParams) -> Result<BlpSummary> + Sync {
    move |p: &ModelParams| {
        let value = if p.g > 0.0 {
            (-(p.lambda0 / p.g - ratio).powi(2)).exp()
        } else {
            0.0
        };
        Ok(BlpSummary {
            value,
            pair: BlochPair {
                theta: 0.0,
                phi: 0.0,
            },
            t_r: None,
        })
    }
}

/// Line λ₀ = a_N g through the high-backflow band of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeFit {
    pub a_n: f64,
    pub n_max: f64,
    pub peak_lambda0: f64,
    pub peak_g: f64,
    /// (λ₀, g) of the cells used in the fit.
    pub fit_points: Vec<(f64, f64)>,
    /// RMS relative deviation of λ₀/g over the fit points from `a_n`.
    pub residual: f64,
}

/// Peak value and ridge ratio of a sweep; `None` when no cell shows backflow.
///
/// The ridge is traced column by column: for every g the λ₀ of largest value
/// is taken, and columns whose maximum lies in the top decile of all cell
/// values enter a least-squares line λ₀ = a_N g through the origin. Column
/// maxima sitting on the edge of the λ₀ axis are clipped by the grid and left
/// out, unless nothing else remains.
pub fn extract_ridge(grid: &SweepGrid) -> Option<RidgeFit> {
    let mut peak = 0;
    for (k, c) in grid.cells.iter().enumerate() {
        if c.value > grid.cells[peak].value {
            peak = k;
        }
    }
    let peak_cell = grid.cells.get(peak)?;
    let n_max = peak_cell.value;
    if n_max <= BLP_FLOOR {
        return None;
    }
    let (rows, cols) = grid.shape();
    let threshold = band_threshold(grid).max(BLP_FLOOR);
    let mut fit_points = Vec::new();
    for j in 0..cols {
        if grid.g_values[j] <= 0.0 {
            continue;
        }
        let mut best = 0;
        for i in 1..rows {
            if grid.cell(i, j).value > grid.cell(best, j).value {
                best = i;
            }
        }
        let c = grid.cell(best, j);
        let clipped = rows > 1 && (best == 0 || best == rows - 1);
        if c.value >= threshold && !clipped {
            fit_points.push((c.lambda0, c.g));
        }
    }
    if fit_points.is_empty() && peak_cell.g > 0.0 {
        fit_points.push((peak_cell.lambda0, peak_cell.g));
    }
    let sxy: f64 = fit_points.iter().map(|(l, g)| l * g).sum();
    let sxx: f64 = fit_points.iter().map(|(_, g)| g * g).sum();
    if sxx <= 0.0 {
        return None;
    }
    let a_n = sxy / sxx;
    if !(a_n > 0.0 && a_n.is_finite()) {
        return None;
    }
    let residual = (fit_points
        .iter()
        .map(|(l, g)| (l / g / a_n - 1.0).powi(2))
        .sum::<f64>()
        / fit_points.len() as f64)
        .sqrt();
    Some(RidgeFit {
        a_n,
        n_max,
        peak_lambda0: peak_cell.lambda0,
        peak_g: peak_cell.g,
        fit_points,
        residual,
    })
}

/// Value of the [`RIDGE_BAND`] quantile over all cells.
fn band_threshold(grid: &SweepGrid) -> f64 {
    let mut values: Vec<f64> = grid.cells.iter().map(|c| c.value).collect();
    values.sort_by(f64::total_cmp);
    let k = ((RIDGE_BAND * values.len() as f64) as usize).min(values.len() - 1);
    values[k]
}

/// Straight-line fit of log y against log x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

impl LogLogFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Least-squares fit; `None` with fewer than two distinct positive abscissae.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(LogLogFit {
        slope,
        intercept: my - slope * mx,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrPoint {
    pub lambda0: f64,
    pub g: f64,
    pub t_r: f64,
}

/// Backflow onset along λ₀ = a_N g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrScan {
    pub n_units: usize,
    pub a_n: f64,
    pub points: Vec<TrPoint>,
    /// λ₀ values whose optimal pair shows no backflow, or whose run failed.
    pub skipped: Vec<f64>,
    /// `None` when fewer than two points have an onset time.
    pub fit: Option<LogLogFit>,
}

/// Runs the BLP maximization at each λ₀ with g = λ₀/a_N and fits log t_R
/// against log λ₀.
pub fn tr_scan(
    n_units: usize,
    a_n: f64,
    lambda0_values: &[f64],
    base: &ModelParams,
    cfg: &IntegratorConfig,
    search: &BlpSearch,
    workers: usize,
) -> Result<TrScan> {
    if !(a_n.is_finite() && a_n > 0.0) {
        return Err(FemeError::InvalidParameter {
            name: "a_n",
            reason: format!("must be finite and > 0, got {a_n}"),
        });
    }
    check_axis("lambda0_values", lambda0_values)?;
    cfg.validate()?;
    search.validate()?;
    let base = base.with_n_units(n_units);
    let outcomes: Vec<(f64, f64, Option<f64>)> = worker_pool(workers)?.install(|| {
        lambda0_values
            .par_iter()
            .map(|&lambda0| {
                let g = lambda0 / a_n;
                let params = base.with_lambda0(lambda0).with_g(g);
                let t_r = params
                    .validate()
                    .and_then(|_| blp_search(&params, cfg, search))
                    .ok()
                    .and_then(|s| s.t_r);
                (lambda0, g, t_r)
            })
            .collect()
    });
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (lambda0, g, t_r) in outcomes {
        match t_r {
            Some(t_r) => points.push(TrPoint { lambda0, g, t_r }),
            None => skipped.push(lambda0),
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| p.lambda0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.t_r).collect();
    let fit = loglog_fit(&xs, &ys);
    Ok(TrScan {
        n_units,
        a_n,
        points,
        skipped,
        fit,
    })
}
