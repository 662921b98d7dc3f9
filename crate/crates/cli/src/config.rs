// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a TOML file, overridden by command-line flags.
//!
//! Every section is optional and falls back to the library defaults.
//! Unknown keys anywhere in the file are rejected.

use std::collections::BTreeMap;
use std::path::PathBuf;

use feme_core::dynamics::{DEFAULT_DT, DEFAULT_T_END};
use feme_core::measures::DEFAULT_ANGLE_STEP;
use feme_core::sweep::{
    linspace, logspace, DEFAULT_AXIS_MAX, DEFAULT_AXIS_MIN, DEFAULT_AXIS_POINTS,
    DEFAULT_CELL_ANGLE_STEP,
};
use feme_core::{BlochPair, BlpSearch, IntegratorConfig, ModelParams, Picture};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// A sampled parameter axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => linspace(self.min, self.max, self.count),
            Spacing::Log => logspace(self.min, self.max, self.count),
        }
    }

    fn check(&self, key: &str, problems: &mut Vec<String>) {
        if !(self.min.is_finite() && self.max.is_finite()) {
            problems.push(format!("{key}: bounds must be finite"));
        } else if self.count > 1 && self.min >= self.max {
            problems.push(format!("{key}: min must be below max"));
        }
        if self.count == 0 {
            problems.push(format!("{key}.count: must be >= 1"));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            problems.push(format!("{key}.min: log spacing needs min > 0"));
        }
        if self.min < 0.0 {
            problems.push(format!("{key}.min: must be >= 0"));
        }
    }
}

impl Default for Axis {
    fn default() -> Self {
        Self {
            min: DEFAULT_AXIS_MIN,
            max: DEFAULT_AXIS_MAX,
            count: DEFAULT_AXIS_POINTS,
            spacing: Spacing::Linear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub omega0: f64,
    pub lambda0: f64,
    pub g: f64,
    pub beta: f64,
    pub n_units: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = ModelParams::default();
        Self {
            omega0: p.omega0,
            lambda0: p.lambda0,
            g: p.g,
            beta: p.beta,
            n_units: p.n_units,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: usize,
    pub picture: Picture,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            t_end: DEFAULT_T_END,
            sample_every: 1,
            picture: Picture::Interaction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureSection {
    pub angle_step: f64,
    pub restrict_phi: bool,
    pub refine: bool,
    /// Pair used by `trace`.
    pub theta: f64,
    pub phi: f64,
}

impl Default for MeasureSection {
    fn default() -> Self {
        Self {
            angle_step: DEFAULT_ANGLE_STEP,
            restrict_phi: true,
            refine: true,
            theta: 1.69,
            phi: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub n_units: Vec<usize>,
    pub lambda0: Axis,
    pub g: Axis,
    /// Coarser θ grid used per cell.
    pub angle_step: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            n_units: vec![5, 10, 20, 50, 100],
            lambda0: Axis::default(),
            g: Axis::default(),
            angle_step: DEFAULT_CELL_ANGLE_STEP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrScanSection {
    pub n_units: Vec<usize>,
    pub lambda0: Axis,
    /// Ridge ratio per calorimeter size, keyed by N. Sizes without an entry
    /// get their ratio from a sweep at the `[sweep]` axes.
    pub ratios: BTreeMap<String, f64>,
}

impl Default for TrScanSection {
    fn default() -> Self {
        Self {
            n_units: vec![5, 50, 100],
            lambda0: Axis {
                min: 0.02,
                max: 0.2,
                count: 8,
                spacing: Spacing::Log,
            },
            ratios: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: Format,
    /// Significant digits of every number written.
    pub precision: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("feme-out"),
            format: Format::Csv,
            precision: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    pub model: ModelSection,
    pub integrator: IntegratorSection,
    pub measure: MeasureSection,
    pub sweep: SweepSection,
    pub trscan: TrScanSection,
    pub output: OutputSection,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub format: Option<Format>,
    pub lambda0: Option<f64>,
    pub g: Option<f64>,
    pub n_units: Option<usize>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub t_end: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// `--n-units` also narrows the sweep and scan size lists to that size.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.output.dir = v.clone();
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if let Some(v) = o.format {
            self.output.format = v;
        }
        if let Some(v) = o.lambda0 {
            self.model.lambda0 = v;
        }
        if let Some(v) = o.g {
            self.model.g = v;
        }
        if let Some(v) = o.n_units {
            self.model.n_units = v;
            self.sweep.n_units = vec![v];
            self.trscan.n_units = vec![v];
        }
        if let Some(v) = o.theta {
            self.measure.theta = v;
        }
        if let Some(v) = o.phi {
            self.measure.phi = v;
        }
        if let Some(v) = o.t_end {
            self.integrator.t_end = v;
        }
    }

    /// Checks every field and reports all offending keys at once.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut problems = Vec::new();
        let m = &self.model;
        if !(m.omega0.is_finite() && m.omega0 > 0.0) {
            problems.push("model.omega0: must be finite and > 0".to_string());
        }
        if !(m.lambda0.is_finite() && m.lambda0 >= 0.0) {
            problems.push("model.lambda0: must be finite and >= 0".to_string());
        }
        if !(m.g.is_finite() && m.g >= 0.0) {
            problems.push("model.g: must be finite and >= 0".to_string());
        }
        if m.beta.is_nan() || m.beta <= 0.0 {
            problems.push("model.beta: must be > 0".to_string());
        }
        if m.n_units == 0 {
            problems.push("model.n_units: must be >= 1".to_string());
        }
        let i = &self.integrator;
        if !(i.dt.is_finite() && i.dt > 0.0) {
            problems.push("integrator.dt: must be finite and > 0".to_string());
        }
        if !(i.t_end.is_finite() && i.t_end > 0.0) {
            problems.push("integrator.t_end: must be finite and > 0".to_string());
        }
        if i.sample_every == 0 {
            problems.push("integrator.sample_every: must be >= 1".to_string());
        }
        let ms = &self.measure;
        if !(ms.angle_step.is_finite()
            && ms.angle_step > 0.0
            && ms.angle_step < std::f64::consts::PI)
        {
            problems.push("measure.angle_step: must lie in (0, pi)".to_string());
        }
        if BlochPair::new(ms.theta, ms.phi).is_err() {
            problems.push("measure.theta/phi: angles must lie in [0, pi)".to_string());
        }
        let s = &self.sweep;
        if s.n_units.is_empty() || s.n_units.contains(&0) {
            problems.push("sweep.n_units: needs at least one size, each >= 1".to_string());
        }
        s.lambda0.check("sweep.lambda0", &mut problems);
        s.g.check("sweep.g", &mut problems);
        if !(s.angle_step.is_finite() && s.angle_step > 0.0 && s.angle_step < std::f64::consts::PI)
        {
            problems.push("sweep.angle_step: must lie in (0, pi)".to_string());
        }
        let t = &self.trscan;
        if t.n_units.is_empty() || t.n_units.contains(&0) {
            problems.push("trscan.n_units: needs at least one size, each >= 1".to_string());
        }
        t.lambda0.check("trscan.lambda0", &mut problems);
        for (key, ratio) in &t.ratios {
            if key.parse::<usize>().map_or(true, |n| n == 0) {
                problems.push(format!(
                    "trscan.ratios.{key}: key must be a calorimeter size"
                ));
            }
            if !(ratio.is_finite() && *ratio > 0.0) {
                problems.push(format!("trscan.ratios.{key}: must be finite and > 0"));
            }
        }
        if !(1..=17).contains(&self.output.precision) {
            problems.push("output.precision: must lie in 1..=17".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(problems.join("; ")))
        }
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            omega0: self.model.omega0,
            lambda0: self.model.lambda0,
            g: self.model.g,
            beta: self.model.beta,
            n_units: self.model.n_units,
        }
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.integrator.dt,
            t_end: self.integrator.t_end,
            sample_every: self.integrator.sample_every,
            picture: self.integrator.picture,
        }
    }

    pub fn search(&self) -> BlpSearch {
        BlpSearch {
            angle_step: self.measure.angle_step,
            restrict_phi: self.measure.restrict_phi,
            refine: self.measure.refine,
        }
    }

    /// Search used for every sweep cell.
    pub fn cell_search(&self) -> BlpSearch {
        BlpSearch {
            angle_step: self.sweep.angle_step,
            ..self.search()
        }
    }

    pub fn pair(&self) -> BlochPair {
        BlochPair {
            theta: self.measure.theta,
            phi: self.measure.phi,
        }
    }

    pub fn ratio_for(&self, n_units: usize) -> Option<f64> {
        self.trscan.ratios.get(&n_units.to_string()).copied()
    }
}
