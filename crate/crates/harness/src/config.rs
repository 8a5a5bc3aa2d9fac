//! Experiment configuration: JSON on disk, validated on load.
//!
//! A config names the experiment, the grid, the physical and numerical
//! parameters, and a seeded synthetic datum.  Everything an experiment
//! reports is derivable from the config alone, which is what makes reruns
//! reproducible.  `schemas/config.schema.json` documents the format.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use llg_core::grid::TAU;
use llg_core::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Simulate,
    Sweep,
    Truncate,
    Equivalence,
    Selftest,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Truncate => "truncate",
            ExperimentKind::Equivalence => "equivalence",
            ExperimentKind::Selftest => "selftest",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub sizes: Vec<usize>,
    /// Box lengths per axis; `None` means 2π each.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<f64>>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        let lengths = match &self.lengths {
            Some(l) => l.clone(),
            None => vec![TAU; self.sizes.len()],
        };
        Grid::new(&self.sizes, &lengths).context("invalid grid spec")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamSpec {
    /// Precession coefficient, ±1 in the model but any sign works numerically.
    #[serde(default = "default_a")]
    pub a: f64,
    /// Damping values to sweep, sorted descending.
    pub epsilons: Vec<f64>,
    pub t_final: f64,
    pub dt: f64,
    /// Small-data scale δ used by well-posedness style checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

fn default_a() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatumFamily {
    /// Periodized Gaussian profile with a plane-wave twist; C^∞, rapidly
    /// decaying shells.
    Bump,
    /// Random phases on dyadic annuli with prescribed per-shell masses;
    /// rough in the sense that shell weights decay slowly.
    ShellRandom,
}

/// Seeded synthetic initial datum.  `amplitude` is the critical Besov norm
/// of the datum after dealiasing, not a pointwise height, so smallness
/// conditions can be stated directly in terms of it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatumSpec {
    pub family: DatumFamily,
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
    /// Gaussian width of the bump profile, in radians.
    #[serde(default = "default_width")]
    pub width: f64,
    /// Plane-wave winding along axis 0 multiplying the bump.
    #[serde(default = "default_twist")]
    pub twist: i64,
    /// Shell mass exponent p in ‖P_k φ‖ ∝ 2^{−kn/2} k^{−p}.
    #[serde(default = "default_decay")]
    pub shell_decay: f64,
    /// Inclusive dyadic shell range populated by `shell-random`.
    #[serde(default = "default_shells")]
    pub shells: [i32; 2],
}

fn default_width() -> f64 {
    0.8
}

fn default_twist() -> i64 {
    1
}

fn default_decay() -> f64 {
    2.0
}

fn default_shells() -> [i32; 2] {
    [1, 3]
}

/// Pass/fail thresholds an experiment asserts against.  Every field is
/// positive; the defaults encode the standard acceptance windows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Window for the fitted log-log slope of e(ε) on smooth data.
    pub slope_lo: f64,
    pub slope_hi: f64,
    /// Half-width of the admissible window around integrator order 4.
    pub order_window: f64,
    /// Sup-norm bound on the sphere-vs-projected discrepancy at the finest Δt.
    pub equivalence_sup: f64,
    /// Cap on the truncation stability constant C.
    pub stability_factor: f64,
    /// Relative slack for linearity of e(ε) in T.
    pub t_linearity: f64,
    /// Required contraction of e(ε) across a rough-data sweep.
    pub rough_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slope_lo: 0.8,
            slope_hi: 1.2,
            order_window: 0.5,
            equivalence_sup: 1e-5,
            stability_factor: 10.0,
            t_linearity: 0.3,
            rough_factor: 0.25,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// What the config was written for; the CLI verb must agree when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    pub grid: GridSpec,
    pub params: ParamSpec,
    pub datum: DatumSpec,
    /// Snapshot sampling stride in solver steps; `None` picks a stride that
    /// yields a modest number of samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    /// Cutoff levels K for the truncation study.
    #[serde(default = "default_truncation_levels")]
    pub truncation_levels: Vec<i32>,
    /// Step sizes for the equivalence refinement study, coarse to fine.
    #[serde(default = "default_dt_list")]
    pub dt_list: Vec<f64>,
    /// Sample count for randomized selftest batteries.
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_truncation_levels() -> Vec<i32> {
    vec![2, 3, 4]
}

fn default_dt_list() -> Vec<f64> {
    vec![1e-2, 5e-3, 2.5e-3]
}

fn default_samples() -> usize {
    1000
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.sizes.is_empty() {
            bail!("grid needs at least one axis");
        }
        if let Some(l) = &self.grid.lengths {
            if l.len() != self.grid.sizes.len() {
                bail!("grid lengths and sizes disagree on dimension");
            }
        }
        let eps = &self.params.epsilons;
        if eps.is_empty() {
            bail!("epsilon list is empty");
        }
        for &e in eps {
            if !(0.0..=1.0).contains(&e) || !e.is_finite() {
                bail!("epsilon {e} outside [0, 1]");
            }
        }
        if eps.windows(2).any(|w| w[0] <= w[1]) {
            bail!("epsilon list must be strictly descending, got {eps:?}");
        }
        if !(self.params.t_final > 0.0) || !(self.params.dt > 0.0) {
            bail!("T and dt must be positive");
        }
        if self.params.dt > self.params.t_final {
            bail!("dt exceeds T");
        }
        if let Some(d) = self.params.delta {
            if !(d > 0.0) {
                bail!("delta must be positive");
            }
        }
        if !(self.datum.amplitude > 0.0) {
            bail!("datum amplitude must be positive");
        }
        if !(self.datum.width > 0.0) {
            bail!("datum width must be positive");
        }
        if self.datum.shells[0] > self.datum.shells[1] {
            bail!("datum shell range is empty");
        }
        if self.dt_list.is_empty() || self.dt_list.windows(2).any(|w| w[0] <= w[1]) {
            bail!("dt list must be strictly decreasing and nonempty");
        }
        if self.samples == 0 {
            bail!("sample count must be positive");
        }
        if let Some(s) = self.stride {
            if s == 0 {
                bail!("stride must be positive");
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("slope_lo", t.slope_lo),
            ("slope_hi", t.slope_hi),
            ("order_window", t.order_window),
            ("equivalence_sup", t.equivalence_sup),
            ("stability_factor", t.stability_factor),
            ("t_linearity", t.t_linearity),
            ("rough_factor", t.rough_factor),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                bail!("tolerance {name} must be positive, got {v}");
            }
        }
        if t.slope_lo >= t.slope_hi {
            bail!("slope window is empty");
        }
        Ok(())
    }

    /// Require that a verb-selected run matches what the config declares.
    pub fn check_kind(&self, kind: ExperimentKind) -> Result<()> {
        match self.experiment {
            Some(k) if k != kind => {
                bail!("config declares experiment '{k}' but the '{kind}' verb was invoked")
            }
            _ => Ok(()),
        }
    }

    /// Sampling stride for a run of `steps` solver steps: the configured
    /// value if set, otherwise the smallest divisor of `steps` giving at
    /// most 16 samples.
    pub fn pick_stride(&self, steps: usize) -> usize {
        if let Some(s) = self.stride {
            return s;
        }
        stride_for(steps, 16)
    }
}

/// Smallest divisor of `steps` yielding at most `max_samples` samples.
pub fn stride_for(steps: usize, max_samples: usize) -> usize {
    let mut stride = steps.div_ceil(max_samples).max(1);
    while steps % stride != 0 {
        stride += 1;
    }
    stride
}

/// Targeted CLI overrides applied after loading the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub epsilon: Vec<f64>,
    pub grid: Option<String>,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if !self.epsilon.is_empty() {
            let mut eps = self.epsilon.clone();
            eps.sort_by(|x, y| y.total_cmp(x));
            cfg.params.epsilons = eps;
        }
        if let Some(spec) = &self.grid {
            cfg.grid.sizes = parse_grid(spec)?;
            cfg.grid.lengths = None;
        }
        if let Some(t) = self.t_final {
            cfg.params.t_final = t;
        }
        if let Some(dt) = self.dt {
            cfg.params.dt = dt;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        cfg.validate()
    }
}

/// Parse a grid like `"32x32x32"` or `"64"`.
pub fn parse_grid(spec: &str) -> Result<Vec<usize>> {
    let sizes: Vec<usize> = spec
        .split(['x', 'X'])
        .map(|tok| tok.trim().parse::<usize>().with_context(|| format!("bad grid token '{tok}'")))
        .collect::<Result<_>>()?;
    if sizes.is_empty() || sizes.contains(&0) {
        bail!("grid spec '{spec}' has no usable sizes");
    }
    Ok(sizes)
}
