//! Experiment configuration: one JSON document per run.
//!
//! Every section rejects unknown keys. Parse errors carry the line and column
//! reported by the JSON parser; semantic errors point at the line of the
//! offending key in the original text.

use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use nhsoc_core::{BandCoefficients, ControlPoint, Direction, InitialState, Model64, Path64, Protocol, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Bands,
    Evolve,
    SpeedSweep,
    PointSource,
    PredictRadius,
    PhaseDiagram,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Bands => "bands",
            Experiment::Evolve => "evolve",
            Experiment::SpeedSweep => "speed-sweep",
            Experiment::PointSource => "point-source",
            Experiment::PredictRadius => "predict-radius",
            Experiment::PhaseDiagram => "phase-diagram",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default = "ep_tol")]
    pub ep_tolerance: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { kappa: 1.0, ep_tolerance: 1e-9 }
    }
}

fn one() -> f64 {
    1.0
}

fn ep_tol() -> f64 {
    1e-9
}

/// A positive speed, given directly or as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeedSpec {
    Value(f64),
    Ln { ln: f64 },
}

impl SpeedSpec {
    pub fn value(&self) -> f64 {
        match *self {
            SpeedSpec::Value(v) => v,
            SpeedSpec::Ln { ln } => ln.exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandLabel {
    Lower,
    Upper,
}

/// Initial state: a band label or explicit band coefficients `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialConfig {
    Band(BandLabel),
    Coefficients { c_plus: [f64; 2], c_minus: [f64; 2] },
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::Band(BandLabel::Lower)
    }
}

impl InitialConfig {
    pub fn resolve(&self) -> InitialState<f64> {
        match *self {
            InitialConfig::Band(BandLabel::Lower) => InitialState::Lower,
            InitialConfig::Band(BandLabel::Upper) => InitialState::Upper,
            InitialConfig::Coefficients { c_plus, c_minus } => InitialState::Coefficients(BandCoefficients::new(
                C64::new(c_plus[0], c_plus[1]),
                C64::new(c_minus[0], c_minus[1]),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { step: default_step(), stride: default_stride() }
    }
}

fn default_step() -> f64 {
    1e-3
}

fn default_stride() -> usize {
    10
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub nq: usize,
    pub g_min: f64,
    pub g_max: f64,
    pub ng: usize,
}

impl Default for BandGrid {
    fn default() -> Self {
        Self { q_min: -2.0, q_max: 2.0, nq: 201, g_min: 0.0, g_max: 2.0, ng: 201 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSourceConfig {
    #[serde(default = "default_origin")]
    pub origin: ControlPoint<f64>,
    #[serde(default = "default_rays")]
    pub n_rays: usize,
    #[serde(default = "default_max_arc")]
    pub max_arc: f64,
    #[serde(default = "default_min_samples")]
    pub min_samples_per_ray: usize,
    #[serde(default = "default_hysteresis")]
    pub hysteresis: f64,
}

impl Default for PointSourceConfig {
    fn default() -> Self {
        Self {
            origin: default_origin(),
            n_rays: default_rays(),
            max_arc: default_max_arc(),
            min_samples_per_ray: default_min_samples(),
            hysteresis: default_hysteresis(),
        }
    }
}

fn default_origin() -> ControlPoint<f64> {
    ControlPoint::new(-1.0, 1.0)
}

fn default_rays() -> usize {
    360
}

fn default_max_arc() -> f64 {
    2.0
}

fn default_min_samples() -> usize {
    400
}

fn default_hysteresis() -> f64 {
    0.02
}

/// Speeds for a sweep: explicit values, or `count` points evenly spaced in
/// `ln(speed)` over `[ln_min, ln_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeedGrid {
    Values { values: Vec<f64> },
    LogSpaced { ln_min: f64, ln_max: f64, count: usize },
}

impl Default for SpeedGrid {
    fn default() -> Self {
        SpeedGrid::LogSpaced { ln_min: -5.0, ln_max: 2.0, count: 71 }
    }
}

impl SpeedGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SpeedGrid::Values { values } => values.clone(),
            SpeedGrid::LogSpaced { ln_min, ln_max, count } => {
                linspace(*ln_min, *ln_max, *count).into_iter().map(f64::exp).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseGrid {
    #[serde(default = "default_xm_min")]
    pub xm_min: f64,
    #[serde(default = "default_xm_max")]
    pub xm_max: f64,
    #[serde(default = "default_n")]
    pub n_xm: usize,
    /// Heights are `h_max * k / n_h` for `k = 1..=n_h`.
    #[serde(default = "default_h_max")]
    pub h_max: f64,
    #[serde(default = "default_n")]
    pub n_h: usize,
    #[serde(default = "default_bisection_tol")]
    pub bisection_tol: f64,
    #[serde(default = "one")]
    pub extent: f64,
}

impl Default for PhaseGrid {
    fn default() -> Self {
        Self {
            xm_min: default_xm_min(),
            xm_max: default_xm_max(),
            n_xm: default_n(),
            h_max: default_h_max(),
            n_h: default_n(),
            bisection_tol: default_bisection_tol(),
            extent: 1.0,
        }
    }
}

impl PhaseGrid {
    pub fn xm_values(&self) -> Vec<f64> {
        linspace(self.xm_min, self.xm_max, self.n_xm)
    }

    pub fn h_values(&self) -> Vec<f64> {
        (1..=self.n_h).map(|k| self.h_max * k as f64 / self.n_h as f64).collect()
    }
}

fn default_xm_min() -> f64 {
    -1.0
}

fn default_xm_max() -> f64 {
    -0.1
}

fn default_n() -> usize {
    25
}

fn default_h_max() -> f64 {
    1.2
}

fn default_bisection_tol() -> f64 {
    1e-3
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Protocol<f64>>,
    #[serde(default = "default_direction")]
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<SpeedSpec>,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub bands: BandGrid,
    #[serde(default)]
    pub point_source: PointSourceConfig,
    #[serde(default)]
    pub speeds: SpeedGrid,
    #[serde(default)]
    pub phase: PhaseGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn default_direction() -> Direction {
    Direction::Ccw
}

/// Invalid configuration, located in the source text when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn at_key(source: &str, key: &str, message: impl Into<String>) -> Self {
        let needle = format!("\"{key}\"");
        let line = source.lines().position(|l| l.contains(&needle)).map(|i| i + 1);
        // keys left at their default are reported against the first line
        Self { line: line.or(Some(1)), column: None, message: message.into() }
    }
}

/// Tagged enums are buffered before their fields are checked, so the
/// parser reports an unknown field at the end of the enclosing object; point
/// at the key itself instead.
fn locate_parse_error(source: &str, e: &serde_json::Error) -> ConfigError {
    let message = e.to_string();
    let mut line = e.line();
    let mut column = Some(e.column());
    if let Some(rest) = message.strip_prefix("unknown field `") {
        if let Some(key) = rest.split('`').next() {
            let needle = format!("\"{key}\"");
            let lines: Vec<&str> = source.lines().collect();
            if let Some(i) = lines[..line.min(lines.len())].iter().rposition(|l| l.contains(&needle)) {
                line = i + 1;
                column = lines[i].find(&needle).map(|c| c + 1);
            }
        }
    }
    ConfigError { line: Some(line), column, message }
}

impl ExperimentConfig {
    /// Parses a config document; `experiment` fills in (or must agree with)
    /// the document's own `experiment` key.
    pub fn parse(source: &str, experiment: Option<Experiment>) -> Result<Self, ConfigError> {
        let mut cfg: ExperimentConfig = serde_json::from_str(source).map_err(|e| locate_parse_error(source, &e))?;
        match (cfg.experiment, experiment) {
            (Some(a), Some(b)) if a != b => {
                return Err(ConfigError::at_key(
                    source,
                    "experiment",
                    format!("config is for '{}' but '{}' was requested", a.as_str(), b.as_str()),
                ))
            }
            (None, None) => {
                return Err(ConfigError { line: Some(1), column: None, message: "no experiment selected".into() })
            }
            (None, Some(b)) => cfg.experiment = Some(b),
            _ => {}
        }
        Ok(cfg)
    }

    pub fn experiment(&self) -> Experiment {
        self.experiment.expect("experiment is set by parse")
    }

    pub fn model(&self) -> Result<Model64, String> {
        Model64::new(self.model.kappa, self.model.ep_tolerance).map_err(|e| e.to_string())
    }

    pub fn speed_value(&self) -> Option<f64> {
        self.speed.map(|s| s.value())
    }

    /// Checks every parameter the selected experiment uses against the
    /// preconditions of the routines it calls.
    pub fn validate(&self, source: &str) -> Result<(), ConfigError> {
        let err = |key: &str, msg: String| Err(ConfigError::at_key(source, key, msg));
        let fail = |key: &str, msg: String| ConfigError::at_key(source, key, msg);
        if let Err(m) = self.model() {
            return err("model", m);
        }
        if !(self.numerics.step.is_finite() && self.numerics.step > 0.0) {
            return err("step", format!("step must be positive, got {}", self.numerics.step));
        }
        if self.numerics.stride == 0 {
            return err("stride", "stride must be at least 1".into());
        }
        if self.workers == Some(0) {
            return err("workers", "workers must be at least 1".into());
        }
        let need_speed = || -> Result<f64, ConfigError> {
            match self.speed_value() {
                None => Err(fail("speed", "this experiment needs a speed".into())),
                Some(v) if !(v.is_finite() && v > 0.0) => {
                    Err(fail("speed", format!("speed must be positive, got {v}")))
                }
                Some(v) => Ok(v),
            }
        };
        match self.experiment() {
            Experiment::Bands => {
                let b = &self.bands;
                if b.nq == 0 || b.ng == 0 {
                    return err("bands", "band grid must be non-empty".into());
                }
                if ![b.q_min, b.q_max, b.g_min, b.g_max].iter().all(|x| x.is_finite()) {
                    return err("bands", "band grid bounds must be finite".into());
                }
            }
            Experiment::Evolve => {
                let v = need_speed()?;
                let Some(p) = &self.protocol else {
                    return err("protocol", "evolve needs a protocol".into());
                };
                if let Err(e) = Path64::standard(p, self.direction, v) {
                    return err("protocol", e.to_string());
                }
                if let Err(e) = self.initial.resolve().b_ratio() {
                    return err("initial", e.to_string());
                }
            }
            Experiment::SpeedSweep => {
                let Some(p) = &self.protocol else {
                    return err("protocol", "speed-sweep needs a protocol".into());
                };
                if let Err(e) = p.waypoints(self.direction) {
                    return err("protocol", e.to_string());
                }
                let vs = self.speeds.values();
                if vs.is_empty() {
                    return err("speeds", "speed list is empty".into());
                }
                if let Some(v) = vs.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                    return err("speeds", format!("speeds must be positive, got {v}"));
                }
            }
            Experiment::PointSource => {
                need_speed()?;
                let ps = &self.point_source;
                if !ps.origin.is_finite() {
                    return err("origin", "origin must be finite".into());
                }
                if ps.n_rays < 4 {
                    return err("n_rays", format!("need at least 4 rays, got {}", ps.n_rays));
                }
                if !(ps.max_arc.is_finite() && ps.max_arc > 0.0) {
                    return err("max_arc", format!("max_arc must be positive, got {}", ps.max_arc));
                }
                if ps.min_samples_per_ray == 0 {
                    return err("min_samples_per_ray", "need at least one sample per ray".into());
                }
                if !(ps.hysteresis.is_finite() && ps.hysteresis >= 0.0) {
                    return err("hysteresis", "hysteresis must be non-negative".into());
                }
            }
            Experiment::PredictRadius => {
                need_speed()?;
                if !self.point_source.origin.is_finite() {
                    return err("origin", "origin must be finite".into());
                }
            }
            Experiment::PhaseDiagram => {
                need_speed()?;
                let ph = &self.phase;
                if ph.n_xm == 0 || ph.n_h < 2 {
                    return err("phase", "phase grid needs n_xm >= 1 and n_h >= 2".into());
                }
                if !(ph.extent.is_finite() && ph.extent > 0.0) {
                    return err("extent", format!("extent must be positive, got {}", ph.extent));
                }
                for x in [ph.xm_min, ph.xm_max] {
                    if !(x.is_finite() && x >= -ph.extent && x < 0.0) {
                        return err("xm_min", format!("x_m values must lie in [-extent, 0), got {x}"));
                    }
                }
                if !(ph.h_max.is_finite() && ph.h_max > 0.0) {
                    return err("h_max", format!("h_max must be positive, got {}", ph.h_max));
                }
                if !(ph.bisection_tol.is_finite() && ph.bisection_tol > 0.0) {
                    return err("bisection_tol", "bisection_tol must be positive".into());
                }
            }
        }
        Ok(())
    }
}
