use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manufactured::{InitialCurve, DEFAULT_DELTA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flow {
    Csf,
    Cd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    FirstOrder,
    PredictorCorrector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Initial data: a closed-form curve, or the exact solution of the chosen
/// flow's manufactured problem at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveChoice {
    Initial(InitialCurve),
    Manufactured,
}

impl FromStr for Flow {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csf" => Ok(Flow::Csf),
            "cd" => Ok(Flow::Cd),
            other => Err(Error::Config(format!("unknown flow '{other}' (csf | cd)"))),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "first_order" | "first-order" | "fo" => Ok(Scheme::FirstOrder),
            "predictor_corrector" | "predictor-corrector" | "pc" => Ok(Scheme::PredictorCorrector),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (first_order | predictor_corrector)"
            ))),
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!(
                "unknown format '{other}' (csv | json)"
            ))),
        }
    }
}

impl FromStr for CurveChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "manufactured" {
            return Ok(CurveChoice::Manufactured);
        }
        s.parse().map(CurveChoice::Initial)
    }
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flow::Csf => "csf",
            Flow::Cd => "cd",
        })
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::FirstOrder => "first_order",
            Scheme::PredictorCorrector => "predictor_corrector",
        })
    }
}

impl fmt::Display for CurveChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveChoice::Initial(c) => c.fmt(f),
            CurveChoice::Manufactured => f.write_str("manufactured"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub flow: Flow,
    pub scheme: Scheme,
    pub num_elements: usize,
    pub dt: f64,
    pub t_end: f64,
    pub curve: CurveChoice,
    pub forced: bool,
    pub delta: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Write a frame every this many steps; 0 disables frames.
    pub frame_stride: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            flow: Flow::Csf,
            scheme: Scheme::PredictorCorrector,
            num_elements: 128,
            dt: 1e-3,
            t_end: 0.1,
            curve: CurveChoice::Initial(InitialCurve::Circle { radius: 1.0 }),
            forced: false,
            delta: DEFAULT_DELTA,
            out: None,
            format: OutputFormat::Csv,
            frame_stride: 0,
        }
    }
}

/// `M = T / dt`, which must be a whole number to within `1e-12` relative.
pub fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Config(format!(
            "T must be non-negative, got {t_end}"
        )));
    }
    let ratio = t_end / dt;
    let m = ratio.round();
    if (ratio - m).abs() > 1e-12 * m.max(1.0) {
        return Err(Error::Config(format!(
            "T / dt = {ratio} is not an integer number of steps"
        )));
    }
    Ok(m as usize)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_elements < 3 {
            return Err(Error::Config(format!(
                "J must be at least 3, got {}",
                self.num_elements
            )));
        }
        step_count(self.t_end, self.dt)?;
        if self.forced && self.curve != CurveChoice::Manufactured {
            return Err(Error::Config(
                "forcing requires the manufactured curve".into(),
            ));
        }
        if !self.delta.is_finite() {
            return Err(Error::Config("delta must be finite".into()));
        }
        Ok(())
    }

    pub fn num_steps(&self) -> Result<usize> {
        step_count(self.t_end, self.dt)
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("bad value '{value}' for {what}"));
        match key {
            "flow" => self.flow = value.parse()?,
            "scheme" => self.scheme = value.parse()?,
            "J" => self.num_elements = value.trim().parse().map_err(|_| bad("J"))?,
            "dt" => self.dt = parse_real(value).ok_or_else(|| bad("dt"))?,
            "T" => self.t_end = parse_real(value).ok_or_else(|| bad("T"))?,
            "curve" => self.curve = value.parse()?,
            "forced" => self.forced = value.trim().parse().map_err(|_| bad("forced"))?,
            "delta" => self.delta = parse_real(value).ok_or_else(|| bad("delta"))?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => self.format = value.parse()?,
            "frame_stride" => {
                self.frame_stride = value.trim().parse().map_err(|_| bad("frame_stride"))?
            }
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Flat `key = value` text; blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }
}

/// Parses a real number, also accepting powers of two written `2^-k`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(exp) = s.strip_prefix("2^") {
        return exp.parse::<i32>().ok().map(|k| 2f64.powi(k));
    }
    s.parse().ok().filter(|v: &f64| v.is_finite())
}
