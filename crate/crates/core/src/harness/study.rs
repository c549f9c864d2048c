//! Evolutions, convergence studies and time step refinement.

use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::NodalField;

use super::config::{step_count, CurveChoice, ExperimentConfig, Flow, Scheme};
use super::diagnostics::DiagnosticsRecord;
use super::sim::Simulation;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frame {
    pub m: usize,
    pub t: f64,
    #[serde(skip)]
    pub x: NodalField,
}

/// Maxima over all time levels `m = 0..=M` of the errors against the
/// manufactured solution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub l2_x: f64,
    pub h1_x: f64,
    pub l2_y: Option<f64>,
    pub h1_y: Option<f64>,
}

impl ErrorSummary {
    fn update(&mut self, sim: &Simulation) -> Result<()> {
        let Some(m) = sim.manufactured else {
            return Ok(());
        };
        let (l2, h1) = m.position_errors(&sim.grid, sim.x(), sim.t())?;
        self.l2_x = self.l2_x.max(l2);
        self.h1_x = self.h1_x.max(h1);
        if let Some(y) = sim.y() {
            if let Some((l2, h1)) = m.curvature_errors(&sim.grid, y, sim.t())? {
                self.l2_y = Some(self.l2_y.unwrap_or(0.0).max(l2));
                self.h1_y = Some(self.h1_y.unwrap_or(0.0).max(h1));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub final_x: NodalField,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub frames: Vec<Frame>,
    /// Present when the initial curve is the manufactured solution.
    pub errors: Option<ErrorSummary>,
}

/// Steps the configured scheme `M = T / dt` times, recording diagnostics at
/// every time level and a frame every `frame_stride` steps.
pub fn run_evolution(cfg: &ExperimentConfig) -> Result<EvolutionResult> {
    let steps = cfg.num_steps()?;
    let mut sim = Simulation::from_config(cfg)?;
    let h = sim.grid.h_max();
    if cfg.dt > h.powf(0.25) {
        warn!("dt = {} exceeds h^(1/4) = {}", cfg.dt, h.powf(0.25));
    }
    let track_errors = cfg.curve == CurveChoice::Manufactured;
    let mut errors = ErrorSummary::default();
    if track_errors {
        errors.update(&sim)?;
    }
    let mut diagnostics = Vec::with_capacity(steps + 1);
    let mut frames = Vec::new();
    diagnostics.push(DiagnosticsRecord::measure(
        &sim.grid,
        0,
        0.0,
        sim.x(),
        None,
    )?);
    if cfg.frame_stride > 0 {
        frames.push(Frame {
            m: 0,
            t: 0.0,
            x: sim.x().clone(),
        });
    }
    for m in 1..=steps {
        let residual = sim.step()?;
        diagnostics.push(DiagnosticsRecord::measure(
            &sim.grid,
            m,
            sim.t(),
            sim.x(),
            residual,
        )?);
        if track_errors {
            errors.update(&sim)?;
        }
        if cfg.frame_stride > 0 && m % cfg.frame_stride == 0 {
            frames.push(Frame {
                m,
                t: sim.t(),
                x: sim.x().clone(),
            });
        }
    }
    Ok(EvolutionResult {
        final_x: sim.x().clone(),
        diagnostics,
        frames,
        errors: track_errors.then_some(errors),
    })
}

/// Runs the forced manufactured problem and returns the error maxima.
pub fn manufactured_errors(
    flow: Flow,
    scheme: Scheme,
    num_elements: usize,
    dt: f64,
    t_end: f64,
    delta: f64,
) -> Result<ErrorSummary> {
    let cfg = ExperimentConfig {
        flow,
        scheme,
        num_elements,
        dt,
        t_end,
        curve: CurveChoice::Manufactured,
        forced: true,
        delta,
        ..Default::default()
    };
    let steps = cfg.num_steps()?;
    let mut sim = Simulation::from_config(&cfg)?;
    let mut errors = ErrorSummary::default();
    errors.update(&sim)?;
    for _ in 0..steps {
        sim.step()?;
        errors.update(&sim)?;
    }
    Ok(errors)
}

/// `log2(e_{k-1} / e_k)` for consecutive errors; the first entry is `None`.
pub fn compute_eoc(errors: &[f64]) -> Result<Vec<Option<f64>>> {
    if let Some(bad) = errors.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::NonPositiveError(*bad));
    }
    Ok(std::iter::once(None)
        .chain(errors.windows(2).map(|w| Some((w[0] / w[1]).log2())))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "J")]
    pub num_elements: usize,
    pub l2_x: f64,
    pub h1_x: f64,
    pub l2_y: Option<f64>,
    pub h1_y: Option<f64>,
}

/// Error table over a sequence of doubling `J` with `dt = h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub flow: Flow,
    pub scheme: Scheme,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub delta: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    fn column(&self, f: impl Fn(&ConvergenceRow) -> Option<f64>) -> Option<Vec<f64>> {
        self.rows.iter().map(f).collect()
    }

    pub fn l2_x(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.l2_x).collect()
    }

    pub fn h1_x(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.h1_x).collect()
    }

    pub fn l2_y(&self) -> Option<Vec<f64>> {
        self.column(|r| r.l2_y)
    }

    pub fn h1_y(&self) -> Option<Vec<f64>> {
        self.column(|r| r.h1_y)
    }

    pub fn has_y(&self) -> bool {
        self.rows.first().is_some_and(|r| r.l2_y.is_some())
    }
}

/// One forced run per `J` (concurrently), with `dt = 1/J`.
pub fn run_convergence_study(
    flow: Flow,
    scheme: Scheme,
    js: &[usize],
    t_end: f64,
    delta: f64,
) -> Result<ConvergenceTable> {
    if js.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::Config(format!("J values must double: {js:?}")));
    }
    let rows = js
        .par_iter()
        .map(|&j| {
            let start = Instant::now();
            let e = manufactured_errors(flow, scheme, j, 1.0 / j as f64, t_end, delta)?;
            info!(
                "{flow} {scheme} J={j}: L2 {:e} H1 {:e} ({:.2}s)",
                e.l2_x,
                e.h1_x,
                start.elapsed().as_secs_f64()
            );
            Ok(ConvergenceRow {
                num_elements: j,
                l2_x: e.l2_x,
                h1_x: e.h1_x,
                l2_y: e.l2_y,
                h1_y: e.h1_y,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable {
        flow,
        scheme,
        t_end,
        delta,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementRow {
    pub dt: f64,
    pub l2_x: f64,
    /// Wall-clock time of the run; informational only.
    pub wall_seconds: f64,
}

/// Fixed `J`, a list of time steps: the temporal error decay.
pub fn run_timestep_refinement(
    flow: Flow,
    scheme: Scheme,
    num_elements: usize,
    dts: &[f64],
    t_end: f64,
    delta: f64,
) -> Result<Vec<RefinementRow>> {
    for dt in dts {
        step_count(t_end, *dt)?;
    }
    dts.par_iter()
        .map(|&dt| {
            let start = Instant::now();
            let e = manufactured_errors(flow, scheme, num_elements, dt, t_end, delta)?;
            Ok(RefinementRow {
                dt,
                l2_x: e.l2_x,
                wall_seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}
