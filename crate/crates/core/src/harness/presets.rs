//! Named experiment settings used by the `table` subcommand and the tests.

use super::config::{CurveChoice, ExperimentConfig, Flow, Scheme};
use crate::manufactured::{InitialCurve, DEFAULT_DELTA};

/// Mesh sequence and final time of a manufactured convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePreset {
    pub name: &'static str,
    pub flow: Flow,
    pub scheme: Scheme,
    pub js: &'static [usize],
    pub t_end: f64,
    pub delta: f64,
}

pub const CONVERGENCE_JS: &[usize] = &[32, 64, 128, 256];

pub fn convergence_presets() -> Vec<ConvergencePreset> {
    let mk = |name, flow, scheme, t_end| ConvergencePreset {
        name,
        flow,
        scheme,
        js: CONVERGENCE_JS,
        t_end,
        delta: DEFAULT_DELTA,
    };
    vec![
        mk("csf-pc", Flow::Csf, Scheme::PredictorCorrector, 0.25),
        mk("csf-first-order", Flow::Csf, Scheme::FirstOrder, 0.25),
        mk("cd-pc", Flow::Cd, Scheme::PredictorCorrector, 1.0),
        mk("cd-first-order", Flow::Cd, Scheme::FirstOrder, 1.0),
    ]
}

pub fn convergence_preset(name: &str) -> Option<ConvergencePreset> {
    convergence_presets().into_iter().find(|p| p.name == name)
}

/// Nonconvex curve under curve shortening flow, predictor-corrector.
pub fn nonconvex_evolution() -> ExperimentConfig {
    ExperimentConfig {
        flow: Flow::Csf,
        scheme: Scheme::PredictorCorrector,
        num_elements: 256,
        dt: 1e-3,
        t_end: 0.35,
        curve: CurveChoice::Initial(InitialCurve::Nonconvex),
        forced: false,
        ..Default::default()
    }
}

/// Interlocked rings in three dimensions under curve diffusion.
pub fn rings_evolution() -> ExperimentConfig {
    ExperimentConfig {
        flow: Flow::Cd,
        scheme: Scheme::PredictorCorrector,
        num_elements: 512,
        dt: 1e-2,
        t_end: 10.0,
        curve: CurveChoice::Initial(InitialCurve::InterlockedRings),
        forced: false,
        ..Default::default()
    }
}
