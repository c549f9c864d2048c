//! Experiment driver: configuration, diagnostics, studies and file output.

mod config;
mod diagnostics;
pub mod output;
pub mod presets;
mod sim;
mod study;

pub use config::{
    parse_real, step_count, CurveChoice, ExperimentConfig, Flow, OutputFormat, Scheme,
};
pub use diagnostics::{curve_length, element_ratio, DiagnosticsRecord};
pub use sim::{FlowState, Manufactured, Simulation, TABLE_NORM_POINTS};
pub use study::{
    compute_eoc, manufactured_errors, run_convergence_study, run_evolution,
    run_timestep_refinement, ConvergenceRow, ConvergenceTable, ErrorSummary, EvolutionResult,
    Frame, RefinementRow,
};
