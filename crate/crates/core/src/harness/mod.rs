//! Experiment configuration, grid expansion, seeded runs and result files.

pub mod config;
mod emit;
mod grid;
mod runner;

pub use config::{ExperimentConfig, Method, Mode};
pub use emit::{emit_results, plot_file_name};
pub use grid::{expand_grid, GridPoint};
pub use runner::{
    compute_reports, initial_weights, plan_experiment, run_experiment, run_single,
    summarize_points, theorem1_plan, ExperimentOutput, MethodPoints, PointSummary, RunSettings,
    StepView, Theorem1Plan,
};
