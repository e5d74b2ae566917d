//! Scenario runner for the taylorlab numerical laboratory.
//!
//! A scenario file names a model, its parameters and initial state, the
//! series order, an optional multistage setting, a time grid, the analyses
//! to run and the expected values to check. [`scenario::run_scenario`]
//! produces CSV and SVG artifacts plus a pass/fail [`report::ComparisonReport`].
//! [`figures::reproduce_figure`] regenerates the four reference figures and
//! [`presets`] bundles the shipped scenarios.

pub mod config;
pub mod figures;
pub mod geometry;
pub mod orbit;
pub mod presets;
pub mod report;
pub mod scenario;
pub mod svg;

pub use config::{validate_config, ScenarioConfig};
pub use report::{AggregateReport, ComparisonReport, ReportRow};
pub use scenario::{run_scenario, LabError, OutputFormat, RunOptions, ScenarioOutcome};
