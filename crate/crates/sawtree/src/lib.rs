//! Command line, experiment recipes and parallel drivers on top of
//! `sawtree-core`.
//!
//! * [`spec`] parses tree descriptions such as `join(prop5:7/5,prop5bar:5/4)`.
//! * [`experiments`] runs the recipes and writes reproducible reports.
//! * [`svg`] draws lattice walks.

pub mod config;
pub mod error;
pub mod experiments;
pub mod parallel;
pub mod spec;
pub mod svg;

pub use config::ExperimentConfig;
pub use error::{AppError, AppResult};
pub use experiments::{run_experiment, Report};
pub use spec::{parse_tree, AnyTree};
