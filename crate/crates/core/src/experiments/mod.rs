//! Scenario configs, Monte Carlo drivers and reports.

pub mod config;
pub mod mc;
pub mod report;
pub mod scenarios;
pub mod stats;

pub use config::{Scenario, ScenarioConfig, SuiteConfig};
pub use mc::{mc_probabilities, mc_probability, sample_functionals, Source};
pub use report::{Check, LimitConstant, Report, Row};
pub use scenarios::{dump_scenario_paths, limit_constant, run_scenario};
