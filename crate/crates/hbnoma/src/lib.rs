//! Scenario runner for the hybrid-beamforming NOMA simulator: TOML scenario
//! files, seeded parallel Monte Carlo, the fig2 and fig3 sweeps, and
//! CSV/JSON output. The `hbnoma` binary wraps these.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod sim;
pub mod sweep;

pub use config::{AngleField, ClusterSpec, ScenarioConfig, SnrSpec, UserSpec};
pub use error::{HarnessError, Result};
pub use output::Format;
pub use sim::{run_scenario, BoundCheck, PointSummary, RunManifest, UserAggregate};
pub use sweep::{spearman, sweep, sweep_fig2, sweep_fig3, Fig2Row, Fig3Row, SweepRange, SweepSpec, SweepVariable};
