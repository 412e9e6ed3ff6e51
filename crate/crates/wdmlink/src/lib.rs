//! Scenario files, reports and the `wdmlink` command line on top of
//! `wdmlink-core`.
//!
//! A scenario (TOML, or the JSON echo of an earlier run) describes the
//! channel plan, fibre, amplifiers and coding. The commands run the
//! pipeline stages and write CSV and JSON:
//!
//! * `plan`: the channel plan CSV.
//! * `estimate`: per-channel link budget and notch-sweep SNR.
//! * `throughput`: GMI-based and decoded rates per channel.
//! * `optimize`: exhaustive pre-tilt and band-edge trim search.
//! * `plotdata`: plot-ready files from a report.

pub mod commands;
pub mod error;
pub mod io;
pub mod num;
pub mod plot;
pub mod report;
pub mod scenario;
pub mod svg;
pub mod tables;

pub use commands::{cmd_estimate, cmd_optimize, cmd_plan, cmd_throughput, estimate, optimize, throughput, OutputOptions};
pub use error::{Error, Result, Stage};
pub use plot::cmd_plotdata;
pub use report::{OptimizeReport, RunReport};
pub use scenario::{Format, Scenario, ScenarioFile};
