//! Scenario driver: configs, bundled presets and the run loop.

pub mod config;
pub mod presets;
pub mod run;

pub use config::RunConfig;
pub use presets::{list_presets, preset, Preset};
pub use run::{run, Record, RunReport, Summary, SweepPoint};
