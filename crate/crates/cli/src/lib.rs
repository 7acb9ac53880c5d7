//! Command implementations behind the `thz-fec` binary: system configs, the
//! distance sweep, coded analysis and Monte-Carlo campaigns, all emitting CSV.

pub mod analyze;
pub mod campaign;
pub mod code;
pub mod config;
pub mod simulate;
pub mod sweep;
pub mod table;

pub use analyze::{analyze, analyze_rows, AnalyzeOptions, AnalyzeRow};
pub use code::CodeSpec;
pub use config::Setup;
pub use simulate::{simulate, simulate_rows, Operating, SimulateOptions};
pub use sweep::{link_sweep, Grid};
pub use table::Table;
