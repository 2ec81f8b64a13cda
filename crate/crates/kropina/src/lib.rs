//! Configuration files, built-in fixtures, batch runs and reports for the
//! Kropina verification engine in `kropina-core`.

pub mod builtins;
pub mod config;
pub mod report;
pub mod run;

pub use builtins::builtin;
pub use config::{Check, RunConfig};
pub use report::{Report, Status};
pub use run::run;
