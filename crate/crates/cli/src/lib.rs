//! Front end of the `imethod` tool: configuration parsing, experiment
//! dispatch, output files and run manifests.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, Command, ConfigError, FileConfig, RunConfig};
pub use output::{sha256_hex, Manifest, OutputDir, OutputEntry};
pub use run::{execute, RunError, RunSummary};

/// Revision of the sources the binary was built from.
pub const SOURCE_REVISION: &str = env!("IMETHOD_SOURCE_REV");

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "IMETHOD_OUT";
