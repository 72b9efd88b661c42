//! Batch front-end for `eit_forge`: config parsing, run modes and CSV
//! output.

// `!(x > 0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_str, DistributionSource, Mode, RunConfig};
pub use error::CliError;
pub use run::{run, Outcome};
