//! Command-line front end for `entrate`: file ingestion, reports and the
//! group comparison used on per-subject estimates.

pub mod cli;
pub mod commands;
pub mod error;
pub mod ingest;
pub mod report;
pub mod ttest;

pub use error::{CliError, ErrorKind};
