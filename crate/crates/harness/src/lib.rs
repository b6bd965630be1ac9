//! Command-line harness around `modgate_core`: single-shot evaluation,
//! parameter sweeps, seeded postselection sampling and regime reports.

pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod report;
pub mod sample;
pub mod sweep;

pub use error::{HarnessError, Result};
