//! File formats, configuration, and report serialization.

pub mod config;
pub mod format;
pub mod report;

pub use config::{load_config, parse_config, Config};
pub use format::{parse_trial, parse_trial_str, trial_to_jsonl, write_trial};
