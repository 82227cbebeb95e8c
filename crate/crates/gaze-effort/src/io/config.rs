//! Pipeline configuration: a flat key/value file with dotted keys
//! (TOML-compatible), every key optional.
//!
//! ```text
//! grid.n_g = 5
//! grid.half_angle_deg = 50.0
//! detector.dispersion_deg = 1.0
//! detector.min_fix_ms = 100.0
//! detector.max_gap = 3
//! measures.check_set = ["mirror_left", "mirror_right", "instrument", "periphery"]
//! modes.pg_mode = "cell"
//! modes.arc_mode = "path"
//! modes.support = "auto"
//! stats.alpha_levels = [0.05, 0.01, 0.001]
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fixation::DetectorParams;
use crate::measures::MeasureParams;
use crate::retinal_flow::ArcMode;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub detector: DetectorParams,
    pub measures: MeasureParams,
    pub arc_mode: ArcMode,
    pub alpha_levels: Vec<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            detector: DetectorParams::default(),
            measures: MeasureParams::default(),
            arc_mode: ArcMode::default(),
            alpha_levels: vec![0.05, 0.01, 0.001],
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        self.detector.validate()?;
        self.measures.grid.validate()?;
        if self.alpha_levels.is_empty()
            || self
                .alpha_levels
                .windows(2)
                .any(|w| w[0] <= w[1])
        {
            return Err(Error::Config(
                "stats.alpha_levels must be strictly descending and non-empty".into(),
            ));
        }
        Ok(())
    }
}

fn lookup<'a>(root: &'a toml::Table, dotted: &str) -> Option<&'a toml::Value> {
    let mut parts = dotted.split('.');
    let mut cur = root.get(parts.next()?)?;
    for part in parts {
        cur = cur.get(part)?;
    }
    Some(cur)
}

fn want_f64(v: &toml::Value, key: &str) -> Result<f64> {
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .ok_or_else(|| Error::Config(format!("{key} must be a number")))
}

fn want_usize(v: &toml::Value, key: &str) -> Result<usize> {
    let i = v
        .as_integer()
        .ok_or_else(|| Error::Config(format!("{key} must be an integer")))?;
    usize::try_from(i).map_err(|_| Error::Config(format!("{key} must be nonnegative")))
}

fn want_str<'a>(v: &'a toml::Value, key: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Config(format!("{key} must be a string")))
}

/// Parses a config file over the defaults.
pub fn parse_config(text: &str) -> Result<Config> {
    let root: toml::Table = text
        .parse()
        .map_err(|e| Error::Config(format!("invalid config: {e}")))?;
    let mut cfg = Config::default();

    if let Some(v) = lookup(&root, "grid.n_g") {
        cfg.measures.grid.n = want_usize(v, "grid.n_g")?;
    }
    if let Some(v) = lookup(&root, "grid.half_angle_deg") {
        cfg.measures.grid.half_angle_deg = want_f64(v, "grid.half_angle_deg")?;
    }
    if let Some(v) = lookup(&root, "detector.dispersion_deg") {
        cfg.detector.dispersion_deg = want_f64(v, "detector.dispersion_deg")?;
    }
    if let Some(v) = lookup(&root, "detector.min_fix_ms") {
        cfg.detector.min_duration = want_f64(v, "detector.min_fix_ms")? / 1000.0;
    }
    if let Some(v) = lookup(&root, "detector.max_gap") {
        cfg.detector.max_gap = want_usize(v, "detector.max_gap")?;
    }
    if let Some(v) = lookup(&root, "measures.check_set") {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Config("measures.check_set must be an array".into()))?;
        let mut set = BTreeSet::new();
        for item in arr {
            set.insert(want_str(item, "measures.check_set entry")?.to_string());
        }
        cfg.measures.check_set = set;
    }
    if let Some(v) = lookup(&root, "modes.pg_mode") {
        cfg.measures.pg_mode = want_str(v, "modes.pg_mode")?.parse()?;
    }
    if let Some(v) = lookup(&root, "modes.arc_mode") {
        cfg.arc_mode = want_str(v, "modes.arc_mode")?.parse()?;
    }
    if let Some(v) = lookup(&root, "modes.support") {
        cfg.measures.support = want_str(v, "modes.support")?.parse()?;
    }
    if let Some(v) = lookup(&root, "stats.alpha_levels") {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Config("stats.alpha_levels must be an array".into()))?;
        cfg.alpha_levels = arr
            .iter()
            .map(|x| want_f64(x, "stats.alpha_levels entry"))
            .collect::<Result<_>>()?;
    }

    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<Config> {
    parse_config(&fs::read_to_string(path)?)
}
