//! Probability distributions over fixation locations: the fixation and
//! retinal-flow distributions, their transition counterparts, and the grid
//! view-importance distribution.
//!
//! A "location" is an AOI label when the trial carries AOI data, otherwise a
//! viewing-plane grid cell. The fixation-level and flow-level distributions
//! always share one support; so do the transition-level pair distributions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::model::{Distribution, Fixation, GridSpec};

/// Where a fixation lands, at the granularity the trial supports.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Location {
    Aoi(String),
    Cell(usize),
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Aoi(l) => f.write_str(l),
            Location::Cell(c) => write!(f, "cell{c}"),
        }
    }
}

/// Which support the location distributions are built over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SupportMode {
    /// AOI labels when every fixation carries one, grid cells otherwise.
    #[default]
    Auto,
    Aoi,
    Grid,
}

impl std::str::FromStr for SupportMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SupportMode::Auto),
            "aoi" => Ok(SupportMode::Aoi),
            "grid" => Ok(SupportMode::Grid),
            other => Err(Error::Config(format!("unknown support mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for SupportMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SupportMode::Auto => "auto",
            SupportMode::Aoi => "aoi",
            SupportMode::Grid => "grid",
        })
    }
}

/// How the view-importance distribution is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum PgMode {
    /// Mass of a cell is its share of the total importance; cells with zero
    /// importance are dropped from the support.
    #[default]
    Cell,
    /// The per-cell importance values are binned into `n` equal-width value
    /// bins and the bin counts are normalized.
    ValueBinned,
}

impl std::str::FromStr for PgMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cell" => Ok(PgMode::Cell),
            "value-binned" => Ok(PgMode::ValueBinned),
            other => Err(Error::Config(format!("unknown pg mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for PgMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PgMode::Cell => "cell",
            PgMode::ValueBinned => "value-binned",
        })
    }
}

/// Maps a unit direction to a row-major grid cell index in `[0, n^2)`.
///
/// Yaw and pitch are mapped linearly from `[-half_angle, +half_angle]` to
/// `n` bins per axis; out-of-range angles clamp to the edge bins. Rows index
/// pitch (bottom row 0), columns index yaw (left column 0).
pub fn grid_cell(dir: Vec3, grid: &GridSpec) -> usize {
    let bin = |angle_deg: f64| -> usize {
        let half = grid.half_angle_deg;
        let x = (angle_deg + half) / (2.0 * half) * grid.n as f64;
        (x.floor() as isize).clamp(0, grid.n as isize - 1) as usize
    };
    bin(dir.pitch_deg()) * grid.n + bin(dir.yaw_deg())
}

fn resolve_support(fixations: &[Fixation], mode: SupportMode) -> Result<SupportMode> {
    let all_labeled = !fixations.is_empty() && fixations.iter().all(|f| f.aoi.is_some());
    match mode {
        SupportMode::Auto => Ok(if all_labeled {
            SupportMode::Aoi
        } else {
            SupportMode::Grid
        }),
        SupportMode::Aoi if !all_labeled => Err(Error::MissingAoiLabels),
        other => Ok(other),
    }
}

/// Location of one fixation under a resolved (non-auto) support mode.
fn locate(fix: &Fixation, resolved: SupportMode, grid: &GridSpec) -> Location {
    match resolved {
        SupportMode::Aoi => Location::Aoi(fix.aoi.clone().expect("aoi support requires labels")),
        _ => Location::Cell(grid_cell(fix.centroid_dir, grid)),
    }
}

/// Location sequence of a fixation list under `mode`.
pub fn locations(
    fixations: &[Fixation],
    mode: SupportMode,
    grid: &GridSpec,
) -> Result<Vec<Location>> {
    let resolved = resolve_support(fixations, mode)?;
    Ok(fixations
        .iter()
        .map(|f| locate(f, resolved, grid))
        .collect())
}

/// Normalized histogram of fixation locations.
pub fn fixation_distribution(
    fixations: &[Fixation],
    mode: SupportMode,
    grid: &GridSpec,
) -> Result<Distribution<Location>> {
    if fixations.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut counts: BTreeMap<Location, u64> = BTreeMap::new();
    for loc in locations(fixations, mode, grid)? {
        *counts.entry(loc).or_insert(0) += 1;
    }
    Distribution::from_counts(&counts)
}

/// Retinal-flow distribution: each location's share of the total flow.
/// Shares the support of [`fixation_distribution`] built from the same list.
pub fn retinal_flow_distribution(
    fixations: &[Fixation],
    mode: SupportMode,
    grid: &GridSpec,
) -> Result<Distribution<Location>> {
    if fixations.is_empty() {
        return Err(Error::EmptySequence);
    }
    let locs = locations(fixations, mode, grid)?;
    let mut weights: BTreeMap<Location, f64> = BTreeMap::new();
    for (fix, loc) in fixations.iter().zip(locs) {
        *weights.entry(loc).or_insert(0.0) += fix.flow;
    }
    if weights.values().sum::<f64>() <= 0.0 {
        return Err(Error::ZeroTotalFlow);
    }
    Distribution::from_weights(&weights)
}

/// A distribution over ordered location pairs.
pub type PairDistribution = Distribution<(Location, Location)>;

/// Transition distributions over consecutive fixation pairs.
///
/// The support is the set of observed ordered location pairs (self-pairs
/// included). The count distribution weighs each pair by its occurrences;
/// the flow distribution weighs each occurrence by the retinal flow of the
/// transition's first fixation.
pub fn transition_distributions(
    fixations: &[Fixation],
    mode: SupportMode,
    grid: &GridSpec,
) -> Result<(PairDistribution, PairDistribution)> {
    if fixations.len() < 2 {
        return Err(Error::FewerThanTwoFixations(fixations.len()));
    }
    let locs = locations(fixations, mode, grid)?;
    let mut counts: BTreeMap<(Location, Location), u64> = BTreeMap::new();
    let mut flows: BTreeMap<(Location, Location), f64> = BTreeMap::new();
    for (k, w) in locs.windows(2).enumerate() {
        let pair = (w[0].clone(), w[1].clone());
        *counts.entry(pair.clone()).or_insert(0) += 1;
        *flows.entry(pair).or_insert(0.0) += fixations[k].flow;
    }
    let p_fs = Distribution::from_counts(&counts)?;
    if flows.values().sum::<f64>() <= 0.0 {
        return Err(Error::ZeroTotalFlow);
    }
    let p_rs = Distribution::from_weights(&flows)?;
    Ok((p_fs, p_rs))
}

/// Per-cell accumulated observation importance over the full grid.
pub fn view_importance(fixations: &[Fixation], grid: &GridSpec) -> Vec<f64> {
    let mut v = vec![0.0; grid.cells()];
    for fix in fixations {
        v[grid_cell(fix.centroid_dir, grid)] += fix.importance;
    }
    v
}

/// Grid view-importance distribution.
pub fn view_importance_distribution(
    fixations: &[Fixation],
    grid: &GridSpec,
    mode: PgMode,
) -> Result<Distribution<usize>> {
    if fixations.is_empty() {
        return Err(Error::EmptySequence);
    }
    let v = view_importance(fixations, grid);
    let total: f64 = v.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroTotalImportance);
    }
    match mode {
        PgMode::Cell => {
            let weights: BTreeMap<usize, f64> = v
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(c, &w)| (c, w))
                .collect();
            Distribution::from_weights(&weights)
        }
        PgMode::ValueBinned => {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let width = (hi - lo) / grid.n as f64;
            let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
            for &val in &v {
                let b = if width > 0.0 {
                    (((val - lo) / width).floor() as isize).clamp(0, grid.n as isize - 1) as usize
                } else {
                    0
                };
                *counts.entry(b).or_insert(0) += 1;
            }
            counts.retain(|_, c| *c > 0);
            Distribution::from_counts(&counts)
        }
    }
}
