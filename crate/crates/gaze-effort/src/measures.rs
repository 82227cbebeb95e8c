//! Per-trial metric assembly: the two proposed cognitive-effort measures
//! (view-importance entropy and the information-quantity ratio), the
//! comparison measures (check rate, stationary gaze entropy, entropy rate),
//! and the ground-truth proxies (pupil size change, fixation rate, driving
//! performance).
//!
//! Metrics that cannot be computed for a trial are carried as tagged values,
//! never silently zeroed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::distributions::{
    self, PgMode, SupportMode,
};
use crate::error::{Error, Result};
use crate::fixation;
use crate::infotheory;
use crate::model::{GridSpec, Trial};

/// Clamp floor for SRJSD values entering the information-quantity logs.
pub const SRJSD_EPS: f64 = 1e-12;

/// A per-trial metric value, a tagged degenerate, or a tagged reason it is
/// missing.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Value(f64),
    /// Degenerate unbounded result (constant-speed driving performance).
    Infinite,
    Missing(String),
}

impl Metric {
    pub fn value(&self) -> Option<f64> {
        match self {
            Metric::Value(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Metric::Value(_))
    }

    fn from_result(res: Result<f64>, name: &str, diagnostics: &mut Vec<String>) -> Metric {
        match res {
            Ok(v) => Metric::Value(v),
            Err(e) => {
                diagnostics.push(format!("{name}: {e}"));
                Metric::Missing(e.to_string())
            }
        }
    }
}

/// Everything measured for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub trial_id: String,
    /// View-importance entropy, bits.
    pub cem_vi: Metric,
    /// Information-quantity ratio, dimensionless.
    pub cem_iq: Metric,
    /// Stationary gaze entropy over grid cells, bits.
    pub sge: Metric,
    /// Entropy rate of the grid-cell fixation chain, bits/transition.
    pub entropy_rate: Metric,
    /// Check-AOI fixations per minute.
    pub check_rate: Metric,
    /// Fixations per second.
    pub fixation_rate: Metric,
    /// Population standard deviation of pupil size, millimeters.
    pub pupil_size_change: Metric,
    /// Inverse mean absolute acceleration, s^2/m.
    pub driving_performance: Metric,
    /// Scanning efficiency at fixation level, [0, 1].
    pub srjsd_f: Metric,
    /// Scanning efficiency at transition level, [0, 1].
    pub srjsd_fs: Metric,
    pub diagnostics: Vec<String>,
}

/// Knobs shared by the per-trial measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams {
    pub grid: GridSpec,
    pub check_set: BTreeSet<String>,
    pub pg_mode: PgMode,
    pub support: SupportMode,
}

impl Default for MeasureParams {
    fn default() -> Self {
        MeasureParams {
            grid: GridSpec::default(),
            check_set: ["mirror_left", "mirror_right", "instrument", "periphery"]
                .into_iter()
                .map(str::to_string)
                .collect(),
            pg_mode: PgMode::default(),
            support: SupportMode::default(),
        }
    }
}

/// Shannon entropy of the grid view-importance distribution, bits.
pub fn cem_vi(trial: &Trial, grid: &GridSpec, mode: PgMode) -> Result<f64> {
    let p_g = distributions::view_importance_distribution(&trial.fixations, grid, mode)?;
    Ok(infotheory::shannon_entropy(&p_g))
}

/// Scanning-efficiency values and the information-quantity ratio built from
/// them. `cem_iq` is `None` when the transition-level information quantity
/// is zero (SRJSD of the transition distributions is 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanEfficiency {
    pub srjsd_f: f64,
    pub srjsd_fs: f64,
    pub cem_iq: Option<f64>,
}

/// Ratio of information quantities for a pair of SRJSD values, with both
/// values clamped to `[SRJSD_EPS, 1]` before the logs.
pub fn cem_iq_from_srjsd(srjsd_f: f64, srjsd_fs: f64) -> Option<f64> {
    let num = -srjsd_f.clamp(SRJSD_EPS, 1.0).log2();
    let den = -srjsd_fs.clamp(SRJSD_EPS, 1.0).log2();
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

/// Fixation-level and transition-level scanning efficiency, plus the
/// information-quantity measure.
pub fn scan_efficiency(
    trial: &Trial,
    support: SupportMode,
    grid: &GridSpec,
) -> Result<ScanEfficiency> {
    let p_f = distributions::fixation_distribution(&trial.fixations, support, grid)?;
    let p_r = distributions::retinal_flow_distribution(&trial.fixations, support, grid)?;
    let (p_fs, p_rs) = distributions::transition_distributions(&trial.fixations, support, grid)?;
    let srjsd_f = infotheory::srjsd(&p_f, &p_r)?;
    let srjsd_fs = infotheory::srjsd(&p_fs, &p_rs)?;
    Ok(ScanEfficiency {
        srjsd_f,
        srjsd_fs,
        cem_iq: cem_iq_from_srjsd(srjsd_f, srjsd_fs),
    })
}

/// Entropy of the fixation-location histogram over grid cells, bits.
pub fn sge(trial: &Trial, grid: &GridSpec) -> Result<f64> {
    let p = distributions::fixation_distribution(&trial.fixations, SupportMode::Grid, grid)?;
    Ok(infotheory::shannon_entropy(&p))
}

/// Entropy rate of the grid-cell fixation chain, bits per transition.
pub fn entropy_rate(trial: &Trial, grid: &GridSpec) -> Result<f64> {
    let cells: Vec<usize> = trial
        .fixations
        .iter()
        .map(|f| distributions::grid_cell(f.centroid_dir, grid))
        .collect();
    infotheory::entropy_rate(&cells)
}

/// Fixations on check AOIs per minute of trial time.
pub fn check_rate(trial: &Trial, check_set: &BTreeSet<String>) -> Result<f64> {
    if !trial.fixations.iter().any(|f| f.aoi.is_some()) {
        return Err(Error::MissingAoiLabels);
    }
    let span = trial.span();
    if span <= 0.0 {
        return Err(Error::DegenerateDuration(span));
    }
    let checks = trial
        .fixations
        .iter()
        .filter(|f| f.aoi.as_ref().is_some_and(|a| check_set.contains(a)))
        .count();
    Ok(checks as f64 / (span / 60.0))
}

/// Population standard deviation of pupil size over valid pupil samples,
/// millimeters.
pub fn pupil_size_change(trial: &Trial) -> Result<f64> {
    let pupils: Vec<f64> = trial
        .samples
        .iter()
        .filter(|s| s.pupil_valid())
        .map(|s| s.pupil.unwrap())
        .collect();
    if pupils.is_empty() {
        return Err(Error::NoValidPupilSamples);
    }
    let n = pupils.len() as f64;
    let mean = pupils.iter().sum::<f64>() / n;
    let var = pupils.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / n;
    Ok(var.sqrt())
}

/// Driving performance: inverse of the mean absolute acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DrivingPerformance {
    Finite(f64),
    /// Constant speed: zero mean acceleration.
    Infinite,
}

/// Acceleration by central finite differences of the speed channel over
/// time, then 1 / mean |accel|.
pub fn driving_performance(trial: &Trial) -> Result<DrivingPerformance> {
    let track: Vec<(f64, f64)> = trial
        .samples
        .iter()
        .filter_map(|s| s.speed.map(|v| (s.t, v)))
        .collect();
    if track.is_empty() {
        return Err(Error::MissingSpeed);
    }
    if track.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: track.len(),
        });
    }
    let mut total = 0.0;
    for w in track.windows(3) {
        let (t0, _) = w[0];
        let (t2, v2) = w[2];
        let (_, v0) = w[0];
        total += ((v2 - v0) / (t2 - t0)).abs();
    }
    let mean = total / (track.len() - 2) as f64;
    if mean == 0.0 {
        Ok(DrivingPerformance::Infinite)
    } else {
        Ok(DrivingPerformance::Finite(1.0 / mean))
    }
}

/// Computes every metric for one trial whose fixations have been detected
/// and enriched. Per-metric failures become tagged-missing fields plus one
/// diagnostic line each.
pub fn metrics_row(trial: &Trial, params: &MeasureParams) -> MetricsRow {
    let mut diagnostics = Vec::new();
    let grid = &params.grid;

    let cem_vi_m = Metric::from_result(cem_vi(trial, grid, params.pg_mode), "cem_vi", &mut diagnostics);
    let sge_m = Metric::from_result(sge(trial, grid), "sge", &mut diagnostics);
    let entropy_rate_m =
        Metric::from_result(entropy_rate(trial, grid), "entropy_rate", &mut diagnostics);
    let check_rate_m = Metric::from_result(
        check_rate(trial, &params.check_set),
        "check_rate",
        &mut diagnostics,
    );
    let fixation_rate_m = Metric::from_result(
        fixation::fixation_rate(trial),
        "fixation_rate",
        &mut diagnostics,
    );
    let pupil_m = Metric::from_result(
        pupil_size_change(trial),
        "pupil_size_change",
        &mut diagnostics,
    );

    let driving_m = match driving_performance(trial) {
        Ok(DrivingPerformance::Finite(v)) => Metric::Value(v),
        Ok(DrivingPerformance::Infinite) => {
            diagnostics.push("driving_performance: constant speed, infinite performance".into());
            Metric::Infinite
        }
        Err(e) => {
            diagnostics.push(format!("driving_performance: {e}"));
            Metric::Missing(e.to_string())
        }
    };

    let (srjsd_f_m, srjsd_fs_m, cem_iq_m) = match scan_efficiency(trial, params.support, grid) {
        Ok(se) => {
            let iq = match se.cem_iq {
                Some(v) => Metric::Value(v),
                None => {
                    diagnostics.push(
                        "cem_iq: degenerate denominator (transition SRJSD is 1)".into(),
                    );
                    Metric::Missing("degenerate denominator (transition SRJSD is 1)".into())
                }
            };
            (
                Metric::Value(se.srjsd_f),
                Metric::Value(se.srjsd_fs),
                iq,
            )
        }
        Err(e) => {
            diagnostics.push(format!("scan_efficiency: {e}"));
            let m = Metric::Missing(e.to_string());
            (m.clone(), m.clone(), m)
        }
    };

    MetricsRow {
        trial_id: trial.id(),
        cem_vi: cem_vi_m,
        cem_iq: cem_iq_m,
        sge: sge_m,
        entropy_rate: entropy_rate_m,
        check_rate: check_rate_m,
        fixation_rate: fixation_rate_m,
        pupil_size_change: pupil_m,
        driving_performance: driving_m,
        srjsd_f: srjsd_f_m,
        srjsd_fs: srjsd_fs_m,
        diagnostics,
    }
}
