//! Deterministic synthetic-session generator with a per-trial ledger of
//! every expected intermediate quantity.
//!
//! The generator scripts a trial as a sequence of fixation and blink
//! segments and emits the 90 Hz sample stream realizing it. While emitting,
//! it books the expected value of every pipeline output (per-fixation
//! geometry, all distributions, every metrics-row field) directly from the
//! scripted kinematics, without calling the pipeline code it is used to
//! check. The small entropy/divergence formulas that the ledger needs are
//! written out locally for the same reason.
//!
//! Stimulus kinematics per fixation: the fixated point moves along a great
//! circle about the observer (lateral velocity) while its depth changes
//! linearly (radial velocity). Angular jitter models slowly varying tracker
//! error: one small random rotation per fixation, which perturbs where the
//! cluster sits without distorting within-fixation geometry.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution as RandDistribution, Normal};
use serde::{Deserialize, Serialize};

use crate::distributions::Location;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::io::report::fmt9;
use crate::measures::MeasureParams;
use crate::model::{GazeSample, Trial};

/// One scripted fixation: where the stimulus sits and how it moves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixationScript {
    /// AOI label stamped on every member sample; None for unlabeled logs.
    pub aoi: Option<String>,
    /// Grid cell the fixation is constructed to land in.
    pub cell: usize,
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    /// Scheduled duration, seconds.
    pub duration: f64,
    /// Tangential stimulus speed, m/s.
    pub lateral_velocity: f64,
    /// Depth change rate, m/s.
    pub radial_velocity: f64,
    /// Initial depth, meters.
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    Fixate(FixationScript),
    /// Tracking loss: samples flagged invalid, gaze frozen.
    Blink { duration: f64 },
}

/// How the pupil channel evolves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Waveform {
    Constant,
    Sine { freq_hz: f64, phase: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PupilModel {
    pub mean_mm: f64,
    pub amplitude_mm: f64,
    pub waveform: Waveform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub participant_id: String,
    pub session_index: u32,
    pub seed: u64,
    pub sample_rate_hz: f64,
    /// Std-dev of the per-fixation angular offset, degrees. Zero disables.
    pub jitter_deg: f64,
    pub schedule: Vec<Segment>,
    pub pupil: PupilModel,
    /// Piecewise-linear speed profile: (time s, speed m/s) knots.
    pub speed_knots: Vec<(f64, f64)>,
}

impl Scenario {
    pub fn total_duration(&self) -> f64 {
        self.schedule
            .iter()
            .map(|s| match s {
                Segment::Fixate(f) => f.duration,
                Segment::Blink { duration } => *duration,
            })
            .sum()
    }

    fn validate(&self) -> Result<()> {
        if self.sample_rate_hz <= 0.0 {
            return Err(Error::InfeasibleSchedule("sample rate must be positive".into()));
        }
        for seg in &self.schedule {
            match seg {
                Segment::Fixate(f) => {
                    if f.duration <= 0.0 {
                        return Err(Error::InfeasibleSchedule(format!(
                            "fixation duration {} <= 0",
                            f.duration
                        )));
                    }
                    if f.depth <= 0.0 {
                        return Err(Error::InfeasibleSchedule(format!(
                            "fixation depth {} <= 0",
                            f.depth
                        )));
                    }
                    if f.depth + f.radial_velocity * f.duration <= 0.0 {
                        return Err(Error::InfeasibleSchedule(
                            "radial velocity drives depth through zero".into(),
                        ));
                    }
                }
                Segment::Blink { duration } => {
                    if *duration <= 0.0 {
                        return Err(Error::InfeasibleSchedule(format!(
                            "blink duration {duration} <= 0"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Expected pipeline outputs for one scripted fixation.
#[derive(Debug, Clone, PartialEq)]
pub struct FixationLedger {
    pub aoi: Option<String>,
    pub cell: usize,
    pub first_sample: usize,
    pub last_sample: usize,
    pub duration: f64,
    pub depth: f64,
    pub arc_len: f64,
    pub flow: f64,
    pub displacement_mag: f64,
    pub importance: f64,
}

/// Expected pipeline outputs for one trial. Metric fields are `None` when
/// the pipeline is expected to tag them missing; infinite driving
/// performance is `Some(f64::INFINITY)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialLedger {
    pub trial_id: String,
    pub fixations: Vec<FixationLedger>,
    pub p_f: BTreeMap<Location, f64>,
    pub p_r: BTreeMap<Location, f64>,
    pub p_fs: BTreeMap<(Location, Location), f64>,
    pub p_rs: BTreeMap<(Location, Location), f64>,
    pub p_g: BTreeMap<usize, f64>,
    pub cem_vi: Option<f64>,
    pub cem_iq: Option<f64>,
    pub sge: Option<f64>,
    pub entropy_rate: Option<f64>,
    pub check_rate: Option<f64>,
    pub fixation_rate: Option<f64>,
    pub pupil_size_change: Option<f64>,
    pub driving_performance: Option<f64>,
    pub srjsd_f: Option<f64>,
    pub srjsd_fs: Option<f64>,
}

// -- ledger-local math (kept independent of the pipeline modules) --

fn entropy_of(masses: &[f64]) -> f64 {
    let h = -masses
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| m * m.log2())
        .sum::<f64>();
    h + 0.0 // avoid IEEE -0.0 at a point mass
}

fn jsd_of<K: Ord>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> f64 {
    debug_assert!(p.len() == q.len());
    let mut sum = 0.0;
    for (k, &pm) in p {
        let qm = q[k];
        if pm > 0.0 {
            sum += pm * (2.0 * pm / (pm + qm)).log2();
        }
        if qm > 0.0 {
            sum += qm * (2.0 * qm / (pm + qm)).log2();
        }
    }
    (sum / 2.0).clamp(0.0, 1.0) + 0.0
}

fn chain_entropy_rate(seq: &[usize]) -> f64 {
    let n = seq.len() as f64;
    let mut visits: BTreeMap<usize, f64> = BTreeMap::new();
    for &s in seq {
        *visits.entry(s).or_insert(0.0) += 1.0;
    }
    let mut rows: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
    for w in seq.windows(2) {
        *rows.entry(w[0]).or_default().entry(w[1]).or_insert(0.0) += 1.0;
    }
    let mut h = 0.0;
    for (s, row) in &rows {
        let out: f64 = row.values().sum();
        let row_h: f64 = -row
            .values()
            .map(|&c| {
                let t = c / out;
                t * t.log2()
            })
            .sum::<f64>();
        h += visits[s] / n * row_h;
    }
    h
}

fn normalized<K: Ord + Clone>(weights: &BTreeMap<K, f64>) -> Option<BTreeMap<K, f64>> {
    let total: f64 = weights.values().sum();
    if total <= 0.0 {
        return None;
    }
    Some(
        weights
            .iter()
            .map(|(k, &w)| (k.clone(), w / total))
            .collect(),
    )
}

struct SpeedProfile<'a>(&'a [(f64, f64)]);

impl SpeedProfile<'_> {
    fn at(&self, t: f64) -> Option<f64> {
        let knots = self.0;
        if knots.is_empty() {
            return None;
        }
        if t <= knots[0].0 {
            return Some(knots[0].1);
        }
        for w in knots.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t <= t1 {
                return Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0));
            }
        }
        Some(knots[knots.len() - 1].1)
    }
}

/// Emits the sample stream of a scenario and books the expected value of
/// every pipeline output.
pub fn simulate_trial(sc: &Scenario, params: &MeasureParams) -> Result<(Trial, TrialLedger)> {
    sc.validate()?;
    let rate = sc.sample_rate_hz;
    let dt = 1.0 / rate;
    let mut rng = ChaCha12Rng::seed_from_u64(sc.seed);
    let jitter = if sc.jitter_deg > 0.0 {
        Some(Normal::new(0.0, sc.jitter_deg.to_radians()).expect("valid sigma"))
    } else {
        None
    };
    let speed = SpeedProfile(&sc.speed_knots);
    let up = Vec3::new(0.0, 1.0, 0.0);
    let x_axis = Vec3::new(1.0, 0.0, 0.0);

    let mut samples: Vec<GazeSample> = Vec::new();
    let mut fixations: Vec<FixationLedger> = Vec::new();

    // metric bookkeeping
    let mut pupil_n = 0.0;
    let mut pupil_sum = 0.0;
    let mut pupil_sumsq = 0.0;
    let mut accel_sum = 0.0;
    let mut accel_n = 0usize;
    let mut last_two: Vec<(f64, f64)> = Vec::new(); // (t, speed) ring for central diffs

    let mut emit = |samples: &mut Vec<GazeSample>,
                    t: f64,
                    dir: Vec3,
                    hit: Vec3,
                    depth: f64,
                    pupil: Option<f64>,
                    aoi: Option<String>,
                    valid: bool| {
        let v = speed.at(t);
        if let Some(v_now) = v {
            if last_two.len() == 2 {
                let (t0, v0) = last_two[0];
                accel_sum += ((v_now - v0) / (t - t0)).abs();
                accel_n += 1;
            }
            if last_two.len() == 2 {
                last_two.remove(0);
            }
            last_two.push((t, v_now));
        }
        if valid {
            if let Some(p) = pupil {
                if p > 0.0 {
                    pupil_n += 1.0;
                    pupil_sum += p;
                    pupil_sumsq += p * p;
                }
            }
        }
        samples.push(GazeSample {
            t,
            dir,
            hit,
            depth,
            pupil,
            aoi,
            speed: v,
            valid,
        });
    };

    let pupil_at = |t: f64| -> f64 {
        match sc.pupil.waveform {
            Waveform::Constant => sc.pupil.mean_mm,
            Waveform::Sine { freq_hz, phase } => {
                sc.pupil.mean_mm
                    + sc.pupil.amplitude_mm
                        * (2.0 * std::f64::consts::PI * freq_hz * t + phase).sin()
            }
        }
    };

    let mut k = 0usize; // global sample index
    let mut frozen = (Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, 1.0), 1.0);
    for seg in &sc.schedule {
        match seg {
            Segment::Blink { duration } => {
                let n = ((duration * rate).round() as usize).max(1);
                for _ in 0..n {
                    let t = k as f64 * dt;
                    let (dir, hit, depth) = frozen;
                    emit(&mut samples, t, dir, hit, depth, None, None, false);
                    k += 1;
                }
            }
            Segment::Fixate(f) => {
                let n = ((f.duration * rate).round() as usize).max(2);
                let base = Vec3::from_yaw_pitch_deg(f.yaw_deg, f.pitch_deg);
                let tangent = up
                    .cross(base)
                    .normalized()
                    .ok_or_else(|| Error::InfeasibleSchedule("gaze along the up axis".into()))?;
                // per-fixation tracker offset (rigid, so within-fixation
                // geometry is untouched)
                let (off_yaw, off_pitch) = match &jitter {
                    Some(n) => (n.sample(&mut rng), n.sample(&mut rng)),
                    None => (0.0, 0.0),
                };

                let first = k;
                let mut theta = 0.0f64;
                let mut flow = 0.0f64;
                let mut depth_sum = 0.0f64;
                let mut first_hit = Vec3::ZERO;
                let mut last_hit = Vec3::ZERO;
                for s in 0..n {
                    let t = k as f64 * dt;
                    let rho = f.depth + f.radial_velocity * (s as f64 * dt);
                    debug_assert!(rho > 0.0);
                    let dir0 = base.scale(theta.cos()) + tangent.scale(theta.sin());
                    let hit0 = dir0.scale(rho);
                    if s == 0 {
                        first_hit = hit0;
                    }
                    last_hit = hit0;
                    depth_sum += rho;

                    let dir = dir0
                        .rotate_about(x_axis, off_pitch)
                        .rotate_about(up, off_yaw);
                    let hit = dir.scale(rho);
                    frozen = (dir, hit, rho);
                    emit(
                        &mut samples,
                        t,
                        dir,
                        hit,
                        rho,
                        Some(pupil_at(t)),
                        f.aoi.clone(),
                        true,
                    );
                    if s + 1 < n {
                        let step = f.lateral_velocity * dt / rho;
                        theta += step;
                        flow += step.abs();
                    }
                    k += 1;
                }

                let depth_mean = depth_sum / n as f64;
                let u_mag = (last_hit - first_hit).norm();
                let importance = if u_mag < 1e-6 { 0.0 } else { flow / u_mag };
                fixations.push(FixationLedger {
                    aoi: f.aoi.clone(),
                    cell: f.cell,
                    first_sample: first,
                    last_sample: k - 1,
                    duration: (n - 1) as f64 * dt,
                    depth: depth_mean,
                    arc_len: flow * depth_mean,
                    flow,
                    displacement_mag: u_mag,
                    importance,
                });
            }
        }
    }

    let trial = Trial {
        participant_id: sc.participant_id.clone(),
        session_index: sc.session_index,
        samples,
        fixations: Vec::new(),
        metadata: BTreeMap::new(),
    };

    let ledger = build_ledger(
        &trial,
        fixations,
        params,
        PupilStats {
            n: pupil_n,
            sum: pupil_sum,
            sumsq: pupil_sumsq,
        },
        accel_sum,
        accel_n,
    )?;
    Ok((trial, ledger))
}

struct PupilStats {
    n: f64,
    sum: f64,
    sumsq: f64,
}

fn build_ledger(
    trial: &Trial,
    fixations: Vec<FixationLedger>,
    params: &MeasureParams,
    pupil: PupilStats,
    accel_sum: f64,
    accel_n: usize,
) -> Result<TrialLedger> {
    let span = trial.span();
    let all_labeled = !fixations.is_empty() && fixations.iter().all(|f| f.aoi.is_some());
    let use_aoi = match params.support {
        crate::distributions::SupportMode::Auto => all_labeled,
        crate::distributions::SupportMode::Aoi => true,
        crate::distributions::SupportMode::Grid => false,
    };
    let locate = |f: &FixationLedger| -> Location {
        if use_aoi {
            Location::Aoi(f.aoi.clone().expect("labeled"))
        } else {
            Location::Cell(f.cell)
        }
    };

    // location-level distributions
    let mut counts: BTreeMap<Location, f64> = BTreeMap::new();
    let mut flows: BTreeMap<Location, f64> = BTreeMap::new();
    for f in &fixations {
        *counts.entry(locate(f)).or_insert(0.0) += 1.0;
        *flows.entry(locate(f)).or_insert(0.0) += f.flow;
    }
    let p_f = normalized(&counts).unwrap_or_default();
    let p_r = normalized(&flows).unwrap_or_default();

    // transition-level distributions
    let mut pair_counts: BTreeMap<(Location, Location), f64> = BTreeMap::new();
    let mut pair_flows: BTreeMap<(Location, Location), f64> = BTreeMap::new();
    for w in fixations.windows(2) {
        let pair = (locate(&w[0]), locate(&w[1]));
        *pair_counts.entry(pair.clone()).or_insert(0.0) += 1.0;
        *pair_flows.entry(pair).or_insert(0.0) += w[0].flow;
    }
    let p_fs = normalized(&pair_counts).unwrap_or_default();
    let p_rs = normalized(&pair_flows).unwrap_or_default();

    // grid view importance
    let grid = &params.grid;
    let mut v_cells = vec![0.0; grid.cells()];
    for f in &fixations {
        v_cells[f.cell] += f.importance;
    }
    let v_total: f64 = v_cells.iter().sum();
    let (p_g, cem_vi) = if v_total > 0.0 {
        match params.pg_mode {
            crate::distributions::PgMode::Cell => {
                let map: BTreeMap<usize, f64> = v_cells
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v > 0.0)
                    .map(|(c, &v)| (c, v / v_total))
                    .collect();
                let h = entropy_of(&map.values().cloned().collect::<Vec<_>>());
                (map, Some(h))
            }
            crate::distributions::PgMode::ValueBinned => {
                let lo = v_cells.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = v_cells.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let width = (hi - lo) / grid.n as f64;
                let mut bins: BTreeMap<usize, f64> = BTreeMap::new();
                for &v in &v_cells {
                    let b = if width > 0.0 {
                        (((v - lo) / width).floor() as isize).clamp(0, grid.n as isize - 1) as usize
                    } else {
                        0
                    };
                    *bins.entry(b).or_insert(0.0) += 1.0;
                }
                let total: f64 = bins.values().sum();
                let map: BTreeMap<usize, f64> =
                    bins.iter().map(|(&b, &c)| (b, c / total)).collect();
                let h = entropy_of(&map.values().cloned().collect::<Vec<_>>());
                (map, Some(h))
            }
        }
    } else {
        (BTreeMap::new(), None)
    };

    // metric expectations
    let sge = if fixations.is_empty() {
        None
    } else {
        let mut cell_counts: BTreeMap<usize, f64> = BTreeMap::new();
        for f in &fixations {
            *cell_counts.entry(f.cell).or_insert(0.0) += 1.0;
        }
        let n = fixations.len() as f64;
        Some(entropy_of(
            &cell_counts.values().map(|c| c / n).collect::<Vec<_>>(),
        ))
    };
    let entropy_rate = if fixations.len() >= 2 {
        Some(chain_entropy_rate(
            &fixations.iter().map(|f| f.cell).collect::<Vec<_>>(),
        ))
    } else {
        None
    };
    let (srjsd_f, srjsd_fs, cem_iq) = if !p_r.is_empty() && !p_rs.is_empty() {
        let sf = jsd_of(&p_f, &p_r).sqrt();
        let sfs = jsd_of(&p_fs, &p_rs).sqrt();
        let num = -sf.clamp(1e-12, 1.0).log2();
        let den = -sfs.clamp(1e-12, 1.0).log2();
        let iq = if den == 0.0 { None } else { Some(num / den) };
        (Some(sf), Some(sfs), iq)
    } else if !p_r.is_empty() {
        (Some(jsd_of(&p_f, &p_r).sqrt()), None, None)
    } else {
        (None, None, None)
    };
    let check_rate = if all_labeled && span > 0.0 {
        let checks = fixations
            .iter()
            .filter(|f| {
                f.aoi
                    .as_ref()
                    .is_some_and(|a| params.check_set.contains(a))
            })
            .count();
        Some(checks as f64 / (span / 60.0))
    } else {
        None
    };
    let fixation_rate = if span > 0.0 {
        Some(fixations.len() as f64 / span)
    } else {
        None
    };
    let pupil_size_change = if pupil.n > 0.0 {
        let mean = pupil.sum / pupil.n;
        Some((pupil.sumsq / pupil.n - mean * mean).max(0.0).sqrt())
    } else {
        None
    };
    let driving_performance = if accel_n == 0 {
        None
    } else {
        let mean = accel_sum / accel_n as f64;
        if mean == 0.0 {
            Some(f64::INFINITY)
        } else {
            Some(1.0 / mean)
        }
    };

    Ok(TrialLedger {
        trial_id: trial.id(),
        fixations,
        p_f,
        p_r,
        p_fs,
        p_rs,
        p_g,
        cem_vi,
        cem_iq,
        sge,
        entropy_rate,
        check_rate,
        fixation_rate,
        pupil_size_change,
        driving_performance,
        srjsd_f,
        srjsd_fs,
    })
}

// -- scenario construction ------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// Uniform visits over all grid cells: maximal view-importance entropy.
    Balanced,
    /// Every fixation in one cell: zero view-importance entropy.
    Concentrated,
    /// Per-trial variation spanning the entropy range, mixed kinematics.
    Mixed,
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(Preset::Balanced),
            "concentrated" => Ok(Preset::Concentrated),
            "mixed" => Ok(Preset::Mixed),
            other => Err(Error::Config(format!("unknown preset {other:?}"))),
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Preset::Balanced => "balanced",
            Preset::Concentrated => "concentrated",
            Preset::Mixed => "mixed",
        })
    }
}

const GRID_N: usize = 5;
const CELL_STEP_DEG: f64 = 20.0;

fn cell_center(row: usize, col: usize) -> (f64, f64) {
    (
        -40.0 + CELL_STEP_DEG * col as f64,
        -40.0 + CELL_STEP_DEG * row as f64,
    )
}

/// Driving-flavored AOI for a grid cell: bottom row instruments, top row
/// periphery, side columns mirrors, center block road.
fn aoi_for_cell(row: usize, col: usize) -> &'static str {
    if row == 0 {
        "instrument"
    } else if row == GRID_N - 1 {
        "periphery"
    } else if col == 0 {
        "mirror_left"
    } else if col == GRID_N - 1 {
        "mirror_right"
    } else {
        "road"
    }
}

/// Builds one scripted fixation whose sweep stays well inside the default
/// 1-degree dispersion threshold.
#[allow(clippy::too_many_arguments)]
fn scripted_fixation(
    row: usize,
    col: usize,
    yaw_offset_deg: f64,
    duration: f64,
    sweep_deg: f64,
    depth: f64,
    radial_velocity: f64,
    rate: f64,
) -> FixationScript {
    let (yaw, pitch) = cell_center(row, col);
    let n = ((duration * rate).round() as usize).max(2);
    let span = (n - 1) as f64 / rate;
    // lateral velocity realizing the requested angular sweep at this depth
    let lateral_velocity = sweep_deg.to_radians() * depth / span;
    FixationScript {
        aoi: Some(aoi_for_cell(row, col).to_string()),
        cell: row * GRID_N + col,
        yaw_deg: yaw + yaw_offset_deg,
        pitch_deg: pitch,
        duration,
        lateral_velocity,
        radial_velocity,
        depth,
    }
}

fn default_pupil(rng: &mut ChaCha12Rng) -> PupilModel {
    PupilModel {
        mean_mm: rng.random_range(2.8..4.2),
        amplitude_mm: rng.random_range(0.1..0.6),
        waveform: Waveform::Sine {
            freq_hz: rng.random_range(0.08..0.3),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        },
    }
}

fn default_speed(rng: &mut ChaCha12Rng, total: f64) -> Vec<(f64, f64)> {
    // wander around the 40 km/h target; guarantee at least one real slope
    let mut knots = vec![(0.0, 11.11)];
    let mut t = 0.0;
    let mut v: f64 = 11.11;
    while t < total {
        t += rng.random_range(3.0..6.0);
        let dv = rng.random_range(0.3..1.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        v = (v + dv).clamp(8.0, 14.0);
        knots.push((t, v));
    }
    knots
}

/// Scenario for one trial of a preset. `trial_index` drives the structured
/// per-trial variation; `seed` the random one.
pub fn scenario_for(
    preset: Preset,
    trial_index: usize,
    participant_id: String,
    session_index: u32,
    seed: u64,
    jitter_deg: f64,
) -> Scenario {
    let rate = 90.0;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut schedule = Vec::new();

    match preset {
        Preset::Balanced => {
            // one fixation per cell, identical kinematics, seeded order
            let mut cells: Vec<(usize, usize)> = (0..GRID_N)
                .flat_map(|r| (0..GRID_N).map(move |c| (r, c)))
                .collect();
            for i in (1..cells.len()).rev() {
                let j = rng.random_range(0..=i);
                cells.swap(i, j);
            }
            for (row, col) in cells {
                schedule.push(Segment::Fixate(scripted_fixation(
                    row, col, 0.0, 0.3, 0.5, 4.0, 0.0, rate,
                )));
            }
        }
        Preset::Concentrated => {
            // all fixations in the center cell; alternate a small in-cell
            // base offset so consecutive clusters stay separable
            for i in 0..25 {
                let offset = if i % 2 == 0 { -4.0 } else { 4.0 };
                schedule.push(Segment::Fixate(scripted_fixation(
                    2, 2, offset, 0.3, 0.5, 4.0, 0.0, rate,
                )));
            }
        }
        Preset::Mixed => {
            let k_cells = 1 + trial_index % 25;
            let mut cells: Vec<(usize, usize)> = (0..GRID_N)
                .flat_map(|r| (0..GRID_N).map(move |c| (r, c)))
                .collect();
            for i in (1..cells.len()).rev() {
                let j = rng.random_range(0..=i);
                cells.swap(i, j);
            }
            cells.truncate(k_cells);

            let n_fix = rng.random_range(40..80);
            let mut prev_cell: Option<(usize, usize)> = None;
            let mut flip = false;
            for _ in 0..n_fix {
                let cell = cells[rng.random_range(0..cells.len())];
                // revisiting the same cell: offset the base direction so
                // the detector sees two clusters, not one
                let offset = if prev_cell == Some(cell) {
                    flip = !flip;
                    if flip {
                        4.0
                    } else {
                        -4.0
                    }
                } else {
                    flip = false;
                    0.0
                };
                let duration = rng.random_range(0.18..0.42);
                let sweep = rng.random_range(0.1..0.7);
                let depth = rng.random_range(2.0..9.0);
                let radial = if rng.random_bool(0.3) {
                    rng.random_range(-0.15..0.15)
                } else {
                    0.0
                };
                schedule.push(Segment::Fixate(scripted_fixation(
                    cell.0, cell.1, offset, duration, sweep, depth, radial, rate,
                )));
                if rng.random_bool(0.05) {
                    schedule.push(Segment::Blink {
                        duration: rng.random_range(0.08..0.15),
                    });
                }
                prev_cell = Some(cell);
            }
        }
    }

    let total: f64 = schedule
        .iter()
        .map(|s| match s {
            Segment::Fixate(f) => f.duration,
            Segment::Blink { duration } => *duration,
        })
        .sum();
    let pupil = default_pupil(&mut rng);
    let speed_knots = default_speed(&mut rng, total);
    Scenario {
        participant_id,
        session_index,
        seed: rng.random(),
        sample_rate_hz: rate,
        jitter_deg,
        schedule,
        pupil,
        speed_knots,
    }
}

/// Everything `make_corpus` produced.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub trial_paths: Vec<PathBuf>,
    pub ledger_path: PathBuf,
    pub ledgers: Vec<TrialLedger>,
}

const LEDGER_HEADER: [&str; 12] = [
    "trial_id",
    "cem_vi",
    "cem_iq",
    "sge",
    "entropy_rate",
    "check_rate",
    "fixation_rate",
    "pupil_size_change",
    "driving_performance",
    "srjsd_f",
    "srjsd_fs",
    "n_fixations",
];

fn ledger_csv(ledgers: &[TrialLedger]) -> String {
    let field = |v: &Option<f64>| -> String {
        match v {
            None => "NA".to_string(),
            Some(x) if x.is_infinite() => "inf".to_string(),
            Some(x) => fmt9(*x),
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(LEDGER_HEADER).expect("write header");
    for l in ledgers {
        w.write_record([
            l.trial_id.clone(),
            field(&l.cem_vi),
            field(&l.cem_iq),
            field(&l.sge),
            field(&l.entropy_rate),
            field(&l.check_rate),
            field(&l.fixation_rate),
            field(&l.pupil_size_change),
            field(&l.driving_performance),
            field(&l.srjsd_f),
            field(&l.srjsd_fs),
            l.fixations.len().to_string(),
        ])
        .expect("write record");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

/// Writes `n_trials` trials plus `ledger.csv` into `out_dir`. Bit-identical
/// across runs for the same arguments.
pub fn make_corpus(
    preset: Preset,
    n_trials: usize,
    seed: u64,
    jitter_deg: f64,
    out_dir: &Path,
    params: &MeasureParams,
) -> Result<Corpus> {
    fs::create_dir_all(out_dir)?;
    let mut master = ChaCha12Rng::seed_from_u64(seed);
    let mut trial_paths = Vec::with_capacity(n_trials);
    let mut ledgers = Vec::with_capacity(n_trials);
    for idx in 0..n_trials {
        let participant = format!("P{:02}", 1 + idx / 4);
        let session = 1 + (idx % 4) as u32;
        let trial_seed: u64 = master.random();
        let sc = scenario_for(
            preset,
            idx,
            participant.clone(),
            session,
            trial_seed,
            jitter_deg,
        );
        let (trial, ledger) = simulate_trial(&sc, params)?;
        let path = out_dir.join(format!("trial_{participant}_s{session}.jsonl"));
        crate::io::write_trial(&trial, &path)?;
        trial_paths.push(path);
        ledgers.push(ledger);
    }
    let ledger_path = out_dir.join("ledger.csv");
    fs::write(&ledger_path, ledger_csv(&ledgers))?;
    Ok(Corpus {
        trial_paths,
        ledger_path,
        ledgers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plain_scenario(schedule: Vec<Segment>) -> Scenario {
        Scenario {
            participant_id: "P01".into(),
            session_index: 1,
            seed: 42,
            sample_rate_hz: 90.0,
            jitter_deg: 0.0,
            schedule,
            pupil: PupilModel {
                mean_mm: 3.0,
                amplitude_mm: 0.0,
                waveform: Waveform::Constant,
            },
            speed_knots: vec![(0.0, 11.0), (60.0, 12.0)],
        }
    }

    #[test]
    fn static_fixation_books_zero_flow_and_importance() {
        let sc = plain_scenario(vec![Segment::Fixate(FixationScript {
            aoi: Some("road".into()),
            cell: 12,
            yaw_deg: 0.0,
            pitch_deg: 0.0,
            duration: 1.0,
            lateral_velocity: 0.0,
            radial_velocity: 0.0,
            depth: 2.0,
        })]);
        let (trial, ledger) = simulate_trial(&sc, &MeasureParams::default()).unwrap();
        assert_eq!(trial.samples.len(), 90);
        assert_eq!(ledger.fixations.len(), 1);
        assert_eq!(ledger.fixations[0].flow, 0.0);
        assert_eq!(ledger.fixations[0].importance, 0.0);
        assert_eq!(ledger.fixations[0].depth, 2.0);
        // no flow mass anywhere: the flow distribution is undefined
        assert!(ledger.srjsd_f.is_none());
    }

    #[test]
    fn three_degree_arc_books_its_angle() {
        let rate = 90.0f64;
        let duration = 0.3f64;
        let n = (duration * rate).round() as usize;
        let span = (n - 1) as f64 / rate;
        let depth = 2.0;
        let sc = plain_scenario(vec![Segment::Fixate(FixationScript {
            aoi: Some("road".into()),
            cell: 12,
            yaw_deg: 0.0,
            pitch_deg: 0.0,
            duration,
            lateral_velocity: 3.0f64.to_radians() * depth / span,
            radial_velocity: 0.0,
            depth,
        })]);
        let (_, ledger) = simulate_trial(&sc, &MeasureParams::default()).unwrap();
        let flow = ledger.fixations[0].flow;
        assert_relative_eq!(flow, 3.0f64.to_radians(), epsilon = 1e-9);
        assert!((flow - 0.05236).abs() < 1e-6);
    }

    #[test]
    fn preset_entropy_extremes() {
        let params = MeasureParams::default();
        let balanced = scenario_for(Preset::Balanced, 0, "P01".into(), 1, 9, 0.0);
        let (_, bl) = simulate_trial(&balanced, &params).unwrap();
        assert_relative_eq!(bl.cem_vi.unwrap(), 25f64.log2(), epsilon = 1e-9);

        let conc = scenario_for(Preset::Concentrated, 0, "P01".into(), 1, 9, 0.0);
        let (_, cl) = simulate_trial(&conc, &params).unwrap();
        assert_eq!(cl.cem_vi.unwrap(), 0.0);
    }

    #[test]
    fn infeasible_schedules_are_rejected() {
        let bad_depth = plain_scenario(vec![Segment::Fixate(FixationScript {
            aoi: None,
            cell: 12,
            yaw_deg: 0.0,
            pitch_deg: 0.0,
            duration: 0.3,
            lateral_velocity: 0.1,
            radial_velocity: 0.0,
            depth: -1.0,
        })]);
        assert!(matches!(
            simulate_trial(&bad_depth, &MeasureParams::default()),
            Err(Error::InfeasibleSchedule(_))
        ));

        let through_zero = plain_scenario(vec![Segment::Fixate(FixationScript {
            aoi: None,
            cell: 12,
            yaw_deg: 0.0,
            pitch_deg: 0.0,
            duration: 2.0,
            lateral_velocity: 0.1,
            radial_velocity: -2.0,
            depth: 1.0,
        })]);
        assert!(matches!(
            simulate_trial(&through_zero, &MeasureParams::default()),
            Err(Error::InfeasibleSchedule(_))
        ));
    }

    #[test]
    fn corpus_generation_is_byte_identical() {
        let params = MeasureParams::default();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let a = make_corpus(Preset::Mixed, 4, 7, 0.1, dir_a.path(), &params).unwrap();
        let b = make_corpus(Preset::Mixed, 4, 7, 0.1, dir_b.path(), &params).unwrap();
        assert_eq!(a.trial_paths.len(), 4);
        for (pa, pb) in a.trial_paths.iter().zip(&b.trial_paths) {
            assert_eq!(std::fs::read(pa).unwrap(), std::fs::read(pb).unwrap());
        }
        assert_eq!(
            std::fs::read(&a.ledger_path).unwrap(),
            std::fs::read(&b.ledger_path).unwrap()
        );
    }

    #[test]
    fn empty_corpus_is_valid() {
        let dir = tempfile::tempdir().unwrap();
        let c = make_corpus(
            Preset::Mixed,
            0,
            1,
            0.0,
            dir.path(),
            &MeasureParams::default(),
        )
        .unwrap();
        assert!(c.trial_paths.is_empty());
        let text = std::fs::read_to_string(&c.ledger_path).unwrap();
        assert!(text.starts_with("trial_id,"));
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn mixed_preset_spans_the_entropy_range() {
        let params = MeasureParams::default();
        let dir = tempfile::tempdir().unwrap();
        let corpus = make_corpus(Preset::Mixed, 56, 7, 0.0, dir.path(), &params).unwrap();
        let values: Vec<f64> = corpus
            .ledgers
            .iter()
            .filter_map(|l| l.cem_vi)
            .collect();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo >= 2.0, "span = {}", hi - lo);
    }
}
