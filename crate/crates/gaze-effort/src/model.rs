//! Domain types shared by the whole pipeline: raw samples, fixations,
//! trials, the viewing-plane grid, and finite probability distributions.
//!
//! All types are immutable after construction and safe to share across
//! threads; per-trial computations never mutate shared state.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Tolerance for |dir| = 1 checks on raw samples.
pub const UNIT_DIR_TOL: f64 = 1e-6;
/// Tolerance for probability masses summing to one.
pub const MASS_SUM_TOL: f64 = 1e-9;

/// One eye-tracker frame.
///
/// `hit` is the fixated-point position relative to the observer; `depth`
/// defaults to `|hit|` when the log omits it. Samples with `valid = false`
/// (blinks, tracking loss) stay in the stream but are excluded from pupil
/// statistics and fixation detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    /// Time in seconds, strictly increasing within a trial.
    pub t: f64,
    /// Unit gaze direction in the observer frame.
    pub dir: Vec3,
    /// Fixated-point position in meters, observer frame.
    pub hit: Vec3,
    /// Viewing-direction distance to the fixated stimulus, meters.
    pub depth: f64,
    /// Pupil diameter in millimeters; meaningful only when > 0 and valid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pupil: Option<f64>,
    /// Area-of-interest label, when the log provides one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aoi: Option<String>,
    /// Vehicle speed in meters/second, when the log provides telemetry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    pub valid: bool,
}

impl GazeSample {
    /// True when the sample carries a usable pupil reading.
    pub fn pupil_valid(&self) -> bool {
        self.valid && self.pupil.is_some_and(|p| p > 0.0)
    }
}

/// A detected fixation.
///
/// The detector fills the timing fields (`start`..`aoi`); the retinal-flow
/// pass fills the geometry fields (`displacement`..`importance`) and the
/// grid pass fills `cell`. Geometry fields are zero until those passes run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixation {
    /// Ordinal within the trial.
    pub index: usize,
    /// Start time, seconds (time of the first member sample).
    pub start: f64,
    /// End time, seconds (time of the last member sample).
    pub end: f64,
    /// Duration in seconds, `end - start`.
    pub duration: f64,
    /// Normalized mean gaze direction over member samples.
    pub centroid_dir: Vec3,
    /// Mean member depth, meters.
    pub depth: f64,
    /// Relative motion of the fixated point over the fixation, meters.
    pub displacement: Vec3,
    /// `|displacement|`, meters.
    pub displacement_mag: f64,
    /// Path-integrated trajectory length of the circular motion about the
    /// observer, meters.
    pub arc_len: f64,
    /// Fixation-induced retinal flow, radians: `arc_len / depth`.
    pub flow: f64,
    /// Observation importance, radians/meter: `flow / displacement_mag`
    /// (zero for a static stimulus).
    pub importance: f64,
    /// Modal AOI over member samples, ties broken by earliest-seen label.
    pub aoi: Option<String>,
    /// Row-major viewing-plane grid cell of `centroid_dir`.
    pub cell: usize,
    /// Raw index of the first member sample in the trial's sample list.
    pub first_sample: usize,
    /// Raw index of the last member sample (inclusive).
    pub last_sample: usize,
}

/// One recorded session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub participant_id: String,
    pub session_index: u32,
    pub samples: Vec<GazeSample>,
    #[serde(default)]
    pub fixations: Vec<Fixation>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl Trial {
    pub fn id(&self) -> String {
        format!("{}_s{}", self.participant_id, self.session_index)
    }

    /// Time span of the sample stream, seconds.
    pub fn span(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    /// Member samples of a fixation: valid samples within its raw index range.
    pub fn members(&self, fix: &Fixation) -> Vec<&GazeSample> {
        self.samples[fix.first_sample..=fix.last_sample]
            .iter()
            .filter(|s| s.valid)
            .collect()
    }
}

/// Discretization of the forward visual field into `n x n` angular cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Cells per axis.
    pub n: usize,
    /// Viewing-plane half field, degrees; cells tile [-half, +half] per axis.
    pub half_angle_deg: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: 5,
            half_angle_deg: 50.0,
        }
    }
}

impl GridSpec {
    pub fn cells(&self) -> usize {
        self.n * self.n
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("grid.n_g must be >= 2, got {}", self.n)));
        }
        if !(self.half_angle_deg > 0.0 && self.half_angle_deg < 90.0) {
            return Err(Error::Config(format!(
                "grid.half_angle_deg must be in (0, 90), got {}",
                self.half_angle_deg
            )));
        }
        Ok(())
    }
}

/// A finite probability mass function over an ordered, labeled support.
///
/// Constructors normalize the given weights; the mass vector always sums to
/// one within [`MASS_SUM_TOL`] and every entry is nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution<L> {
    support: Vec<L>,
    mass: Vec<f64>,
}

impl<L: Ord + Clone> Distribution<L> {
    /// Build from nonnegative weights keyed by label; weights are normalized
    /// by their total. The support is the map's (sorted) key order.
    pub fn from_weights(weights: &BTreeMap<L, f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut total = 0.0;
        for &w in weights.values() {
            if w < 0.0 || w.is_nan() {
                return Err(Error::InvalidDistribution(format!(
                    "negative or NaN weight {w}"
                )));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("zero total weight".into()));
        }
        let support: Vec<L> = weights.keys().cloned().collect();
        let mass: Vec<f64> = weights.values().map(|&w| w / total).collect();
        let d = Distribution { support, mass };
        d.check();
        Ok(d)
    }

    /// Build from occurrence counts.
    pub fn from_counts(counts: &BTreeMap<L, u64>) -> Result<Self> {
        let weights: BTreeMap<L, f64> = counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64))
            .collect();
        Self::from_weights(&weights)
    }

    pub fn support(&self) -> &[L] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Mass at a label, or `None` when it is not in the support.
    pub fn get(&self, label: &L) -> Option<f64> {
        self.support
            .binary_search(label)
            .ok()
            .map(|i| self.mass[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, f64)> {
        self.support.iter().zip(self.mass.iter().copied())
    }

    pub fn same_support(&self, other: &Self) -> bool {
        self.support == other.support
    }

    fn check(&self) {
        let sum: f64 = self.mass.iter().sum();
        debug_assert!(
            (sum - 1.0).abs() <= MASS_SUM_TOL,
            "mass sums to {sum}, not 1"
        );
        debug_assert!(self.mass.iter().all(|&m| m >= 0.0));
    }
}

/// One invariant violation found by [`validate_trial`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Sample index the violation names, when sample-scoped.
    pub sample: Option<usize>,
    pub rule: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.sample {
            Some(i) => write!(f, "sample {}: {}", i, self.rule),
            None => write!(f, "{}", self.rule),
        }
    }
}

/// Diagnostic scan of every type invariant on a parsed trial.
/// Returns an empty list iff the trial is well-formed.
pub fn validate_trial(trial: &Trial) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut prev_t = f64::NEG_INFINITY;
    for (i, s) in trial.samples.iter().enumerate() {
        let n = s.dir.norm();
        if (n - 1.0).abs() > UNIT_DIR_TOL {
            out.push(Violation {
                sample: Some(i),
                rule: format!("|dir| = {n:.9}, expected 1 within {UNIT_DIR_TOL}"),
            });
        }
        if s.depth < 0.0 || s.depth.is_nan() {
            out.push(Violation {
                sample: Some(i),
                rule: format!("depth = {}, expected >= 0", s.depth),
            });
        }
        if s.t <= prev_t {
            out.push(Violation {
                sample: Some(i),
                rule: format!("t = {} does not increase past {}", s.t, prev_t),
            });
        }
        prev_t = s.t;
    }

    let (t0, t1) = match (trial.samples.first(), trial.samples.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => (0.0, 0.0),
    };
    let mut prev_end = f64::NEG_INFINITY;
    for f in &trial.fixations {
        if f.duration <= 0.0 || f.duration.is_nan() {
            out.push(Violation {
                sample: None,
                rule: format!("fixation {}: duration {} <= 0", f.index, f.duration),
            });
        }
        if f.start < prev_end {
            out.push(Violation {
                sample: None,
                rule: format!("fixation {} overlaps the previous one", f.index),
            });
        }
        if f.start < t0 || f.end > t1 {
            out.push(Violation {
                sample: None,
                rule: format!(
                    "fixation {}: [{}, {}] outside sample range [{}, {}]",
                    f.index, f.start, f.end, t0, t1
                ),
            });
        }
        if f.depth > 0.0 {
            let recomputed = f.arc_len / f.depth;
            let scale = f.flow.abs().max(1e-12);
            if (f.flow - recomputed).abs() / scale > 1e-12 {
                out.push(Violation {
                    sample: None,
                    rule: format!(
                        "fixation {}: flow {} != arc_len/depth {}",
                        f.index, f.flow, recomputed
                    ),
                });
            }
        }
        prev_end = f.end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64, dir: Vec3) -> GazeSample {
        GazeSample {
            t,
            dir,
            hit: dir.scale(2.0),
            depth: 2.0,
            pupil: Some(3.0),
            aoi: None,
            speed: None,
            valid: true,
        }
    }

    #[test]
    fn valid_trial_has_no_violations() {
        let trial = Trial {
            participant_id: "P01".into(),
            session_index: 1,
            samples: (0..10)
                .map(|i| sample(i as f64 / 90.0, Vec3::new(0.0, 0.0, 1.0)))
                .collect(),
            fixations: vec![],
            metadata: BTreeMap::new(),
        };
        assert!(validate_trial(&trial).is_empty());
    }

    #[test]
    fn non_unit_dir_names_the_sample() {
        let mut samples: Vec<GazeSample> = (0..3)
            .map(|i| sample(i as f64 / 90.0, Vec3::new(0.0, 0.0, 1.0)))
            .collect();
        samples[1].dir = Vec3::new(0.0, 0.0, 0.5);
        let trial = Trial {
            participant_id: "P01".into(),
            session_index: 1,
            samples,
            fixations: vec![],
            metadata: BTreeMap::new(),
        };
        let v = validate_trial(&trial);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].sample, Some(1));
        assert!(v[0].rule.contains("|dir|"));
    }

    #[test]
    fn non_monotone_time_is_flagged() {
        let mut samples: Vec<GazeSample> = (0..3)
            .map(|i| sample(i as f64 / 90.0, Vec3::new(0.0, 0.0, 1.0)))
            .collect();
        samples[2].t = samples[1].t;
        let trial = Trial {
            participant_id: "P01".into(),
            session_index: 1,
            samples,
            fixations: vec![],
            metadata: BTreeMap::new(),
        };
        let v = validate_trial(&trial);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].sample, Some(2));
    }

    #[test]
    fn distribution_normalizes_and_rejects_bad_weights() {
        let mut w = BTreeMap::new();
        w.insert("road", 3.0);
        w.insert("mirror", 1.0);
        let d = Distribution::from_weights(&w).unwrap();
        assert_eq!(d.get(&"road"), Some(0.75));
        assert_eq!(d.get(&"mirror"), Some(0.25));
        assert!((d.mass().iter().sum::<f64>() - 1.0).abs() <= MASS_SUM_TOL);

        let mut neg = BTreeMap::new();
        neg.insert("a", -1.0);
        assert!(Distribution::from_weights(&neg).is_err());
        let empty: BTreeMap<&str, f64> = BTreeMap::new();
        assert!(Distribution::from_weights(&empty).is_err());
    }
}
