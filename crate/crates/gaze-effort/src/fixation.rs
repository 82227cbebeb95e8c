//! Dispersion-threshold fixation detection (I-DT) over 90 Hz gaze streams,
//! and the fixation rate.
//!
//! Angular dispersion of a candidate window is the maximum pairwise angle
//! between member gaze directions. Invalid samples (blinks) are tolerated
//! inside a fixation up to `max_gap` consecutive samples; they are never
//! members.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::model::{Fixation, GazeSample, Trial};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Maximum angular spread of a fixation, degrees.
    pub dispersion_deg: f64,
    /// Minimum fixation duration, seconds.
    pub min_duration: f64,
    /// Consecutive invalid samples tolerated inside a fixation.
    pub max_gap: usize,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            dispersion_deg: 1.0,
            min_duration: 0.1,
            max_gap: 3,
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        if self.dispersion_deg <= 0.0 || self.dispersion_deg.is_nan() {
            return Err(Error::Config(format!(
                "detector.dispersion_deg must be > 0, got {}",
                self.dispersion_deg
            )));
        }
        if self.min_duration <= 0.0 || self.min_duration.is_nan() {
            return Err(Error::Config(format!(
                "detector min duration must be > 0, got {}",
                self.min_duration
            )));
        }
        Ok(())
    }
}

/// Window of member directions with an incrementally maintained
/// maximum pairwise angle.
struct Window {
    dirs: Vec<Vec3>,
    max_angle: f64,
}

impl Window {
    fn new(first: Vec3) -> Self {
        Window {
            dirs: vec![first],
            max_angle: 0.0,
        }
    }

    fn push(&mut self, d: Vec3) {
        for m in &self.dirs {
            self.max_angle = self.max_angle.max(m.angle_to(d));
        }
        self.dirs.push(d);
    }

    /// Dispersion the window would have with `d` added.
    fn peek(&self, d: Vec3) -> f64 {
        let mut max = self.max_angle;
        for m in &self.dirs {
            max = max.max(m.angle_to(d));
        }
        max
    }
}

/// Detects fixations in a time-ordered sample stream.
///
/// Returned fixations are non-overlapping and time-ordered; each spans at
/// least `min_duration` and stays within `dispersion_deg` of angular spread.
/// Geometry fields (`displacement`, `flow`, `importance`, `cell`) are left
/// zero for the later pipeline passes.
pub fn detect_fixations(samples: &[GazeSample], params: &DetectorParams) -> Result<Vec<Fixation>> {
    params.validate()?;
    let valid: Vec<usize> = samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.valid)
        .map(|(i, _)| i)
        .collect();
    if valid.is_empty() {
        return Err(Error::EmptyInput);
    }

    let threshold = params.dispersion_deg.to_radians();
    // invalid samples strictly between consecutive valid ones
    let gap_after = |k: usize| valid[k + 1] - valid[k] - 1;

    let mut out: Vec<Fixation> = Vec::new();
    let mut i = 0usize;
    'outer: while i < valid.len() {
        // Grow an initial window until it spans min_duration.
        let mut j = i;
        let mut win = Window::new(samples[valid[i]].dir);
        while samples[valid[j]].t - samples[valid[i]].t < params.min_duration {
            if j + 1 >= valid.len() {
                break 'outer;
            }
            if gap_after(j) > params.max_gap {
                // No window starting before this gap can span it.
                i = j + 1;
                continue 'outer;
            }
            j += 1;
            win.push(samples[valid[j]].dir);
        }

        if win.max_angle <= threshold {
            // Accept and extend while the dispersion bound holds.
            while j + 1 < valid.len()
                && gap_after(j) <= params.max_gap
                && win.peek(samples[valid[j + 1]].dir) <= threshold
            {
                j += 1;
                win.push(samples[valid[j]].dir);
            }
            out.push(build_fixation(samples, &valid[i..=j], out.len()));
            i = j + 1;
        } else {
            i += 1;
        }
    }
    Ok(out)
}

fn build_fixation(samples: &[GazeSample], member_idx: &[usize], index: usize) -> Fixation {
    let first = member_idx[0];
    let last = *member_idx.last().unwrap();
    let mut dir_sum = Vec3::ZERO;
    let mut depth_sum = 0.0;
    // modal AOI, ties broken by earliest first appearance
    let mut counts: Vec<(String, usize, usize)> = Vec::new(); // (label, count, first_seen)
    for (seen, &k) in member_idx.iter().enumerate() {
        let s = &samples[k];
        dir_sum = dir_sum + s.dir;
        depth_sum += s.depth;
        if let Some(label) = &s.aoi {
            match counts.iter_mut().find(|(l, _, _)| l == label) {
                Some(e) => e.1 += 1,
                None => counts.push((label.clone(), 1, seen)),
            }
        }
    }
    let aoi = counts
        .iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
        .map(|(l, _, _)| l.clone());

    Fixation {
        index,
        start: samples[first].t,
        end: samples[last].t,
        duration: samples[last].t - samples[first].t,
        centroid_dir: dir_sum.normalized().expect("member dirs sum to zero"),
        depth: depth_sum / member_idx.len() as f64,
        displacement: Vec3::ZERO,
        displacement_mag: 0.0,
        arc_len: 0.0,
        flow: 0.0,
        importance: 0.0,
        aoi,
        cell: 0,
        first_sample: first,
        last_sample: last,
    }
}

/// Fixations per second over the trial's sample span.
pub fn fixation_rate(trial: &Trial) -> Result<f64> {
    let span = trial.span();
    if span <= 0.0 {
        return Err(Error::DegenerateDuration(span));
    }
    Ok(trial.fixations.len() as f64 / span)
}
