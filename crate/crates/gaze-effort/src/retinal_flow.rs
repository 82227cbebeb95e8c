//! Fixation-induced retinal flow and observation importance.
//!
//! During a fixation the fixated point may move relative to the observer.
//! The angular travel of the gaze direction, integrated over the fixation's
//! member samples and expressed as an arc about the observer at the
//! fixation depth, quantifies the perceived visual motion: `flow = arc_len /
//! depth`. Importance relates that flow to the stimulus displacement:
//! `importance = flow / |displacement|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::model::{GazeSample, GridSpec, Trial};

/// Displacement below which a stimulus counts as static and importance is
/// defined as zero.
pub const DISPLACEMENT_EPS: f64 = 1e-6;

/// How the trajectory length of the circular motion is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ArcMode {
    /// Sum of angular steps between consecutive member samples (path
    /// integration; robust to curved pursuit).
    #[default]
    Path,
    /// Single chord between the first and last member directions;
    /// kept for sensitivity analysis.
    Endpoint,
}

impl std::str::FromStr for ArcMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path" => Ok(ArcMode::Path),
            "endpoint" => Ok(ArcMode::Endpoint),
            other => Err(Error::Config(format!("unknown arc mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for ArcMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ArcMode::Path => "path",
            ArcMode::Endpoint => "endpoint",
        })
    }
}

/// Relative motion of the fixated point over the fixation: last hit minus
/// first hit, in the observer frame.
pub fn displacement(members: &[&GazeSample]) -> Result<(Vec3, f64)> {
    if members.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: members.len(),
        });
    }
    let u = members[members.len() - 1].hit - members[0].hit;
    Ok((u, u.norm()))
}

/// Arc length and retinal flow of a fixation, from its member samples.
///
/// Returns `(arc_len, flow)` where `arc_len` is the trajectory length in
/// meters of the circular motion about the observer at depth `rho`, and
/// `flow = arc_len / rho` is the summed angular travel in radians.
pub fn retinal_flow(rho: f64, members: &[&GazeSample], mode: ArcMode) -> Result<(f64, f64)> {
    if rho <= 0.0 {
        return Err(Error::ZeroDepth(rho));
    }
    if members.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: members.len(),
        });
    }
    let angle = match mode {
        ArcMode::Path => members
            .windows(2)
            .map(|w| w[0].dir.angle_to(w[1].dir))
            .sum::<f64>(),
        ArcMode::Endpoint => members[0].dir.angle_to(members[members.len() - 1].dir),
    };
    Ok((angle * rho, angle))
}

/// Observation importance: retinal flow per unit stimulus displacement,
/// radians/meter. Zero when the stimulus is static.
pub fn observation_importance(flow: f64, displacement_mag: f64) -> f64 {
    if displacement_mag < DISPLACEMENT_EPS {
        0.0
    } else {
        flow / displacement_mag
    }
}

/// Runs the geometry pass over every detected fixation of a trial: fills
/// `displacement`, `arc_len`, `flow`, `importance`, and the grid `cell`.
pub fn enrich_fixations(trial: &mut Trial, grid: &GridSpec, mode: ArcMode) -> Result<()> {
    let samples = std::mem::take(&mut trial.samples);
    let result = (|| {
        for fix in &mut trial.fixations {
            let members: Vec<&GazeSample> = samples[fix.first_sample..=fix.last_sample]
                .iter()
                .filter(|s| s.valid)
                .collect();
            let (u, u_mag) = displacement(&members)?;
            let (arc_len, flow) = retinal_flow(fix.depth, &members, mode)?;
            fix.displacement = u;
            fix.displacement_mag = u_mag;
            fix.arc_len = arc_len;
            fix.flow = flow;
            fix.importance = observation_importance(flow, u_mag);
            fix.cell = crate::distributions::grid_cell(fix.centroid_dir, grid);
        }
        Ok(())
    })();
    trial.samples = samples;
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn member(t: f64, dir: Vec3, hit: Vec3, depth: f64) -> GazeSample {
        GazeSample {
            t,
            dir,
            hit,
            depth,
            pupil: None,
            aoi: None,
            speed: None,
            valid: true,
        }
    }

    /// Samples tracking a point moving on a straight lateral line at depth
    /// `rho`: hit(t) = (v*t, 0, rho).
    fn lateral_track(v: f64, rho: f64, t_end: f64, n: usize) -> Vec<GazeSample> {
        (0..n)
            .map(|k| {
                let t = t_end * k as f64 / (n - 1) as f64;
                let hit = Vec3::new(v * t, 0.0, rho);
                let dir = hit.normalized().unwrap();
                member(t, dir, hit, hit.norm())
            })
            .collect()
    }

    /// Samples tracking a point sweeping a circular arc about the observer
    /// at constant depth.
    fn arc_track(sweep_deg: f64, rho: f64, n: usize) -> Vec<GazeSample> {
        let axis = Vec3::new(0.0, 1.0, 0.0);
        let start = Vec3::new(0.0, 0.0, 1.0);
        (0..n)
            .map(|k| {
                let theta = sweep_deg.to_radians() * k as f64 / (n - 1) as f64;
                let dir = start.rotate_about(axis, theta);
                member(k as f64 / 90.0, dir, dir.scale(rho), rho)
            })
            .collect()
    }

    #[test]
    fn static_stimulus_has_zero_displacement() {
        let hit = Vec3::new(0.0, 0.0, 2.0);
        let dir = Vec3::new(0.0, 0.0, 1.0);
        let ms = [member(0.0, dir, hit, 2.0), member(0.3, dir, hit, 2.0)];
        let refs: Vec<&GazeSample> = ms.iter().collect();
        let (u, u_mag) = displacement(&refs).unwrap();
        assert_eq!(u, Vec3::ZERO);
        assert_eq!(u_mag, 0.0);
    }

    #[test]
    fn displacement_is_endpoint_difference() {
        let dir = Vec3::new(0.0, 0.0, 1.0);
        let ms = [member(0.0, dir, Vec3::new(0.0, 0.0, 2.0), 2.0),
            member(0.3, dir, Vec3::new(0.2, 0.0, 2.0), 2.0)];
        let refs: Vec<&GazeSample> = ms.iter().collect();
        let (_, u_mag) = displacement(&refs).unwrap();
        assert_relative_eq!(u_mag, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn constant_velocity_displacement_matches_kinematics() {
        // v = 0.5 m/s lateral for 0.3 s -> |u| = 0.15
        let ms = lateral_track(0.5, 2.0, 0.3, 28);
        let refs: Vec<&GazeSample> = ms.iter().collect();
        let (_, u_mag) = displacement(&refs).unwrap();
        assert_relative_eq!(u_mag, 0.15, epsilon = 1e-9);
    }

    #[test]
    fn too_few_members_is_an_error() {
        let dir = Vec3::new(0.0, 0.0, 1.0);
        let ms = [member(0.0, dir, dir.scale(2.0), 2.0)];
        let refs: Vec<&GazeSample> = ms.iter().collect();
        assert!(matches!(
            displacement(&refs),
            Err(Error::InsufficientSamples { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn no_angular_travel_means_zero_flow() {
        let dir = Vec3::new(0.0, 0.0, 1.0);
        let ms = [member(0.0, dir, dir.scale(2.0), 2.0),
            member(0.1, dir, dir.scale(2.0), 2.0)];
        let refs: Vec<&GazeSample> = ms.iter().collect();
        let (m, flow) = retinal_flow(2.0, &refs, ArcMode::Path).unwrap();
        assert_eq!(m, 0.0);
        assert_eq!(flow, 0.0);
    }

    #[test]
    fn flow_is_arc_over_depth() {
        // arc of 0.1 m at rho = 2 m -> 0.05 rad
        let sweep = (0.1f64 / 2.0).to_degrees();
        let ms = arc_track(sweep, 2.0, 20);
        let refs: Vec<&GazeSample> = ms.iter().collect();
        let (m, flow) = retinal_flow(2.0, &refs, ArcMode::Path).unwrap();
        assert_relative_eq!(m, 0.1, max_relative = 1e-12);
        assert_relative_eq!(flow, 0.05, max_relative = 1e-12);
    }

    #[test]
    fn scripted_arc_flow_is_depth_independent() {
        let expected = 3.0f64.to_radians();
        for rho in [0.5, 2.0, 7.0] {
            let ms = arc_track(3.0, rho, 30);
            let refs: Vec<&GazeSample> = ms.iter().collect();
            let (_, flow) = retinal_flow(rho, &refs, ArcMode::Path).unwrap();
            assert_relative_eq!(flow, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn zero_depth_is_an_error() {
        let ms = arc_track(1.0, 2.0, 5);
        let refs: Vec<&GazeSample> = ms.iter().collect();
        assert!(matches!(
            retinal_flow(0.0, &refs, ArcMode::Path),
            Err(Error::ZeroDepth(_))
        ));
    }

    #[test]
    fn endpoint_mode_underestimates_curved_paths() {
        // A 20-degree sweep out and back: path sums both legs, the
        // endpoint chord sees almost nothing.
        let mut ms = arc_track(20.0, 2.0, 10);
        let mut back = arc_track(20.0, 2.0, 10);
        back.reverse();
        for (k, s) in back.iter_mut().enumerate() {
            s.t = ms.last().unwrap().t + (k + 1) as f64 / 90.0;
        }
        ms.extend(back);
        let refs: Vec<&GazeSample> = ms.iter().collect();
        let (_, path) = retinal_flow(2.0, &refs, ArcMode::Path).unwrap();
        let (_, chord) = retinal_flow(2.0, &refs, ArcMode::Endpoint).unwrap();
        assert!(path > 0.6);
        assert!(chord < 0.02);
    }

    #[test]
    fn importance_arithmetic_and_static_case() {
        assert_relative_eq!(observation_importance(0.05, 0.2), 0.25);
        assert_eq!(observation_importance(0.0, 0.0), 0.0);
        assert_eq!(observation_importance(1e-9, 1e-9), 0.0); // below eps
    }

    #[test]
    fn tangential_importance_approaches_inverse_depth() {
        // Pure tangential motion: |u| is the chord of the swept arc, so
        // importance -> 1/rho for small sweeps.
        for rho in [1.0, 2.0, 5.0] {
            let ms = arc_track(0.5, rho, 30);
            let refs: Vec<&GazeSample> = ms.iter().collect();
            let (_, flow) = retinal_flow(rho, &refs, ArcMode::Path).unwrap();
            let (_, u_mag) = displacement(&refs).unwrap();
            let j = observation_importance(flow, u_mag);
            assert_relative_eq!(j, 1.0 / rho, max_relative = 1e-4);
        }
    }

    #[test]
    fn radial_motion_has_zero_flow_and_importance() {
        let dir = Vec3::new(0.0, 0.0, 1.0);
        let ms: Vec<GazeSample> = (0..20)
            .map(|k| {
                let depth = 2.0 + 0.05 * k as f64;
                member(k as f64 / 90.0, dir, dir.scale(depth), depth)
            })
            .collect();
        let refs: Vec<&GazeSample> = ms.iter().collect();
        let rho = refs.iter().map(|s| s.depth).sum::<f64>() / refs.len() as f64;
        let (_, flow) = retinal_flow(rho, &refs, ArcMode::Path).unwrap();
        let (_, u_mag) = displacement(&refs).unwrap();
        assert_eq!(flow, 0.0);
        assert!(u_mag > 0.9);
        assert_eq!(observation_importance(flow, u_mag), 0.0);
    }

    #[test]
    fn flow_is_scale_invariant() {
        let ms = lateral_track(0.3, 2.0, 0.3, 28);
        let refs: Vec<&GazeSample> = ms.iter().collect();
        let rho = refs.iter().map(|s| s.depth).sum::<f64>() / refs.len() as f64;
        let (_, flow) = retinal_flow(rho, &refs, ArcMode::Path).unwrap();

        let scaled: Vec<GazeSample> = ms
            .iter()
            .map(|s| GazeSample {
                hit: s.hit.scale(3.5),
                depth: s.depth * 3.5,
                ..s.clone()
            })
            .collect();
        let srefs: Vec<&GazeSample> = scaled.iter().collect();
        let srho = srefs.iter().map(|s| s.depth).sum::<f64>() / srefs.len() as f64;
        let (_, sflow) = retinal_flow(srho, &srefs, ArcMode::Path).unwrap();
        assert_relative_eq!(flow, sflow, max_relative = 1e-12);
    }
}
