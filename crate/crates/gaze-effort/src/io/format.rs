//! Gaze log format: one JSON object per line. The first line is a header
//! carrying the schema tag, participant, session, and free-form metadata;
//! every following line is one sample. Unknown fields are tolerated.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::model::{GazeSample, Trial, UNIT_DIR_TOL};

pub const SCHEMA: &str = "gaze/1";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    schema: String,
    participant: String,
    session: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct RawSample {
    t: f64,
    dir: [f64; 3],
    hit: [f64; 3],
    #[serde(default)]
    depth: Option<f64>,
    #[serde(default)]
    pupil: Option<f64>,
    #[serde(default)]
    aoi: Option<String>,
    #[serde(default)]
    speed: Option<f64>,
    valid: bool,
}

/// Serializes a trial's header and raw samples. Detected fixations are a
/// pipeline product and are not part of the log format.
pub fn trial_to_jsonl(trial: &Trial) -> String {
    let header = Header {
        schema: SCHEMA.to_string(),
        participant: trial.participant_id.clone(),
        session: trial.session_index,
        metadata: trial.metadata.clone(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for s in &trial.samples {
        out.push_str(&serde_json::to_string(s).expect("sample serializes"));
        out.push('\n');
    }
    out
}

pub fn write_trial(trial: &Trial, path: &Path) -> Result<()> {
    fs::write(path, trial_to_jsonl(trial))?;
    Ok(())
}

fn parse_err(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Parses a gaze log. Malformed lines are rejected with the 1-based line
/// number; a sample whose direction is not unit length is a parse error.
pub fn parse_trial_str(content: &str, path_label: &str) -> Result<Trial> {
    let mut lines = content.lines().enumerate();
    let (_, header_line) = lines
        .next()
        .ok_or_else(|| parse_err(path_label, 1, "empty file"))?;
    let header: Header = serde_json::from_str(header_line)
        .map_err(|e| parse_err(path_label, 1, format!("bad header: {e}")))?;
    if header.schema != SCHEMA {
        return Err(Error::SchemaVersion {
            expected: SCHEMA.to_string(),
            found: header.schema,
        });
    }

    let mut samples = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawSample = serde_json::from_str(line)
            .map_err(|e| parse_err(path_label, i + 1, e.to_string()))?;
        let dir = Vec3::from(raw.dir);
        let norm = dir.norm();
        if (norm - 1.0).abs() > UNIT_DIR_TOL {
            return Err(parse_err(
                path_label,
                i + 1,
                format!("|dir| = {norm:.9}, expected a unit vector"),
            ));
        }
        let hit = Vec3::from(raw.hit);
        let depth = raw.depth.unwrap_or_else(|| hit.norm());
        if depth < 0.0 {
            return Err(parse_err(path_label, i + 1, format!("negative depth {depth}")));
        }
        samples.push(GazeSample {
            t: raw.t,
            dir,
            hit,
            depth,
            pupil: raw.pupil,
            aoi: raw.aoi,
            speed: raw.speed,
            valid: raw.valid,
        });
    }
    Ok(Trial {
        participant_id: header.participant,
        session_index: header.session,
        samples,
        fixations: Vec::new(),
        metadata: header.metadata,
    })
}

pub fn parse_trial(path: &Path) -> Result<Trial> {
    let content = fs::read_to_string(path)?;
    parse_trial_str(&content, &path.display().to_string())
}
