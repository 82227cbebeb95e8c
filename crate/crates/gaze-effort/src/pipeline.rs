//! End-to-end processing: parse, detect, enrich, measure, correlate.
//! Trials are independent and processed on a bounded worker pool; the
//! `GAZE_EFFORT_THREADS` environment variable caps its size.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fixation;
use crate::io::{self, Config};
use crate::measures::{self, MetricsRow};
use crate::model::Trial;
use crate::retinal_flow;
use crate::stats::{self, CorrelationReport};

pub const THREADS_ENV: &str = "GAZE_EFFORT_THREADS";

/// Detects and enriches fixations in place, then computes the metrics row.
pub fn process_trial(trial: &mut Trial, config: &Config) -> Result<MetricsRow> {
    trial.fixations = fixation::detect_fixations(&trial.samples, &config.detector)?;
    retinal_flow::enrich_fixations(trial, &config.measures.grid, config.arc_mode)?;
    Ok(measures::metrics_row(trial, &config.measures))
}

/// Everything one pipeline run produced.
#[derive(Debug)]
pub struct PipelineOutput {
    pub rows: Vec<MetricsRow>,
    /// None when there were too few complete rows to correlate.
    pub report: Option<CorrelationReport>,
    /// Per-file failures the run continued past (empty under --strict).
    pub failures: Vec<(PathBuf, String)>,
    /// Why the correlation step was skipped, when it was.
    pub report_note: Option<String>,
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV}={value:?} is not a thread count")))?;
        if n > 0 {
            builder = builder.num_threads(n);
        }
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Runs the full pipeline over a set of trial files. Under `strict`, the
/// first per-trial failure aborts the run; otherwise failures are recorded
/// and processing continues.
pub fn run_pipeline(paths: &[PathBuf], config: &Config, strict: bool) -> Result<PipelineOutput> {
    if paths.is_empty() {
        return Err(Error::EmptyInput);
    }
    config.validate()?;

    let pool = worker_pool()?;
    let results: Vec<(PathBuf, Result<MetricsRow>)> = pool.install(|| {
        paths
            .par_iter()
            .map(|path| {
                let row = io::parse_trial(path)
                    .and_then(|mut trial| process_trial(&mut trial, config));
                (path.clone(), row)
            })
            .collect()
    });

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (path, res) in results {
        match res {
            Ok(row) => rows.push(row),
            Err(e) if strict => return Err(e),
            Err(e) => failures.push((path, e.to_string())),
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }

    let (report, report_note) = match stats::correlation_table(&rows, &config.alpha_levels) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(PipelineOutput {
        rows,
        report,
        failures,
        report_note,
    })
}

/// Output paths written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub metrics_csv: PathBuf,
    pub report_csv: Option<PathBuf>,
    pub report_md: Option<PathBuf>,
}

/// Serializes a pipeline run into `out_dir`: metrics.csv always, report.csv
/// and report.md when the correlation step ran.
pub fn write_outputs(output: &PipelineOutput, out_dir: &Path) -> Result<OutputPaths> {
    std::fs::create_dir_all(out_dir)?;
    let metrics_csv = out_dir.join("metrics.csv");
    io::report::write_metrics_csv(&output.rows, &metrics_csv)?;
    let (report_csv, report_md) = match &output.report {
        Some(report) => {
            let csv_path = out_dir.join("report.csv");
            let md_path = out_dir.join("report.md");
            io::report::write_correlation_csv(report, &csv_path)?;
            io::report::write_correlation_markdown(report, &md_path)?;
            (Some(csv_path), Some(md_path))
        }
        None => (None, None),
    };
    Ok(OutputPaths {
        metrics_csv,
        report_csv,
        report_md,
    })
}
