//! CSV and Markdown serialization of metrics rows and correlation reports.
//! Every number is written with 9 significant digits, so re-parsing a
//! metrics CSV loses less than 1e-8 relative.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::measures::{Metric, MetricsRow};
use crate::stats::{CellResult, CorrelationReport, FAMILIES};

/// 9-significant-digit representation, byte-deterministic.
pub fn fmt9(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.8e}")
    }
}

pub fn metric_to_str(m: &Metric) -> String {
    match m {
        Metric::Value(v) => fmt9(*v),
        Metric::Infinite => "inf".to_string(),
        Metric::Missing(_) => "NA".to_string(),
    }
}

pub fn metric_from_str(s: &str) -> Result<Metric> {
    match s {
        "NA" | "" => Ok(Metric::Missing("missing in input".into())),
        "inf" => Ok(Metric::Infinite),
        other => other
            .parse::<f64>()
            .map(Metric::Value)
            .map_err(|e| Error::Config(format!("bad metric value {other:?}: {e}"))),
    }
}

pub const METRICS_HEADER: [&str; 11] = [
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
];

fn row_fields(row: &MetricsRow) -> [&Metric; 10] {
    [
        &row.cem_vi,
        &row.cem_iq,
        &row.sge,
        &row.entropy_rate,
        &row.check_rate,
        &row.fixation_rate,
        &row.pupil_size_change,
        &row.driving_performance,
        &row.srjsd_f,
        &row.srjsd_fs,
    ]
}

pub fn metrics_csv_string(rows: &[MetricsRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_HEADER).expect("write header");
    for row in rows {
        let mut record = vec![row.trial_id.clone()];
        record.extend(row_fields(row).iter().map(|m| metric_to_str(m)));
        w.write_record(&record).expect("write record");
    }
    String::from_utf8(w.into_inner().expect("flush csv")).expect("csv is utf8")
}

pub fn write_metrics_csv(rows: &[MetricsRow], path: &Path) -> Result<()> {
    fs::write(path, metrics_csv_string(rows))?;
    Ok(())
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Config(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Config(e.to_string()))?
        .clone();
    if headers.iter().ne(METRICS_HEADER) {
        return Err(Error::Config(format!(
            "unexpected metrics CSV header: {headers:?}"
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Config(e.to_string()))?;
        if record.len() != METRICS_HEADER.len() {
            return Err(Error::Config(format!(
                "metrics CSV record has {} fields, expected {}",
                record.len(),
                METRICS_HEADER.len()
            )));
        }
        let metric = |i: usize| metric_from_str(&record[i]);
        rows.push(MetricsRow {
            trial_id: record[0].to_string(),
            cem_vi: metric(1)?,
            cem_iq: metric(2)?,
            sge: metric(3)?,
            entropy_rate: metric(4)?,
            check_rate: metric(5)?,
            fixation_rate: metric(6)?,
            pupil_size_change: metric(7)?,
            driving_performance: metric(8)?,
            srjsd_f: metric(9)?,
            srjsd_fs: metric(10)?,
            diagnostics: Vec::new(),
        });
    }
    Ok(rows)
}

/// Long-format CSV: one record per measure x ground truth x family.
pub fn correlation_csv_string(report: &CorrelationReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["measure", "ground_truth", "family", "cc", "p_value", "n", "stars", "note"])
        .expect("write header");
    for (mi, measure) in report.measures.iter().enumerate() {
        for (gi, gt) in report.ground_truths.iter().enumerate() {
            for (fi, family) in FAMILIES.iter().enumerate() {
                match &report.cells[mi][gi][fi] {
                    CellResult::Stat { cc, p, n } => {
                        w.write_record([
                            measure.as_str(),
                            gt.as_str(),
                            &family.to_string(),
                            &fmt9(*cc),
                            &fmt9(*p),
                            &n.to_string(),
                            &"*".repeat(report.stars(*p)),
                            "",
                        ])
                        .expect("write record");
                    }
                    CellResult::Unavailable(reason) => {
                        w.write_record([
                            measure.as_str(),
                            gt.as_str(),
                            &family.to_string(),
                            "NA",
                            "NA",
                            "0",
                            "",
                            reason.as_str(),
                        ])
                        .expect("write record");
                    }
                }
            }
        }
    }
    String::from_utf8(w.into_inner().expect("flush csv")).expect("csv is utf8")
}

pub fn write_correlation_csv(report: &CorrelationReport, path: &Path) -> Result<()> {
    fs::write(path, correlation_csv_string(report))?;
    Ok(())
}

fn md_cell(report: &CorrelationReport, cell: &CellResult) -> (String, String) {
    match cell {
        CellResult::Stat { cc, p, .. } => {
            let stars = "*".repeat(report.stars(*p));
            (format!("{cc:.2}"), format!("{p:.3}{stars}"))
        }
        CellResult::Unavailable(_) => ("--".to_string(), "--".to_string()),
    }
}

/// Markdown table in the layout of the paper's correlation table: one row
/// per measure, CC and p-value per ground truth and family.
pub fn correlation_markdown(report: &CorrelationReport) -> String {
    let mut out = String::new();
    out.push_str("# Correlation report\n\n");
    out.push_str(&format!(
        "{} trials; significance: {}\n\n",
        report.n_rows,
        report
            .alpha_levels
            .iter()
            .enumerate()
            .map(|(i, a)| format!("{}: p < {a}", "*".repeat(i + 1)))
            .collect::<Vec<_>>()
            .join(", ")
    ));

    let mut header = String::from("| Correlation |");
    let mut rule = String::from("| --- |");
    for gt in &report.ground_truths {
        for family in FAMILIES {
            header.push_str(&format!(" {gt} {family} CC | p-value |"));
            rule.push_str(" ---: | ---: |");
        }
    }
    out.push_str(&header);
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');

    for (mi, measure) in report.measures.iter().enumerate() {
        let mut line = format!("| {measure} |");
        for gi in 0..report.ground_truths.len() {
            for fi in 0..FAMILIES.len() {
                let (cc, p) = md_cell(report, &report.cells[mi][gi][fi]);
                line.push_str(&format!(" {cc} | {p} |"));
            }
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn write_correlation_markdown(report: &CorrelationReport, path: &Path) -> Result<()> {
    fs::write(path, correlation_markdown(report))?;
    Ok(())
}

/// Fixation-table CSV for the `detect` subcommand.
pub fn fixations_csv_string(trials: &[(String, &[crate::model::Fixation])]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "trial_id",
        "index",
        "start_s",
        "end_s",
        "duration_s",
        "centroid_x",
        "centroid_y",
        "centroid_z",
        "depth_m",
        "arc_len_m",
        "flow_rad",
        "displacement_m",
        "importance_rad_per_m",
        "aoi",
        "cell",
        "first_sample",
        "last_sample",
    ])
    .expect("write header");
    for (trial_id, fixations) in trials {
        for f in fixations.iter() {
            w.write_record([
                trial_id.as_str(),
                &f.index.to_string(),
                &fmt9(f.start),
                &fmt9(f.end),
                &fmt9(f.duration),
                &fmt9(f.centroid_dir.x),
                &fmt9(f.centroid_dir.y),
                &fmt9(f.centroid_dir.z),
                &fmt9(f.depth),
                &fmt9(f.arc_len),
                &fmt9(f.flow),
                &fmt9(f.displacement_mag),
                &fmt9(f.importance),
                f.aoi.as_deref().unwrap_or(""),
                &f.cell.to_string(),
                &f.first_sample.to_string(),
                &f.last_sample.to_string(),
            ])
            .expect("write record");
        }
    }
    String::from_utf8(w.into_inner().expect("flush csv")).expect("csv is utf8")
}
