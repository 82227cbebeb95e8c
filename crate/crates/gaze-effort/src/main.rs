use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gaze_effort::error::Result;
use gaze_effort::io::{self, Config};
use gaze_effort::model::validate_trial;
use gaze_effort::pipeline;
use gaze_effort::stats;
use gaze_effort::synth;

#[derive(Parser)]
#[command(
    name = "gaze-effort",
    about = "Cognitive-effort measures from eye-tracking session logs",
    version
)]
struct Cli {
    /// Config file (flat dotted keys, TOML-compatible).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct DetectorFlags {
    /// Fixation dispersion threshold, degrees.
    #[arg(long)]
    dispersion_deg: Option<f64>,
    /// Minimum fixation duration, milliseconds.
    #[arg(long)]
    min_fix_ms: Option<f64>,
    /// Invalid samples tolerated inside a fixation.
    #[arg(long)]
    max_gap: Option<usize>,
}

#[derive(Args, Default)]
struct MeasureFlags {
    /// Arc-length mode: path or endpoint.
    #[arg(long)]
    arc_mode: Option<String>,
    /// View-importance normalization: cell or value-binned.
    #[arg(long)]
    pg_mode: Option<String>,
    /// Distribution support: auto, aoi, or grid.
    #[arg(long)]
    support: Option<String>,
    /// Grid cells per axis.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Viewing-plane half field, degrees.
    #[arg(long)]
    half_angle_deg: Option<f64>,
    /// Comma-separated check AOIs.
    #[arg(long)]
    check_set: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan trial files for invariant violations.
    Validate { inputs: Vec<PathBuf> },
    /// Detect fixations and print them as CSV.
    Detect {
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        detector: DetectorFlags,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compute per-trial metrics as CSV.
    Measures {
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        detector: DetectorFlags,
        #[command(flatten)]
        measures: MeasureFlags,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Abort on the first bad trial instead of continuing.
        #[arg(long)]
        strict: bool,
    },
    /// Correlate a metrics CSV against the ground-truth columns.
    Correlate {
        metrics: PathBuf,
        /// Report CSV path.
        #[arg(long)]
        output_csv: Option<PathBuf>,
        /// Report Markdown path.
        #[arg(long)]
        output_md: Option<PathBuf>,
    },
    /// Generate a synthetic corpus plus its expectation ledger.
    Simulate {
        /// Scenario preset: balanced, concentrated, or mixed.
        #[arg(long, default_value = "mixed")]
        preset: String,
        #[arg(long, default_value_t = 56)]
        n_trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Angular jitter sigma, degrees.
        #[arg(long, default_value_t = 0.1)]
        jitter_deg: f64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Full pipeline: metrics CSV plus the correlation report.
    Report {
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        detector: DetectorFlags,
        #[command(flatten)]
        measures: MeasureFlags,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Abort on the first bad trial instead of continuing.
        #[arg(long)]
        strict: bool,
    },
}

fn build_config(
    base: Option<PathBuf>,
    detector: Option<&DetectorFlags>,
    measures: Option<&MeasureFlags>,
) -> Result<Config> {
    let mut cfg = match base {
        Some(path) => io::load_config(&path)?,
        None => Config::default(),
    };
    if let Some(d) = detector {
        if let Some(v) = d.dispersion_deg {
            cfg.detector.dispersion_deg = v;
        }
        if let Some(v) = d.min_fix_ms {
            cfg.detector.min_duration = v / 1000.0;
        }
        if let Some(v) = d.max_gap {
            cfg.detector.max_gap = v;
        }
    }
    if let Some(m) = measures {
        if let Some(v) = &m.arc_mode {
            cfg.arc_mode = v.parse()?;
        }
        if let Some(v) = &m.pg_mode {
            cfg.measures.pg_mode = v.parse()?;
        }
        if let Some(v) = &m.support {
            cfg.measures.support = v.parse()?;
        }
        if let Some(v) = m.grid_n {
            cfg.measures.grid.n = v;
        }
        if let Some(v) = m.half_angle_deg {
            cfg.measures.grid.half_angle_deg = v;
        }
        if let Some(v) = &m.check_set {
            cfg.measures.check_set = v
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect::<BTreeSet<String>>();
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { inputs } => {
            let mut bad = 0usize;
            for path in &inputs {
                match io::parse_trial(path) {
                    Ok(trial) => {
                        let violations = validate_trial(&trial);
                        if violations.is_empty() {
                            println!("{}: ok ({} samples)", path.display(), trial.samples.len());
                        } else {
                            bad += 1;
                            for v in violations {
                                println!("{}: {v}", path.display());
                            }
                        }
                    }
                    Err(e) => {
                        bad += 1;
                        println!("{}: {e}", path.display());
                    }
                }
            }
            Ok(if bad == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Detect {
            inputs,
            detector,
            output,
        } => {
            let cfg = build_config(cli.config, Some(&detector), None)?;
            let mut tables = Vec::new();
            for path in &inputs {
                let mut trial = io::parse_trial(path)?;
                trial.fixations =
                    gaze_effort::fixation::detect_fixations(&trial.samples, &cfg.detector)?;
                gaze_effort::retinal_flow::enrich_fixations(
                    &mut trial,
                    &cfg.measures.grid,
                    cfg.arc_mode,
                )?;
                tables.push((trial.id(), trial.fixations));
            }
            let borrowed: Vec<(String, &[gaze_effort::Fixation])> = tables
                .iter()
                .map(|(id, f)| (id.clone(), f.as_slice()))
                .collect();
            emit(&io::report::fixations_csv_string(&borrowed), output.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Measures {
            inputs,
            detector,
            measures,
            output,
            strict,
        } => {
            let cfg = build_config(cli.config, Some(&detector), Some(&measures))?;
            let out = pipeline::run_pipeline(&inputs, &cfg, strict)?;
            for (path, err) in &out.failures {
                eprintln!("skipped {}: {err}", path.display());
            }
            emit(&io::report::metrics_csv_string(&out.rows), output.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Correlate {
            metrics,
            output_csv,
            output_md,
        } => {
            let cfg = build_config(cli.config, None, None)?;
            let rows = io::report::read_metrics_csv(&metrics)?;
            let report = stats::correlation_table(&rows, &cfg.alpha_levels)?;
            match output_csv {
                Some(path) => io::report::write_correlation_csv(&report, &path)?,
                None => print!("{}", io::report::correlation_csv_string(&report)),
            }
            if let Some(path) = output_md {
                io::report::write_correlation_markdown(&report, &path)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            preset,
            n_trials,
            seed,
            jitter_deg,
            out_dir,
        } => {
            let cfg = build_config(cli.config, None, None)?;
            let preset: synth::Preset = preset.parse()?;
            let corpus = synth::make_corpus(
                preset,
                n_trials,
                seed,
                jitter_deg,
                &out_dir,
                &cfg.measures,
            )?;
            println!(
                "wrote {} trials and {} under {}",
                corpus.trial_paths.len(),
                corpus.ledger_path.file_name().unwrap().to_string_lossy(),
                out_dir.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Report {
            inputs,
            detector,
            measures,
            out_dir,
            strict,
        } => {
            let cfg = build_config(cli.config, Some(&detector), Some(&measures))?;
            let out = pipeline::run_pipeline(&inputs, &cfg, strict)?;
            for (path, err) in &out.failures {
                eprintln!("skipped {}: {err}", path.display());
            }
            let paths = pipeline::write_outputs(&out, &out_dir)?;
            println!("wrote {}", paths.metrics_csv.display());
            match (&paths.report_csv, &out.report_note) {
                (Some(p), _) => println!("wrote {}", p.display()),
                (None, Some(note)) => println!("correlation skipped: {note}"),
                (None, None) => {}
            }
            if let Some(p) = &paths.report_md {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
