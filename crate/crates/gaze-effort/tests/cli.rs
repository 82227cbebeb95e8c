//! End-to-end checks of the `gaze-effort` binary.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gaze-effort"))
}

fn run(args: &[&str], dir: &Path) -> (bool, String, String) {
    let out = bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (
        out.status.success(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn simulate_report_correlate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, stdout, stderr) = run(
        &[
            "simulate",
            "--preset",
            "mixed",
            "--n-trials",
            "8",
            "--seed",
            "7",
            "--jitter-deg",
            "0.1",
            "--out-dir",
            "corpus",
        ],
        dir.path(),
    );
    assert!(ok, "simulate failed: {stderr}");
    assert!(stdout.contains("wrote 8 trials"));
    assert!(dir.path().join("corpus/ledger.csv").exists());

    let mut args = vec!["report", "--out-dir", "out"];
    let listing: Vec<String> = (0..8)
        .map(|i| format!("corpus/trial_P{:02}_s{}.jsonl", 1 + i / 4, 1 + i % 4))
        .collect();
    args.extend(listing.iter().map(|s| s.as_str()));
    let (ok, _, stderr) = run(&args, dir.path());
    assert!(ok, "report failed: {stderr}");
    assert!(dir.path().join("out/metrics.csv").exists());
    assert!(dir.path().join("out/report.csv").exists());
    assert!(dir.path().join("out/report.md").exists());

    // correlate standalone from the metrics CSV
    let (ok, stdout, stderr) = run(&["correlate", "out/metrics.csv"], dir.path());
    assert!(ok, "correlate failed: {stderr}");
    assert!(stdout.starts_with("measure,ground_truth,family,"));
    assert!(stdout.contains("CEM_VI"));
}

#[test]
fn validate_flags_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.jsonl");
    std::fs::write(
        &good,
        "{\"schema\":\"gaze/1\",\"participant\":\"P01\",\"session\":1}\n\
         {\"t\":0.0,\"dir\":[0.0,0.0,1.0],\"hit\":[0.0,0.0,2.0],\"valid\":true}\n",
    )
    .unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(
        &bad,
        "{\"schema\":\"gaze/1\",\"participant\":\"P01\",\"session\":1}\n\
         {\"t\":0.0,\"dir\":[0.0,0.0,0.5],\"hit\":[0.0,0.0,2.0],\"valid\":true}\n",
    )
    .unwrap();

    let (ok, stdout, _) = run(&["validate", "good.jsonl"], dir.path());
    assert!(ok);
    assert!(stdout.contains("ok (1 samples)"));

    let (ok, stdout, _) = run(&["validate", "good.jsonl", "bad.jsonl"], dir.path());
    assert!(!ok);
    assert!(stdout.contains("bad.jsonl"));
}

#[test]
fn strict_report_fails_on_corrupt_trial() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, _, _) = run(
        &[
            "simulate",
            "--preset",
            "concentrated",
            "--n-trials",
            "2",
            "--seed",
            "3",
            "--jitter-deg",
            "0",
            "--out-dir",
            ".",
        ],
        dir.path(),
    );
    assert!(ok);
    std::fs::write(dir.path().join("broken.jsonl"), "not json\n").unwrap();

    let (ok, _, stderr) = run(
        &[
            "report",
            "--strict",
            "--out-dir",
            "out",
            "trial_P01_s1.jsonl",
            "trial_P01_s2.jsonl",
            "broken.jsonl",
        ],
        dir.path(),
    );
    assert!(!ok, "strict run must fail");
    assert!(stderr.contains("error"));
    assert!(!dir.path().join("out/metrics.csv").exists());

    // without --strict the run continues and reports the skip
    let (ok, stdout, stderr) = run(
        &[
            "report",
            "--out-dir",
            "out",
            "trial_P01_s1.jsonl",
            "trial_P01_s2.jsonl",
            "broken.jsonl",
        ],
        dir.path(),
    );
    assert!(ok, "non-strict run should succeed: {stderr}");
    assert!(stderr.contains("skipped"));
    assert!(stdout.contains("correlation skipped") || stdout.contains("report.csv"));
    assert!(dir.path().join("out/metrics.csv").exists());
}

#[test]
fn detect_emits_fixation_table() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, _, _) = run(
        &[
            "simulate",
            "--preset",
            "balanced",
            "--n-trials",
            "1",
            "--seed",
            "11",
            "--jitter-deg",
            "0",
            "--out-dir",
            ".",
        ],
        dir.path(),
    );
    assert!(ok);
    let (ok, stdout, stderr) = run(
        &[
            "detect",
            "trial_P01_s1.jsonl",
            "--dispersion-deg",
            "1.0",
            "--min-fix-ms",
            "100",
        ],
        dir.path(),
    );
    assert!(ok, "detect failed: {stderr}");
    assert!(stdout.starts_with("trial_id,index,start_s"));
    // balanced preset scripts 25 fixations
    assert_eq!(stdout.lines().count(), 26);
}

#[test]
fn threads_env_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, _, _) = run(
        &[
            "simulate",
            "--preset",
            "mixed",
            "--n-trials",
            "4",
            "--seed",
            "5",
            "--jitter-deg",
            "0",
            "--out-dir",
            ".",
        ],
        dir.path(),
    );
    assert!(ok);
    let paths: Vec<String> = (0..4)
        .map(|i| format!("trial_P{:02}_s{}.jsonl", 1 + i / 4, 1 + i % 4))
        .collect();
    let mut args = vec!["measures"];
    args.extend(paths.iter().map(|s| s.as_str()));
    let out = bin()
        .args(&args)
        .env("GAZE_EFFORT_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let single = String::from_utf8_lossy(&out.stdout).into_owned();

    let out = bin()
        .args(&args)
        .env("GAZE_EFFORT_THREADS", "4")
        .current_dir(dir.path())
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let multi = String::from_utf8_lossy(&out.stdout).into_owned();
    // worker-pool size must not change the bytes
    assert_eq!(single, multi);

    let out = bin()
        .args(&args)
        .env("GAZE_EFFORT_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .expect("binary runs");
    assert!(!out.status.success(), "bad thread count must be rejected");
}
