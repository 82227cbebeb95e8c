//! Information-theoretic cognitive-effort measures from eye-tracking
//! session logs of driving tasks.
//!
//! The pipeline turns raw 90 Hz gaze logs into per-trial metrics and a
//! correlation report against ground-truth effort proxies:
//!
//! 1. [`fixation`] detects fixations by dispersion thresholding.
//! 2. [`retinal_flow`] computes the per-fixation retinal flow and
//!    observation importance from stimulus geometry.
//! 3. [`distributions`] builds the fixation, flow, transition, and grid
//!    view-importance distributions.
//! 4. [`infotheory`] supplies entropy, Jensen-Shannon divergence, and the
//!    entropy rate.
//! 5. [`measures`] assembles the per-trial metrics row.
//! 6. [`stats`] correlates measures against ground truths with
//!    Pearson/Kendall/Spearman and significance tests.
//!
//! [`synth`] generates deterministic synthetic sessions with a ledger of
//! expected values; [`io`] and [`pipeline`] handle files, configuration,
//! and end-to-end runs. The `gaze-effort` binary exposes all of it on the
//! command line.

pub mod distributions;
pub mod error;
pub mod fixation;
pub mod geom;
pub mod infotheory;
pub mod io;
pub mod measures;
pub mod model;
pub mod pipeline;
pub mod retinal_flow;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use geom::Vec3;
pub use model::{Distribution, Fixation, GazeSample, GridSpec, Trial};
