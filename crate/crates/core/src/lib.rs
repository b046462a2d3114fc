//! Detects where the control-flow behavior of an event log changes along a
//! continuous per-case dimension (case duration, risk score, any numeric
//! case attribute), segments the log at the detected change points, compares
//! the segments pairwise, and hierarchically merges indistinguishable ones.
//!
//! The pipeline: rank the cases by the indicator, split them into equal-size
//! buckets, slide left/right windows over the buckets and score each position
//! with the exact earth mover's distance between the windows' stochastic
//! languages (normalized Levenshtein ground distance), take thresholded local
//! maxima as change points, cut segments there, and agglomeratively merge
//! segments whose pairwise distance stays below the threshold.

pub mod change_detection;
pub mod emd;
pub mod error;
pub mod event_log;
pub mod indicators;
pub mod pipeline;
pub mod render;
pub mod segmentation;
pub mod synthgen;

pub use error::{Error, Result};
