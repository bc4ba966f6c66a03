//! Time-ordered anomaly detection on noisy two-class data.
//!
//! The crate compares four detectors on synthetic, quarter-ordered Gaussian
//! series:
//!
//! * a soft-margin linear max-margin classifier ([`svm`]),
//! * that classifier post-filtered by a static moving window ([`window`]),
//! * the same classifier post-filtered by a dynamic, magnitude-driven window,
//! * the deterministic Dendritic Cell Algorithm ([`dca`]).
//!
//! [`datagen`] builds the benchmark suite, [`spectral`] evaluates the
//! frequency responses of the fixed-width filters, [`stats`] holds the
//! Shapiro-Wilk / Wilcoxon / paired t-test battery and [`harness`] ties
//! everything into a reproducible experiment.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod dca;
mod error;
pub mod harness;
mod label;
pub mod spectral;
pub mod stats;
pub mod svm;
pub mod window;

pub use error::{Error, Result};
pub use label::{sgn, Label};
