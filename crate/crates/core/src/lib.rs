//! Multimodal sensing analytics for growing laying hens.
//!
//! Acoustic descriptors from audio clips, dense optical flow around
//! caretaker entries, thermal and environmental readings, weekly
//! aggregation, cross-modal correlation and the statistical tests used to
//! read them. A seeded generator produces datasets with planted trends for
//! end-to-end checks.
//!
//! Numeric kernels are generic over [`Real`] (`f32` or `f64`); the record
//! and pipeline layer works in `f64`.

// `!(x > 0.0)` is deliberate throughout: NaN must fail the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustic;
pub mod aggregate;
pub mod config;
pub mod flow;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod special;
pub mod stats;
pub mod synth;

pub use scalar::Real;

pub type Signal = ingest::AudioSignal<f64>;
pub type Signal32 = ingest::AudioSignal<f32>;
pub type Spectrogram = acoustic::Spectrogram<f64>;
pub type Spectrogram32 = acoustic::Spectrogram<f32>;
pub type ClipFeatures = acoustic::ClipFeatures<f64>;
pub type ClipFeatures32 = acoustic::ClipFeatures<f32>;
pub type Image = flow::Image<f64>;
pub type Image32 = flow::Image<f32>;
pub type FlowField = flow::FlowField<f64>;
pub type FlowField32 = flow::FlowField<f32>;
pub type TestResult = stats::TestResult<f64>;
pub type AnovaResult = stats::AnovaResult<f64>;
