//! Reporting layer: configuration, histograms, dataset splits, robustness
//! checks and the end-to-end pipeline.

pub mod config;
pub mod histogram;
pub mod pipeline;
pub mod robustness;
pub mod split;
