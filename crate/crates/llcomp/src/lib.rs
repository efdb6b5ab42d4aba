//! Command-line companion of `llcomp-core`: space presets and configuration
//! files, parallel certification, JSON/CSV reports and SVG figures.

pub use llcomp_core as core;

pub mod cli;
pub mod config;
pub mod error;
pub mod parallel;
pub mod render;
pub mod report;
