//! Std companion to `netdefense-core`: file formats, scenario documents,
//! parallel drivers and the experiment sweeps behind the `netdefense` CLI.

pub use netdefense_core as core;

pub mod formats;
pub mod parallel;
pub mod report;
pub mod scenario;
pub mod sweep;
