//! File formats, certificates, the end-to-end pipeline and the command line
//! on top of `germforge-core`.

pub use germforge_core as core;

pub mod certificate;
pub mod format;
pub mod job;
pub mod parallel;
pub mod parse;
pub mod pipeline;
