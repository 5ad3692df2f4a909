//! Spec-file parsing, resolution and job execution behind the `opcalc` binary.

pub mod build;
pub mod run;
pub mod spec;
