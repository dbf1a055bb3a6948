//! File formats, verification harnesses and report rendering behind the `catfrac` binary.

pub mod commands;
pub mod fcat;
pub mod harness;
pub mod report;
pub mod zdformat;
