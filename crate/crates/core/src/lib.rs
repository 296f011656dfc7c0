//! state-sentinel core: a static analyzer for Solidity projects that flags
//! inconsistent state-update risk patterns, plus the statistics toolkit used
//! to analyze labeled vulnerability datasets.
//!
//! Pipeline: [`frontend`] parses `.sol` files, [`model`] merges them into a
//! whole-project view with resolved inheritance, [`dataflow`] extracts
//! read/write/external-call events, [`rules`] evaluates the four detectors,
//! and [`report`] serializes the result. [`scanner`] drives the pipeline over
//! a directory tree; [`studystats`] is the independent dataset side.

pub mod frontend;
pub mod dataflow;
pub mod model;

pub const TOOL_NAME: &str = "state-sentinel";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
