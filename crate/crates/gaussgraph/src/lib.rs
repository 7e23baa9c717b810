//! File formats, reports and the command-line front end for `gaussgraph-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod export;
pub mod io;
pub mod report;
pub mod sampling;

pub use gaussgraph_core as core;
