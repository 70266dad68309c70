//! File formats, plotting and the command-line front end for
//! `tubenav-core`.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod io;
pub mod plot;
pub mod report;
