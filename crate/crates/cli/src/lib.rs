//! Command-line front end, file formats and the ground-truth oracle for
//! `latala-core`.

// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod input;
pub mod oracle;
pub mod report;
pub mod verify;

pub use cli::run;
