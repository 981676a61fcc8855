// `!(x > 0.0)` is used on purpose so that NaN fails domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compare;
pub mod error;
pub mod focal;
pub mod ingest;
pub mod numerics;
pub mod render;
pub mod stats;
pub mod synth;
