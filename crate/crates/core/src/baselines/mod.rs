//! Comparison algorithms sharing the network evaluators: a binary-encoded
//! GA and a greedy first-come placement.

mod bega;
mod gda;

pub use bega::{repair_row, BegaProblem, BinaryGenome};
pub use gda::{gda_embed, GdaOutcome, GreedyState};
