//! Neuroevolution of sine-activated predictors for service function chain
//! embedding on fat-tree data centres, with baselines and an experiment
//! harness.

// Negated float comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod evolution;
pub mod harness;

pub mod netsim;
pub mod neuro;
pub mod nsga2;
pub mod solvers;
pub mod topology;
pub mod workload;

pub use error::{Error, Result};
