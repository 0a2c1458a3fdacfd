#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Usefulness analytics for asset returns: incremental diversification,
//! predictability, tail impact and suitability for passive investment.

pub mod diversification;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod panel;
pub mod passive;
pub mod predictability;
pub mod rng;
pub mod synth;
pub mod tails;

pub use error::{Error, Result};
