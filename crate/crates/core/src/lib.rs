//! Exact analysis of linear random operators over finite probability spaces.

pub mod catalog;
pub mod cli;
pub mod closed_form;
pub mod conditional;
pub mod continuity;
pub mod error;
pub mod exact;
pub mod graph;
pub mod prob_core;
pub mod random_operator;
pub mod randomization;
pub mod sequences;
pub mod spaces;

pub use error::{Error, Result};
pub use exact::Rational;
