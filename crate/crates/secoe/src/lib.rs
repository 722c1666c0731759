pub mod bundle;
pub mod correlation;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod learners;
pub mod matrix;
pub mod planner;
mod seed;
pub mod synth;

pub use error::{Error, Result};
