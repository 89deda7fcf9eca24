pub mod cadlag;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod jump_opt;
pub mod levy_model;
pub mod limit_measures;
pub mod quad;
pub mod rng;
pub mod simulate;

pub use error::{Error, Result};
