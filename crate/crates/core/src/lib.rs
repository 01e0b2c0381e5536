//! Connection matrices with coefficients in group rings and Novikov rings.

pub mod algebra;
pub mod error;
pub mod fixtures;
pub mod flow;
pub mod homology;
pub mod novikov_pipeline;
pub mod pconnection;
pub mod schema;

pub use error::{Error, Result};
