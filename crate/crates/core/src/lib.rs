pub mod classifiers;
pub mod cluster;
pub mod composite;
pub mod dataset;
pub mod error;
pub mod expr;
pub mod parallel;
pub mod report;
pub mod search;
pub mod visual;

pub use error::{Error, Result};
