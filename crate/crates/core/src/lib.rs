pub mod error;
pub mod geometry;
pub mod minkowski;
pub mod covering;
pub mod chaining;
pub mod entropy;
pub mod fixtures;
pub mod harness;
