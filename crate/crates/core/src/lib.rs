//! Runtime approximation and cost-based planning for link discovery.
//!
//! The crate loads two resource tables, evaluates link specifications over
//! them, fits runtime models for atomic specifications from timed samples,
//! and uses those models to pick cheaper execution plans that return the
//! same mapping as executing the specification literally.

pub mod costmodel;
pub mod error;
pub mod kb;
pub mod kv;
pub mod ls;
mod mapping;
pub mod measures;
pub mod planner;
pub mod rng;
pub mod synth;
pub mod trainer;

pub use error::{Error, Result};
pub use mapping::Mapping;
