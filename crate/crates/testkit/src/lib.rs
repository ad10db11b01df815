//! Reference evaluators and random stream builders used by the tests.
//!
//! Everything here works point by point over small bounded universes and
//! shares no evaluation code with the engine.

pub mod algebra;
pub mod ec;
pub mod streams;

/// Extra event description exercising every construct.
pub const MIXED: &str = include_str!("mixed.ec");
