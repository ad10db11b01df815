//! Windowed Event Calculus recognition.

pub mod engine;
pub mod interval;
pub mod packs;
pub mod rules;
pub mod stream;
pub mod time;

pub use interval::{End, Interval, IntervalError, IntervalList};
pub use time::TimePoint;

/// Time points are integer ticks.
pub type Tick = i64;
pub type Span = Interval<Tick>;
pub type Spans = IntervalList<Tick>;
