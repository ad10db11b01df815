//! Reading and writing streams, delay simulation and the closeness
//! preprocessor.

mod close;
mod delay;
mod output;
mod record;

use thiserror::Error;

pub use close::{closeness, coord_samples, with_closeness, CoordSample};
pub use delay::{simulate_delays, Delay, DelayModel};
pub use output::{write_results, OutputLine};
pub use record::{
    parse_record, read_records, read_stream, write_records, Action, InputRecord, Payload, StreamDiagnostic,
};

#[derive(Debug, Error)]
pub enum StreamError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: id `{id}` is asserted while still live")]
    DuplicateId { line: usize, id: String },
    #[error("invalid delay model: {0}")]
    InvalidDelay(String),
    #[error("closeness threshold must be a non-negative number")]
    InvalidThreshold,
}
