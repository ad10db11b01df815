//! Rule packs shipped with the library.

/// Surveillance rules: `person`, `leaving_object`, and `moving` in both its
/// simple (`moving`) and statically determined (`moving_sd`) encodings.
pub const SURVEILLANCE: &str = include_str!("../packs/surveillance.ec");
