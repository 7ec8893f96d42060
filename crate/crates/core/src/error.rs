use thiserror::Error;

/// Errors surfaced by the analytic and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("{0}")]
    InvalidArgument(String),

    /// A brute-force route was asked for an instance beyond its documented cap.
    #[error("instance too large to enumerate: {detail} exceeds cap {cap}")]
    EnumerationCap { detail: String, cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
