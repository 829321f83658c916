use std::io;

use thiserror::Error;

use crate::protocol::{FrameError, ProtocolError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The message bit-length does not fit in the padding length field.
    #[error("message of {len} bytes does not fit a {field_bytes}-byte length field")]
    LengthOverflow { len: u64, field_bytes: usize },

    #[error("{what}: expected {expected} bytes, got {actual}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("half-block count {0} is odd")]
    OddHalfCount(usize),

    #[error("at least one {0} is required")]
    Empty(&'static str),

    #[error("randomness source failed: {0}")]
    Entropy(String),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error(transparent)]
    Frame(#[from] FrameError),

    #[error(transparent)]
    Protocol(#[from] ProtocolError),

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Rejection reasons when parsing an encoded digest.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bad length: {actual} bytes is not a valid {form} digest")]
    BadLength { form: &'static str, actual: usize },

    #[error("bad hex: invalid character at offset {offset}")]
    BadHex { offset: usize },

    #[error("unknown tag {0:?}")]
    UnknownTag(String),

    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}
