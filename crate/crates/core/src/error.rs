use std::path::PathBuf;

use crate::book::Side;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid value for `{key}`: {reason}")]
    InvalidParameter { key: &'static str, reason: String },

    #[error("unknown config key `{key}` on line {line}")]
    UnknownKey { key: String, line: usize },

    #[error("cannot parse `{key}` on line {line}: {value:?}")]
    Unparsable {
        key: String,
        line: usize,
        value: String,
    },

    #[error("malformed config line {line}: {text:?}")]
    MalformedLine { line: usize, text: String },

    #[error("{side:?} agent price {price} is outside its admissible sample space")]
    InadmissiblePrice { side: Side, price: i64 },

    #[error("agent size must be positive, got {0}")]
    NonPositiveSize(f64),

    #[error("degenerate book: opposite best level has zero notional")]
    DegenerateBook,

    #[error("collision probability {0} must be below 1 for the closed-form Reynolds number")]
    CollisionProbabilityTooHigh(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(key: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key,
            reason: reason.into(),
        }
    }
}
