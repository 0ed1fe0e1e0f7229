use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad input value: out-of-range ground element, degenerate pair, unknown vertex.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty complex: {0}")]
    EmptyComplex(String),

    /// Full face enumeration would exceed the configured cap.
    #[error("face enumeration needs an estimated {estimate} faces, above the cap of {cap} (raise it with --cap or MK_CAP)")]
    CapExceeded { estimate: u64, cap: u64 },

    /// The pair list is not a partial matching on the face poset at all.
    #[error("malformed matching: {0}")]
    MalformedMatching(String),

    #[error("matching is not acyclic: {0}")]
    NotAcyclic(String),

    #[error("fiber assignment is not order-preserving on the cover {lower} < {upper}")]
    NotOrderPreserving { lower: String, upper: String },

    #[error("critical cells do not form a subcomplex: {0}")]
    NotSubcomplex(String),

    /// A combinatorial identity the construction relies on failed.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("integer overflow in {0}")]
    Overflow(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
}
