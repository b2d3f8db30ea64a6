use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument outside the operation's domain (bad sizes, levels, vertex
    /// ids, malformed input).
    #[error("domain error: {0}")]
    Domain(String),
    /// An operation would materialize or visit more states than the
    /// configured cap allows. Never a wrong answer, only a refusal.
    #[error("{what} needs {required} states, over the cap of {cap}")]
    Capacity {
        what: &'static str,
        required: String,
        cap: u64,
    },
    /// A pebbling move that the rules do not permit.
    #[error("illegal move: {0}")]
    Move(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Error {
        Error::Domain(msg.into())
    }

    pub fn capacity(what: &'static str, required: impl ToString, cap: u64) -> Error {
        Error::Capacity {
            what,
            required: required.to_string(),
            cap,
        }
    }
}
