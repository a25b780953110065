use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} needs {needed} entries but the cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("vertex {vertex} is not in 1..={n}")]
    UnknownVertex { vertex: usize, n: usize },

    #[error("hypergraph is not connected")]
    Disconnected,

    #[error("no hyperedge crosses the bipartition")]
    NoCrossingEdge,

    /// The reduction procedure reached a state its construction rules out.
    #[error("reduction stalled: {0}")]
    PolicyExhausted(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
