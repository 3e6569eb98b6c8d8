use thiserror::Error;

use crate::engine::Bits;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MripError {
    #[error("instance too large for exact decision: {0}")]
    InstanceTooLarge(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("query error: {0}")]
    Query(String),

    #[error("block {block} does not decode to an Oracle-3SAT instance: {reason}")]
    UndecodableBlock { block: usize, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("partial strategy: prover {prover} has no message for round {round} after transcript {transcript:?}")]
    PartialStrategy {
        prover: usize,
        round: usize,
        transcript: Vec<Bits>,
    },

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("payment {0} outside [-1, 1]")]
    PaymentOutOfRange(String),

    #[error("enumeration refused: {what} has size {size}, cap is {cap}")]
    EnumerationTooLarge { what: String, size: u128, cap: u128 },

    #[error("grouped evaluation unavailable: {0}")]
    GroupedUnavailable(String),

    #[error("empty strategy family")]
    EmptyFamily,

    #[error("no strategy profile has utility in [0, 1]; the family violates u >= 0")]
    NoNonNegativeProfile,

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, MripError>;
