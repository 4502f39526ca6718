use thiserror::Error;

use crate::engine::Move;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("fibonacci table overflow while building table for n = {0}")]
    Overflow(u64),

    #[error("illegal move {mv} in state {state}")]
    IllegalMove { mv: Move, state: String },

    #[error("no move available: state {0} is terminal")]
    Terminal(String),

    #[error("term materialized above i_max = {i_max} in state {state}")]
    IndexAboveMax { i_max: usize, state: String },

    #[error("progress measure did not decrease on move {mv} from {state}")]
    ProgressViolation { mv: Move, state: String },

    #[error("state cap of {cap} exceeded after visiting {visited} states")]
    CapExceeded { cap: usize, visited: usize },

    #[error("need at least {needed} games, got {got}")]
    TooFewGames { needed: usize, got: usize },

    #[error("degenerate distribution: variance is zero")]
    DegenerateDistribution,

    #[error("strategy `{0}` is not allowed here")]
    StrategyNotAllowed(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("cannot parse state `{0}`")]
    ParseState(String),

    #[error("identity failure: {0}")]
    Identity(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
