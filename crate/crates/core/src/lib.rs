//! The two-player Zeckendorf game.
//!
//! Starting from `n` copies of `F_1 = 1` (with `F_2 = 2`), players alternate
//! combining and splitting Fibonacci terms until the Zeckendorf
//! decomposition of `n` is reached; the last player to move wins.
//!
//! - [`fibcore`]: Fibonacci table, decomposition, move-count bounds
//! - [`engine`]: states, moves, tallies, and the exact tally identities
//! - [`strategies`]: deterministic and seeded random move selection
//! - [`analysis`]: exhaustive game-graph search for small `n`
//! - [`stats`]: random-game batches, moments, normality, growth scans
//! - [`cli`]: the `zeckgame` command line

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod fibcore;
pub mod stats;
pub mod strategies;

pub use error::{Error, Result};
