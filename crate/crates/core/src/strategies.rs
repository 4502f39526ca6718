//! Move-selection policies and complete play-outs.
//!
//! Deterministic games fix a priority order over move classes; the first
//! legal move in that order is played. Combining classes are AddOnes and
//! Combine(k); splitting classes are SplitTwos and Split(k), with SplitTwos
//! sitting at index 2 of the split scan.
//!
//! | strategy                     | order                                         |
//! |------------------------------|-----------------------------------------------|
//! | `combine-largest`            | combine desc, add-ones, split desc            |
//! | `split-largest`              | split desc, combine desc, add-ones            |
//! | `combine-smallest`           | add-ones, combine asc, split asc              |
//! | `split-smallest`             | split asc, add-ones, combine asc              |
//! | `ones-first-split-smallest`  | add-ones, split asc, combine asc              |
//! | `greedy`                     | move reading the largest index, combine first |
//!
//! # Random play
//!
//! `random` picks uniformly among [`GameState::legal_moves`] (canonical
//! order) using SplitMix64 seeded with the game seed as its initial state.
//! For `m` legal moves the pick is `(x * m) >> 64` with `x` the next 64-bit
//! output, computed in 128-bit arithmetic. Batches derive the seed of game
//! `i` as `master_seed + i` (wrapping).

use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::engine::{verify_tally_with, Game, GameState, Move, MoveTally, VerificationReport};
use crate::error::{Error, Result};
use crate::fibcore::zeckendorf_with;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    CombineLargest,
    SplitLargest,
    CombineSmallest,
    SplitSmallest,
    OnesFirstSplitSmallest,
    Greedy,
    Random { seed: u64 },
}

impl Strategy {
    pub const DETERMINISTIC: [Strategy; 6] = [
        Strategy::CombineLargest,
        Strategy::SplitLargest,
        Strategy::CombineSmallest,
        Strategy::SplitSmallest,
        Strategy::OnesFirstSplitSmallest,
        Strategy::Greedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::CombineLargest => "combine-largest",
            Strategy::SplitLargest => "split-largest",
            Strategy::CombineSmallest => "combine-smallest",
            Strategy::SplitSmallest => "split-smallest",
            Strategy::OnesFirstSplitSmallest => "ones-first-split-smallest",
            Strategy::Greedy => "greedy",
            Strategy::Random { .. } => "random",
        }
    }

    pub fn is_deterministic(self) -> bool {
        !matches!(self, Strategy::Random { .. })
    }

    pub fn seed(self) -> Option<u64> {
        match self {
            Strategy::Random { seed } => Some(seed),
            _ => None,
        }
    }

    /// Replaces the seed of `random`; no effect on deterministic strategies.
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            Strategy::Random { .. } => Strategy::Random { seed },
            other => other,
        }
    }

    pub fn selector(self) -> Selector {
        Selector::new(self)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// `random` parses with seed 0; use [`Strategy::with_seed`].
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "combine-largest" => Strategy::CombineLargest,
            "split-largest" => Strategy::SplitLargest,
            "combine-smallest" => Strategy::CombineSmallest,
            "split-smallest" => Strategy::SplitSmallest,
            "ones-first-split-smallest" => Strategy::OnesFirstSplitSmallest,
            "greedy" => Strategy::Greedy,
            "random" => Strategy::Random { seed: 0 },
            other => return Err(Error::UnknownStrategy(other.to_string())),
        })
    }
}

#[derive(Clone, Copy)]
enum Dir {
    Asc,
    Desc,
}

#[derive(Clone, Copy)]
enum Class {
    AddOnes,
    Combine(Dir),
    Split(Dir),
}

fn class_order(strategy: Strategy) -> &'static [Class] {
    use Class::*;
    use Dir::*;
    match strategy {
        Strategy::CombineLargest => &[Combine(Desc), AddOnes, Split(Desc)],
        Strategy::SplitLargest => &[Split(Desc), Combine(Desc), AddOnes],
        Strategy::CombineSmallest => &[AddOnes, Combine(Asc), Split(Asc)],
        Strategy::SplitSmallest => &[Split(Asc), AddOnes, Combine(Asc)],
        Strategy::OnesFirstSplitSmallest => &[AddOnes, Split(Asc), Combine(Asc)],
        Strategy::Greedy | Strategy::Random { .. } => &[],
    }
}

fn scan(dir: Dir, lo: usize, hi: usize, mut hit: impl FnMut(usize) -> Option<Move>) -> Option<Move> {
    match dir {
        Dir::Asc => (lo..=hi).find_map(&mut hit),
        Dir::Desc => (lo..=hi).rev().find_map(&mut hit),
    }
}

fn first_in_class(class: Class, state: &GameState) -> Option<Move> {
    let c = state.counts();
    let top = state.i_max();
    match class {
        Class::AddOnes => (c[1] >= 2).then_some(Move::AddOnes),
        Class::Combine(dir) => scan(dir, 2, top, |k| {
            (c[k - 1] >= 1 && c[k] >= 1).then_some(Move::Combine(k))
        }),
        Class::Split(dir) => scan(dir, 2, top, |k| {
            (c[k] >= 2).then_some(if k == 2 { Move::SplitTwos } else { Move::Split(k) })
        }),
    }
}

fn greedy_move(state: &GameState) -> Option<Move> {
    let c = state.counts();
    for k in (2..=state.i_max()).rev() {
        if c[k - 1] >= 1 && c[k] >= 1 {
            return Some(Move::Combine(k));
        }
        if c[k] >= 2 {
            return Some(if k == 2 { Move::SplitTwos } else { Move::Split(k) });
        }
    }
    (c[1] >= 2).then_some(Move::AddOnes)
}

/// Move chosen by a deterministic strategy. Errors on `random` and on
/// terminal states.
pub fn select_deterministic(strategy: Strategy, state: &GameState) -> Result<Move> {
    let mv = match strategy {
        Strategy::Random { .. } => return Err(Error::StrategyNotAllowed(strategy.to_string())),
        Strategy::Greedy => greedy_move(state),
        s => class_order(s)
            .iter()
            .find_map(|&class| first_in_class(class, state)),
    };
    mv.ok_or_else(|| Error::Terminal(state.to_string()))
}

/// Uniform index in `0..len` from one 64-bit draw.
#[inline]
pub fn uniform_index(rng: &mut SplitMix64, len: usize) -> usize {
    ((u128::from(rng.next_u64()) * len as u128) >> 64) as usize
}

/// Per-play-out move chooser. Owns the generator for `random`.
pub struct Selector {
    strategy: Strategy,
    rng: Option<SplitMix64>,
    buf: Vec<Move>,
}

impl Selector {
    pub fn new(strategy: Strategy) -> Self {
        Self {
            strategy,
            rng: strategy.seed().map(SplitMix64::seed_from_u64),
            buf: Vec::new(),
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn select(&mut self, state: &GameState) -> Result<Move> {
        match &mut self.rng {
            None => select_deterministic(self.strategy, state),
            Some(rng) => {
                state.legal_moves_into(&mut self.buf);
                if self.buf.is_empty() {
                    return Err(Error::Terminal(state.to_string()));
                }
                Ok(self.buf[uniform_index(rng, self.buf.len())])
            }
        }
    }
}

/// Outcome of one complete game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub strategy: String,
    pub seed: Option<u64>,
    pub n: u64,
    pub total_moves: u64,
    pub combines: u64,
    pub splits: u64,
    pub tally: MoveTally,
    pub report: VerificationReport,
    pub final_state: String,
    pub final_is_zeckendorf: bool,
}

pub fn play_out(strategy: Strategy, n: u64) -> Result<GameRecord> {
    let mut game = Game::new(n)?;
    let mut selector = strategy.selector();
    while !game.is_over() {
        let mv = selector.select(game.state())?;
        game.play(mv)?;
    }
    Ok(finish(strategy, game))
}

fn finish(strategy: Strategy, game: Game) -> GameRecord {
    let (table, state, tally): (_, GameState, MoveTally) = game.into_parts();
    let decomp = zeckendorf_with(&table, table.limit());
    let report = verify_tally_with(&decomp, &tally);
    GameRecord {
        strategy: strategy.name().to_string(),
        seed: strategy.seed(),
        n: table.limit(),
        total_moves: tally.total_moves,
        combines: tally.combines(),
        splits: tally.splits(),
        final_is_zeckendorf: state.matches(&decomp),
        final_state: state.to_string(),
        report,
        tally,
    }
}
