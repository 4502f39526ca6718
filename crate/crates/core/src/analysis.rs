//! Exhaustive analysis of the game graph for small `n`.
//!
//! States form a DAG: every edge strictly decreases
//! [`GameState::progress`], which is checked on each edge. Game lengths
//! come from memoized longest/shortest path, and the winner from memoized
//! win/loss search on "does the player to move win". Both searches share the
//! successor layer but keep separate memo tables.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::engine::GameState;
use crate::engine::MoveTally;
use crate::error::{Error, Result};
use crate::fibcore::FibTable;

pub const DEFAULT_STATE_CAP: usize = 10_000_000;

/// Successors of `state`, in canonical move order.
pub fn successors(state: &GameState) -> Result<Vec<GameState>> {
    let before = state.progress();
    let mut scratch = MoveTally::for_state(state);
    state
        .legal_moves()
        .into_iter()
        .map(|mv| {
            let mut next = state.clone();
            next.apply_move(mv, &mut scratch)?;
            if next.progress() >= before {
                return Err(Error::ProgressViolation {
                    mv,
                    state: state.to_string(),
                });
            }
            Ok(next)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameGraphStats {
    pub n: u64,
    pub reachable_states: usize,
    pub longest: u64,
    pub shortest: u64,
    /// Number of distinct complete move sequences, saturating at `u64::MAX`.
    pub distinct_games: u64,
    pub distinct_games_saturated: bool,
}

#[derive(Clone, Copy)]
struct PathInfo {
    longest: u64,
    shortest: u64,
    paths: u64,
    saturated: bool,
}

struct Enumerator {
    memo: HashMap<GameState, PathInfo>,
    cap: usize,
}

impl Enumerator {
    fn visit(&mut self, state: &GameState) -> Result<PathInfo> {
        if let Some(&info) = self.memo.get(state) {
            return Ok(info);
        }
        let next = successors(state)?;
        let info = if next.is_empty() {
            PathInfo {
                longest: 0,
                shortest: 0,
                paths: 1,
                saturated: false,
            }
        } else {
            let mut acc = PathInfo {
                longest: 0,
                shortest: u64::MAX,
                paths: 0,
                saturated: false,
            };
            for child in &next {
                let c = self.visit(child)?;
                acc.longest = acc.longest.max(c.longest + 1);
                acc.shortest = acc.shortest.min(c.shortest + 1);
                let (sum, over) = acc.paths.overflowing_add(c.paths);
                acc.paths = if over { u64::MAX } else { sum };
                acc.saturated |= over || c.saturated;
            }
            acc
        };
        if self.memo.len() >= self.cap {
            return Err(Error::CapExceeded {
                cap: self.cap,
                visited: self.memo.len(),
            });
        }
        self.memo.insert(state.clone(), info);
        Ok(info)
    }
}

/// Longest and shortest game on `n` over every possible play, and the
/// number of distinct games.
pub fn enumerate(n: u64, state_cap: usize) -> Result<GameGraphStats> {
    let start = GameState::initial(&FibTable::new(n)?);
    let mut e = Enumerator {
        memo: HashMap::new(),
        cap: state_cap,
    };
    let info = e.visit(&start)?;
    Ok(GameGraphStats {
        n,
        reachable_states: e.memo.len(),
        longest: info.longest,
        shortest: info.shortest,
        distinct_games: info.paths,
        distinct_games_saturated: info.saturated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    One,
    Two,
    /// No move is ever made (`n = 1`).
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub n: u64,
    pub winner: Winner,
    pub solved_states: usize,
}

struct Solver {
    memo: HashMap<GameState, bool>,
    cap: usize,
}

impl Solver {
    /// Whether the player about to move from `state` wins. The player who
    /// completes the Zeckendorf decomposition moves last and wins, so a
    /// state with no moves is a loss for the player to move.
    fn mover_wins(&mut self, state: &GameState) -> Result<bool> {
        if let Some(&w) = self.memo.get(state) {
            return Ok(w);
        }
        let mut wins = false;
        for child in successors(state)? {
            if !self.mover_wins(&child)? {
                wins = true;
                break;
            }
        }
        if self.memo.len() >= self.cap {
            return Err(Error::CapExceeded {
                cap: self.cap,
                visited: self.memo.len(),
            });
        }
        self.memo.insert(state.clone(), wins);
        Ok(wins)
    }
}

/// Winner of the game on `n` under optimal play by both players.
pub fn solve_winner(n: u64, state_cap: usize) -> Result<SolveResult> {
    let start = GameState::initial(&FibTable::new(n)?);
    let mut s = Solver {
        memo: HashMap::new(),
        cap: state_cap,
    };
    let winner = if start.is_terminal() {
        Winner::None
    } else if s.mover_wins(&start)? {
        Winner::One
    } else {
        Winner::Two
    };
    Ok(SolveResult {
        n,
        winner,
        solved_states: s.memo.len(),
    })
}
