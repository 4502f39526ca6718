//! Game state, the four move kinds, and per-game move tallies.
//!
//! A state is a multiset of Fibonacci indices stored densely: `counts[i]` is
//! the multiplicity of `F_i` for `1 <= i <= i_max + 1`. Slot 0 is unused and
//! slot `i_max + 1` must stay empty, since no single term can exceed `n`.
//!
//! Move kinds:
//!
//! ```text
//! AddOnes      F_1 ∧ F_1         -> F_2
//! Combine(k)   F_{k-1} ∧ F_k     -> F_{k+1}         k >= 2
//! SplitTwos    F_2 ∧ F_2         -> F_1 ∧ F_3
//! Split(k)     F_k ∧ F_k         -> F_{k-2} ∧ F_{k+1}   k >= 3
//! ```
//!
//! AddOnes is counted as a combining move and SplitTwos as a splitting move:
//! every combining move removes exactly one term, every splitting move keeps
//! the term count.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibcore::{move_bounds_for, zeckendorf, FibTable, ZeckDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    AddOnes,
    /// Keyed by the larger of the two combined indices.
    Combine(usize),
    SplitTwos,
    Split(usize),
}

impl Move {
    pub fn is_combining(self) -> bool {
        matches!(self, Move::AddOnes | Move::Combine(_))
    }

    /// Tally index this move is counted under. Also the largest index the
    /// move reads.
    pub fn index(self) -> usize {
        match self {
            Move::AddOnes => 1,
            Move::SplitTwos => 2,
            Move::Combine(k) | Move::Split(k) => k,
        }
    }

    /// Change in the number of terms.
    pub fn term_delta(self) -> i64 {
        if self.is_combining() {
            -1
        } else {
            0
        }
    }

    /// Change in the sum of indices.
    pub fn index_sum_delta(self) -> i64 {
        match self {
            Move::AddOnes | Move::SplitTwos => 0,
            Move::Combine(k) => -(k as i64 - 2),
            Move::Split(_) => -1,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::AddOnes => write!(f, "add-ones"),
            Move::Combine(k) => write!(f, "combine({k})"),
            Move::SplitTwos => write!(f, "split-twos"),
            Move::Split(k) => write!(f, "split({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    n: u64,
    counts: Vec<u64>,
}

pub fn initial_state(n: u64) -> Result<GameState> {
    Ok(GameState::initial(&FibTable::new(n)?))
}

impl GameState {
    /// `{F_1^n}` for the table's limit `n`.
    pub fn initial(table: &FibTable) -> Self {
        let mut counts = vec![0; table.i_max() + 2];
        counts[1] = table.limit();
        Self {
            n: table.limit(),
            counts,
        }
    }

    /// Builds a state from `(index, count)` pairs, checking that every index
    /// is in `1..=i_max(n)` for the resulting total `n`.
    pub fn from_counts(pairs: &[(usize, u64)]) -> Result<Self> {
        let max_index = pairs.iter().map(|&(i, _)| i).max().unwrap_or(0);
        if pairs.iter().any(|&(i, _)| i == 0) {
            return Err(Error::Domain("fibonacci indices start at 1".into()));
        }
        let mut fib = vec![0u64, 1, 2];
        while fib.len() <= max_index {
            let k = fib.len();
            let next = fib[k - 1]
                .checked_add(fib[k - 2])
                .ok_or_else(|| Error::Domain("index too large".into()))?;
            fib.push(next);
        }
        let mut n = 0u64;
        for &(i, c) in pairs {
            n = fib[i]
                .checked_mul(c)
                .and_then(|v| n.checked_add(v))
                .ok_or_else(|| Error::Domain("state value overflows".into()))?;
        }
        let table = FibTable::new(n)?;
        let mut counts = vec![0; table.i_max() + 2];
        for &(i, c) in pairs {
            if i > table.i_max() {
                return Err(Error::Domain(format!(
                    "index {i} exceeds i_max = {} for n = {n}",
                    table.i_max()
                )));
            }
            counts[i] += c;
        }
        Ok(Self { n, counts })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn i_max(&self) -> usize {
        self.counts.len() - 2
    }

    /// Multiplicity of `F_i`; zero for indices beyond the stored range.
    #[inline]
    pub fn count(&self, i: usize) -> u64 {
        self.counts.get(i).copied().unwrap_or(0)
    }

    /// Dense multiplicities, slot 0 unused.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn term_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn index_sum(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| i as u64 * c)
            .sum()
    }

    pub fn value(&self, table: &FibTable) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| table.fib(i) * c)
            .sum()
    }

    /// Strictly decreases on every legal move: index sum first, then the
    /// number of `F_1` and `F_2` terms. The three moves that keep the index
    /// sum (AddOnes, Combine(2), SplitTwos) change `count(1) + count(2)` by
    /// -1, -2 and -1 respectively.
    pub fn progress(&self) -> (u64, u64) {
        (self.index_sum(), self.count(1) + self.count(2))
    }

    pub fn is_legal(&self, mv: Move) -> bool {
        let top = self.i_max();
        match mv {
            Move::AddOnes => self.count(1) >= 2,
            Move::SplitTwos => self.count(2) >= 2,
            Move::Combine(k) => (2..=top).contains(&k) && self.count(k - 1) >= 1 && self.count(k) >= 1,
            Move::Split(k) => (3..=top).contains(&k) && self.count(k) >= 2,
        }
    }

    /// Legal moves in canonical order:
    /// AddOnes, Combine(2..=i_max), SplitTwos, Split(3..=i_max).
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut out = Vec::new();
        self.legal_moves_into(&mut out);
        out
    }

    /// [`legal_moves`](Self::legal_moves) into a reusable buffer.
    pub fn legal_moves_into(&self, out: &mut Vec<Move>) {
        out.clear();
        let top = self.i_max();
        let c = &self.counts;
        if c[1] >= 2 {
            out.push(Move::AddOnes);
        }
        for k in 2..=top {
            if c[k - 1] >= 1 && c[k] >= 1 {
                out.push(Move::Combine(k));
            }
        }
        if top >= 2 && c[2] >= 2 {
            out.push(Move::SplitTwos);
        }
        for (k, &ck) in c.iter().enumerate().take(top + 1).skip(3) {
            if ck >= 2 {
                out.push(Move::Split(k));
            }
        }
    }

    /// No repeated terms and no two adjacent indices.
    pub fn is_terminal(&self) -> bool {
        let c = &self.counts;
        c.iter().all(|&x| x <= 1) && c.windows(2).all(|w| w[0] == 0 || w[1] == 0)
    }

    /// Indices present, ascending, with multiplicity.
    pub fn indices(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
            .collect()
    }

    pub fn matches(&self, decomp: &ZeckDecomposition) -> bool {
        self.n == decomp.n && self.is_terminal() && self.indices() == decomp.indices
    }

    /// Applies a legal move and records it in `tally`.
    pub fn apply_move(&mut self, mv: Move, tally: &mut MoveTally) -> Result<()> {
        if !self.is_legal(mv) {
            return Err(Error::IllegalMove {
                mv,
                state: self.to_string(),
            });
        }
        let c = &mut self.counts;
        match mv {
            Move::AddOnes => {
                c[1] -= 2;
                c[2] += 1;
            }
            Move::Combine(k) => {
                c[k - 1] -= 1;
                c[k] -= 1;
                c[k + 1] += 1;
            }
            Move::SplitTwos => {
                c[2] -= 2;
                c[1] += 1;
                c[3] += 1;
            }
            Move::Split(k) => {
                c[k] -= 2;
                c[k - 2] += 1;
                c[k + 1] += 1;
            }
        }
        let top = self.counts.len() - 1;
        if self.counts[top] != 0 {
            return Err(Error::IndexAboveMax {
                i_max: self.i_max(),
                state: self.to_string(),
            });
        }
        tally.record(mv);
        Ok(())
    }
}

/// Canonical text form: ascending `index^count` pairs joined by `,`,
/// zero counts omitted, e.g. `1^2,2^1`.
impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.counts.iter().enumerate().filter(|(_, &c)| c > 0) {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{i}^{c}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for GameState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseState(s.to_string());
        let mut pairs = Vec::new();
        let mut last = 0usize;
        for part in s.split(',') {
            let (i, c) = part.split_once('^').ok_or_else(bad)?;
            let i: usize = i.parse().map_err(|_| bad())?;
            let c: u64 = c.parse().map_err(|_| bad())?;
            if i <= last || c == 0 {
                return Err(bad());
            }
            last = i;
            pairs.push((i, c));
        }
        GameState::from_counts(&pairs)
    }
}

/// Per-index move counters for one game.
///
/// `mc[k - 1]` counts combining moves at `k` (index 1 is AddOnes) and
/// `ms[k - 2]` counts splitting moves at `k` (index 2 is SplitTwos).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveTally {
    pub mc: Vec<u64>,
    pub ms: Vec<u64>,
    pub total_moves: u64,
}

impl MoveTally {
    pub fn new(i_max: usize) -> Self {
        Self {
            mc: vec![0; i_max],
            ms: vec![0; i_max.saturating_sub(1)],
            total_moves: 0,
        }
    }

    pub fn for_state(state: &GameState) -> Self {
        Self::new(state.i_max())
    }

    fn record(&mut self, mv: Move) {
        let k = mv.index();
        if mv.is_combining() {
            self.mc[k - 1] += 1;
        } else {
            self.ms[k - 2] += 1;
        }
        self.total_moves += 1;
    }

    /// Combining moves at index `k >= 1`.
    pub fn mc(&self, k: usize) -> u64 {
        k.checked_sub(1)
            .and_then(|i| self.mc.get(i))
            .copied()
            .unwrap_or(0)
    }

    /// Splitting moves at index `k >= 2`.
    pub fn ms(&self, k: usize) -> u64 {
        k.checked_sub(2)
            .and_then(|i| self.ms.get(i))
            .copied()
            .unwrap_or(0)
    }

    pub fn combines(&self) -> u64 {
        self.mc.iter().sum()
    }

    pub fn splits(&self) -> u64 {
        self.ms.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &str, lhs: i64, rhs: i64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            passed: lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub lower: u64,
    pub total: u64,
    pub upper: u64,
    pub passed: bool,
}

/// Exact identities every completed game satisfies. A failed check means an
/// engine bug, not a property of the game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: u64,
    /// `sum_{k>=3} (k-2) mc[k] + sum_{k>=3} ms[k] = n - IZ(n)`
    pub index_sum: IdentityCheck,
    /// `sum_k mc[k] = n - Z(n)`
    pub combine_count: IdentityCheck,
    /// `ms[2] + ms[3] = 2 mc[1] + mc[2] - n + delta_1`: the `F_1` count
    /// drops by 2 on AddOnes and by 1 on Combine(2), and rises by 1 on
    /// SplitTwos and Split(3).
    pub ones_balance: IdentityCheck,
    /// `n - Z(n) <= total <= 3n - 3Z(n) - IZ(n) + 1`
    pub bounds: BoundsCheck,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.index_sum.passed
            && self.combine_count.passed
            && self.ones_balance.passed
            && self.bounds.passed
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = [&self.index_sum, &self.combine_count, &self.ones_balance]
            .into_iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {} != {}", c.name, c.lhs, c.rhs))
            .collect();
        if !self.bounds.passed {
            let b = &self.bounds;
            out.push(format!(
                "bounds: {} <= {} <= {} fails",
                b.lower, b.total, b.upper
            ));
        }
        out
    }
}

pub fn verify_tally(n: u64, tally: &MoveTally) -> Result<VerificationReport> {
    Ok(verify_tally_with(&zeckendorf(n)?, tally))
}

pub fn verify_tally_with(decomp: &ZeckDecomposition, tally: &MoveTally) -> VerificationReport {
    let n = decomp.n as i64;
    let z = decomp.z as i64;
    let iz = decomp.iz as i64;
    let delta1 = decomp.delta1 as i64;
    let mc = |k: usize| tally.mc(k) as i64;
    let ms = |k: usize| tally.ms(k) as i64;
    let top = tally.mc.len().max(tally.ms.len() + 1);

    let weighted: i64 = (3..=top).map(|k| (k as i64 - 2) * mc(k) + ms(k)).sum();
    let combines: i64 = (1..=top).map(mc).sum();

    let b = move_bounds_for(decomp);
    let total = tally.total_moves;
    VerificationReport {
        n: decomp.n,
        index_sum: IdentityCheck::new("index_sum", weighted, n - iz),
        combine_count: IdentityCheck::new("combine_count", combines, n - z),
        ones_balance: IdentityCheck::new(
            "ones_balance",
            ms(2) + ms(3),
            2 * mc(1) + mc(2) - n + delta1,
        ),
        bounds: BoundsCheck {
            lower: b.lower,
            total,
            upper: b.upper,
            passed: b.lower <= total && total <= b.upper,
        },
    }
}

/// A game in progress on a fixed `n`, with the per-move progress check.
#[derive(Debug, Clone)]
pub struct Game {
    table: FibTable,
    state: GameState,
    tally: MoveTally,
}

impl Game {
    pub fn new(n: u64) -> Result<Self> {
        let table = FibTable::new(n)?;
        let state = GameState::initial(&table);
        let tally = MoveTally::for_state(&state);
        Ok(Self {
            table,
            state,
            tally,
        })
    }

    pub fn table(&self) -> &FibTable {
        &self.table
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn tally(&self) -> &MoveTally {
        &self.tally
    }

    pub fn is_over(&self) -> bool {
        self.state.is_terminal()
    }

    pub fn play(&mut self, mv: Move) -> Result<()> {
        let before = self.state.progress();
        self.state.apply_move(mv, &mut self.tally)?;
        if self.state.progress() >= before {
            return Err(Error::ProgressViolation {
                mv,
                state: self.state.to_string(),
            });
        }
        Ok(())
    }

    pub fn into_parts(self) -> (FibTable, GameState, MoveTally) {
        (self.table, self.state, self.tally)
    }
}
