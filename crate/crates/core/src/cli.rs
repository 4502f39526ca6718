//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on a computation error (cap exceeded, an
//! identity failure in `verify`, ...), 2 on a usage error. JSON output
//! carries a top-level `"schema": 1`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{enumerate, solve_winner, GameGraphStats, Winner, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::fibcore::{move_bounds_for, zeckendorf_with, FibTable, MoveBounds, PHI};
use crate::stats::{
    batch_conjectures, growth_scan, normality_report, par_map, run_batch, BatchConfig, BatchSummary,
    ConjectureCheck, NormalityReport, MIN_NORMALITY_GAMES,
};
use crate::strategies::{play_out, Strategy};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "zeckgame", version, about = "Two-player Zeckendorf game toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeckendorf decomposition of N
    Decompose {
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Play one game and verify its move tally
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        /// Seed for `random`
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Play many random games and summarize splitting-move counts
    Batch {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        games: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u64).range(1..))]
        bins: u64,
        /// Histogram of standardized split counts over [-5, 5]
        #[arg(long)]
        standardize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// `json` writes the summary, `csv` one row per game
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        threads: u64,
    },
    /// Longest/shortest game over all plays on N
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        cap: usize,
    },
    /// Winner under optimal play on N
    Solve {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        cap: usize,
    },
    /// Total moves of a deterministic strategy on consecutive N
    Growth {
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        start: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        /// Growth constant; a number, or `phi2` for the golden mean squared
        #[arg(long, value_parser = parse_constant)]
        constant: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        threads: u64,
    },
    /// Check the exact move identities over a range of N
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        from: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        to: u64,
        /// `all`, `deterministic`, or a comma-separated list of names
        #[arg(long, default_value = "all")]
        strategies: String,
        /// Random games per N when `random` is selected
        #[arg(long, default_value_t = 10)]
        random_games: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        threads: u64,
    },
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_constant(s: &str) -> std::result::Result<f64, String> {
    match s {
        "phi2" | "phi^2" => Ok(PHI * PHI),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|c| c.is_finite())
            .ok_or_else(|| format!("invalid constant `{s}`")),
    }
}

/// Selection for `verify`.
fn parse_strategy_list(s: &str) -> std::result::Result<(Vec<Strategy>, bool), String> {
    match s {
        "all" => Ok((Strategy::DETERMINISTIC.to_vec(), true)),
        "deterministic" => Ok((Strategy::DETERMINISTIC.to_vec(), false)),
        list => {
            let mut det = Vec::new();
            let mut random = false;
            for name in list.split(',') {
                match parse_strategy(name.trim())? {
                    Strategy::Random { .. } => random = true,
                    s => det.push(s),
                }
            }
            Ok((det, random))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: u32,
    #[serde(flatten)]
    pub body: T,
}

fn envelope<T>(body: T) -> Envelope<T> {
    Envelope {
        schema: SCHEMA_VERSION,
        body,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeOutput {
    pub n: u64,
    pub indices: Vec<usize>,
    pub values: Vec<u64>,
    pub z: u64,
    pub iz: u64,
    pub delta1: u64,
    pub i_max: usize,
    pub bounds: MoveBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    #[serde(flatten)]
    pub summary: BatchSummary,
    pub normality: Option<NormalityReport>,
    pub conjectures: Vec<ConjectureCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateOutput {
    #[serde(flatten)]
    pub stats: GameGraphStats,
    pub winner: Winner,
    pub upper_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyFailure {
    pub n: u64,
    pub strategy: String,
    pub seed: Option<u64>,
    pub problems: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub from: u64,
    pub to: u64,
    pub strategies: Vec<String>,
    pub random_games_per_n: u64,
    pub games_checked: u64,
    pub failures: Vec<VerifyFailure>,
    pub passed: bool,
}

enum Output {
    Json(String),
    Text(String),
}

fn json<T: Serialize>(body: T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&envelope(body)).map_err(|e| Error::Domain(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Domain(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
}

/// Runs the CLI on `argv` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run_cli_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    if let Command::Verify { from, to, .. } = &cli.command {
        if from > to {
            let _ = writeln!(err, "error: --from ({from}) must not exceed --to ({to})");
            return 2;
        }
    }
    if let Command::Verify { strategies, .. } = &cli.command {
        if let Err(e) = parse_strategy_list(strategies) {
            let _ = writeln!(err, "error: --strategies: {e}");
            return 2;
        }
    }

    let (result, target) = execute(cli.command);
    match result {
        Ok((output, ok)) => {
            let text = match output {
                Output::Json(s) | Output::Text(s) => s,
            };
            let written = match target {
                Some(path) => fs::write(&path, text.as_bytes()).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
            if ok {
                0
            } else {
                let _ = writeln!(err, "error: verification failed");
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

type Executed = (Result<(Output, bool)>, Option<PathBuf>);

fn execute(command: Command) -> Executed {
    match command {
        Command::Decompose { n } => (decompose(n).map(|o| (o, true)), None),
        Command::Simulate { n, strategy, seed } => (
            play_out(strategy.with_seed(seed), n).and_then(|r| Ok((Output::Json(json(r)?), true))),
            None,
        ),
        Command::Batch {
            n,
            games,
            seed,
            bins,
            standardize,
            out,
            format,
            threads,
        } => {
            let cfg = BatchConfig {
                n,
                games: games as usize,
                master_seed: seed,
                bins: bins as usize,
                standardized: standardize,
                threads: threads as usize,
            };
            (batch(&cfg, format).map(|o| (o, true)), out)
        }
        Command::Enumerate { n, cap } => (enumerate_cmd(n, cap).map(|o| (o, true)), None),
        Command::Solve { n, cap } => (
            solve_winner(n, cap).and_then(|r| Ok((Output::Json(json(r)?), true))),
            None,
        ),
        Command::Growth {
            strategy,
            start,
            count,
            constant,
            out,
            format,
            threads,
        } => {
            let res = growth_scan(strategy, start, count as usize, constant, threads as usize).and_then(|g| {
                Ok(match format {
                    Format::Json => Output::Json(json(&g)?),
                    Format::Csv => Output::Text(csv_string(&g.rows)?),
                })
            });
            (res.map(|o| (o, true)), out)
        }
        Command::Verify {
            from,
            to,
            strategies,
            random_games,
            seed,
            threads,
        } => (
            verify(from, to, &strategies, random_games, seed, threads as usize).and_then(|s| {
                let ok = s.passed;
                Ok((Output::Json(json(s)?), ok))
            }),
            None,
        ),
    }
}

fn decompose(n: u64) -> Result<Output> {
    let table = FibTable::new(n)?;
    let d = zeckendorf_with(&table, n);
    let out = DecomposeOutput {
        n,
        values: d.values(&table),
        bounds: move_bounds_for(&d),
        indices: d.indices,
        z: d.z,
        iz: d.iz,
        delta1: d.delta1,
        i_max: table.i_max(),
    };
    Ok(Output::Json(json(out)?))
}

fn batch(cfg: &BatchConfig, format: Format) -> Result<Output> {
    let outcome = run_batch(cfg)?;
    if let Format::Csv = format {
        return Ok(Output::Text(csv_string(&outcome.rows)?));
    }
    let normality = if cfg.games >= MIN_NORMALITY_GAMES && outcome.summary.splits_variance > 0.0 {
        Some(normality_report(&outcome.splits())?)
    } else {
        None
    };
    let conjectures = batch_conjectures(&outcome.summary, normality.as_ref());
    Ok(Output::Json(json(BatchReport {
        summary: outcome.summary,
        normality,
        conjectures,
    })?))
}

fn enumerate_cmd(n: u64, cap: usize) -> Result<Output> {
    let stats = enumerate(n, cap)?;
    let winner = solve_winner(n, cap)?.winner;
    let upper_bound = move_bounds_for(&zeckendorf_with(&FibTable::new(n)?, n)).upper;
    Ok(Output::Json(json(EnumerateOutput {
        stats,
        winner,
        upper_bound,
    })?))
}

/// Plays every selected strategy on every `n` in `from..=to` and collects
/// anything that breaks an exact identity.
pub fn verify(from: u64, to: u64, strategies: &str, random_games: u64, seed: u64, threads: usize) -> Result<VerifySummary> {
    let (det, with_random) = parse_strategy_list(strategies).map_err(Error::Domain)?;
    let per_n_random = if with_random { random_games } else { 0 };
    let count = (to - from + 1) as usize;
    let per_n = par_map(threads, count, |i| {
        let n = from + i as u64;
        let mut failures = Vec::new();
        let mut checked = 0u64;
        let randoms = (0..per_n_random).map(|j| Strategy::Random {
            seed: seed.wrapping_add(i as u64 * per_n_random + j),
        });
        for strategy in det.iter().copied().chain(randoms) {
            let rec = play_out(strategy, n)?;
            checked += 1;
            let mut problems = rec.report.failures();
            if !rec.final_is_zeckendorf {
                problems.push(format!("final state {} is not the decomposition", rec.final_state));
            }
            let realizes_lower = matches!(
                strategy,
                Strategy::CombineLargest | Strategy::SplitLargest | Strategy::Greedy
            );
            if realizes_lower && (rec.splits != 0 || rec.total_moves != rec.report.bounds.lower) {
                problems.push(format!(
                    "expected n - Z(n) = {} moves with no splits, got {} moves and {} splits",
                    rec.report.bounds.lower, rec.total_moves, rec.splits
                ));
            }
            if !problems.is_empty() {
                failures.push(VerifyFailure {
                    n,
                    strategy: rec.strategy,
                    seed: rec.seed,
                    problems,
                });
            }
        }
        Ok((checked, failures))
    })?;

    let mut names: Vec<String> = det.iter().map(|s| s.name().to_string()).collect();
    if with_random {
        names.push("random".into());
    }
    let games_checked = per_n.iter().map(|(c, _)| c).sum();
    let failures: Vec<VerifyFailure> = per_n.into_iter().flat_map(|(_, f)| f).collect();
    Ok(VerifySummary {
        from,
        to,
        strategies: names,
        random_games_per_n: per_n_random,
        games_checked,
        passed: failures.is_empty(),
        failures,
    })
}
