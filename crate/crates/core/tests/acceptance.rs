//! Acceptance criteria, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL|CONJECTURE-MISMATCH ...` line; run with
//! `--nocapture` to see them.
//!
//! Criteria 6 and 7 are conjecture-level: a miss is reported but does not
//! fail the build.

use std::process::Command;
use std::time::{Duration, Instant};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use zeckgame::analysis::{enumerate, solve_winner, Winner, DEFAULT_STATE_CAP};
use zeckgame::cli::run_cli_with;
use zeckgame::engine::{verify_tally_with, Game, GameState, Move, MoveTally};
use zeckgame::fibcore::{move_bounds_for, zeckendorf_with, FibTable, ZeckDecomposition, PHI};
use zeckgame::stats::{growth_scan, normality_report, run_batch, BatchConfig};
use zeckgame::strategies::{play_out, Strategy};

fn report(id: &str, passed: bool, detail: &str) {
    println!("criterion {id}: {} {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {id} failed: {detail}");
}

fn report_conjecture(id: &str, passed: bool, detail: &str) {
    println!(
        "criterion {id}: {} {detail}",
        if passed { "PASS" } else { "CONJECTURE-MISMATCH" }
    );
}

fn within(id: &str, start: Instant, target: Duration) -> String {
    let took = start.elapsed();
    assert!(took <= target, "criterion {id} took {took:?}, target {target:?}");
    format!("[{:.2}s, target {}s]", took.as_secs_f64(), target.as_secs())
}

fn decompositions(to: u64) -> (FibTable, Vec<ZeckDecomposition>) {
    let table = FibTable::new(to).unwrap();
    let d = (1..=to).map(|n| zeckendorf_with(&table, n)).collect();
    (table, d)
}

#[test]
fn criterion_1_decomposition_of_2020() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli_with(["zeckgame", "decompose", "2020"], &mut out, &mut err);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let indices: Vec<u64> = serde_json::from_value(v["indices"].clone()).unwrap();
    let values: Vec<u64> = serde_json::from_value(v["values"].clone()).unwrap();
    let ok = code == 0
        && indices == [1, 3, 5, 8, 13, 16]
        && values == [1, 3, 8, 34, 377, 1597]
        && values.iter().sum::<u64>() == 2020
        && v["z"] == 6
        && v["iz"] == 46;
    report("1", ok, &format!("2020 = F16+F13+F8+F5+F3+F1, indices {indices:?}"));
}

#[test]
fn criterion_2_combine_and_split_largest_realize_lower_bound() {
    let start = Instant::now();
    let (_, decomps) = decompositions(5000);
    let mut bad = Vec::new();
    let mut games = 0;
    for n in 3..=5000u64 {
        let lower = n - decomps[n as usize - 1].z;
        for s in [Strategy::CombineLargest, Strategy::SplitLargest, Strategy::Greedy] {
            let r = play_out(s, n).unwrap();
            games += 1;
            if r.total_moves != lower || r.splits != 0 {
                bad.push((n, s.name(), r.total_moves, r.splits));
            }
        }
    }
    let t = within("2", start, Duration::from_secs(10));
    report(
        "2",
        bad.is_empty(),
        &format!("{games} games on n in 3..=5000, violations {:?} {t}", &bad[..bad.len().min(5)]),
    );
}

/// Every game criterion 3 covers: all deterministic strategies on
/// `3..=5000` and 1000 seeded random games at each of 100, 500, 2020.
fn criterion_3_games() -> Vec<(Strategy, u64)> {
    let mut games: Vec<(Strategy, u64)> = (3..=5000u64)
        .flat_map(|n| Strategy::DETERMINISTIC.into_iter().map(move |s| (s, n)))
        .collect();
    for (k, n) in [100u64, 500, 2020].into_iter().enumerate() {
        games.extend((0..1000u64).map(|j| (Strategy::Random { seed: k as u64 * 1000 + j }, n)));
    }
    games
}

#[test]
fn criterion_3_exact_identities() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let games = criterion_3_games();
    for &(s, n) in &games {
        let r = play_out(s, n).unwrap();
        if !r.report.all_passed() {
            failures.push(format!("{s} n={n}: {}", r.report.failures().join("; ")));
        }
    }
    let t = within("3", start, Duration::from_secs(60));
    report(
        "3",
        failures.is_empty(),
        &format!(
            "(a) index sum, (b) combine count, (c) ones balance with weight 1 on mc2, (d) bounds over {} games, {} failures {:?} {t}",
            games.len(),
            failures.len(),
            &failures[..failures.len().min(3)]
        ),
    );
}

/// Identity (c) with the weight `2 mc2` exactly as the criterion writes it.
/// Combine(2) removes one `F_1`, not two, so this form fails on every game
/// that plays Combine(2) at all.
#[test]
fn criterion_3c_ones_balance_as_written() {
    let (_, decomps) = decompositions(5000);
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for (s, n) in criterion_3_games() {
        let r = play_out(s, n).unwrap();
        let t = &r.tally;
        let d = &decomps[n as usize - 1];
        let lhs = (t.ms(2) + t.ms(3)) as i64;
        let rhs = 2 * t.mc(1) as i64 + 2 * t.mc(2) as i64 - n as i64 + d.delta1 as i64;
        checked += 1;
        if lhs != rhs {
            failures.push((s.name(), n, lhs, rhs, t.mc(2)));
        }
    }
    report(
        "3(c) as written",
        failures.is_empty(),
        &format!(
            "ms2+ms3 = 2mc1+2mc2-n+delta1 over {checked} games: {} failures, first {:?} (strategy, n, lhs, rhs, mc2)",
            failures.len(),
            failures.first()
        ),
    );
}

#[test]
fn criterion_4_exhaustive_lengths() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 1..=30u64 {
        let stats = enumerate(n, DEFAULT_STATE_CAP).unwrap();
        let table = FibTable::new(n).unwrap();
        let d = zeckendorf_with(&table, n);
        let b = move_bounds_for(&d);
        let ss = play_out(Strategy::SplitSmallest, n).unwrap().total_moves;
        let ofss = play_out(Strategy::OnesFirstSplitSmallest, n).unwrap().total_moves;
        let ok = stats.shortest == n - d.z && stats.longest == ss && stats.longest == ofss && stats.longest <= b.upper;
        if !ok {
            bad.push((n, stats.shortest, stats.longest, ss, ofss, b.upper));
        }
    }
    let four = enumerate(4, DEFAULT_STATE_CAP).unwrap();
    let t = within("4", start, Duration::from_secs(300));
    report(
        "4",
        bad.is_empty() && (four.longest, four.shortest) == (3, 2),
        &format!("n <= 30, n=4 -> longest {} shortest {}, mismatches {bad:?} {t}", four.longest, four.shortest),
    );
}

#[test]
fn criterion_5_player_two_wins() {
    let start = Instant::now();
    let mut bad = Vec::new();
    if solve_winner(2, DEFAULT_STATE_CAP).unwrap().winner != Winner::One {
        bad.push(2);
    }
    for n in 3..=18 {
        if solve_winner(n, DEFAULT_STATE_CAP).unwrap().winner != Winner::Two {
            bad.push(n);
        }
    }
    let t = within("5", start, Duration::from_secs(300));
    report("5", bad.is_empty(), &format!("n=2 -> one, 3..=18 -> two, wrong at {bad:?} {t}"));
}

#[test]
fn criterion_6_growth_constants() {
    let n = 1_600_000;
    for (strategy, c, label) in [
        (Strategy::SplitSmallest, PHI * PHI, "phi^2"),
        (Strategy::CombineSmallest, 1.20647, "1.20647"),
    ] {
        let start = Instant::now();
        let g = growth_scan(strategy, n, 1, c, 1).unwrap();
        let row = &g.rows[0];
        let ratio = row.total_moves as f64 / n as f64;
        let t = within("6", start, Duration::from_secs(30));
        report_conjecture(
            "6",
            (ratio - c).abs() <= 0.01,
            &format!("{strategy} n={n}: total {} total/n {ratio:.6} vs {label} (tol 0.01) {t}", row.total_moves),
        );
    }
}

#[test]
fn criterion_7_random_split_distribution() {
    let start = Instant::now();
    let out = run_batch(&BatchConfig::new(10_000, 10_000, 0)).unwrap();
    let s = &out.summary;
    let r = normality_report(&out.splits()).unwrap();
    let t = within("7", start, Duration::from_secs(120));
    let ok = (0.20..=0.23).contains(&s.splits_mean_per_n)
        && r.skewness.abs() < 0.1
        && r.excess_kurtosis.abs() < 0.3
        && r.ks_below_critical;
    report_conjecture(
        "7",
        ok,
        &format!(
            "mean/n {:.4} in [0.20,0.23], var/n {:.4}, skew {:.4}, ex.kurt {:.4}, KS {:.5} < {:.5} {t}",
            s.splits_mean_per_n, s.splits_variance_per_n, r.skewness, r.excess_kurtosis, r.ks_statistic, r.ks_critical_1pct
        ),
    );
}

/// Term count and index sum straight from the multiplicities.
fn terms_and_index_sum(s: &GameState) -> (i64, i64) {
    let c = s.counts();
    let terms = c.iter().sum::<u64>() as i64;
    let isum = c.iter().enumerate().map(|(i, &x)| i as u64 * x).sum::<u64>() as i64;
    (terms, isum)
}

/// Expected (term delta, index-sum delta) per move kind.
fn expected_deltas(mv: Move) -> (i64, i64) {
    match mv {
        Move::AddOnes => (-1, 0),
        Move::Combine(k) => (-1, -(k as i64 - 2)),
        Move::SplitTwos => (0, 0),
        Move::Split(_) => (0, -1),
    }
}

#[test]
fn criterion_8_property_fuzz() {
    let start = Instant::now();
    let mut rng = SplitMix64::seed_from_u64(0x5eed);
    let mut violations: Vec<String> = Vec::new();
    let mut moves = 0u64;
    for game_index in 0..10_000u64 {
        let n = 3 + rng.next_u64() % 1998;
        let mut game = Game::new(n).unwrap();
        let i_max = game.table().i_max();
        let mut selector = Strategy::Random { seed: game_index }.selector();
        let mut buf = Vec::new();
        loop {
            let state = game.state().clone();
            state.legal_moves_into(&mut buf);
            if state.is_terminal() != buf.is_empty() {
                violations.push(format!("n={n}: terminal/legal mismatch at {state}"));
            }
            if buf.is_empty() {
                break;
            }
            let mv = selector.select(&state).unwrap();
            game.play(mv).unwrap();
            moves += 1;
            let after = game.state();
            let (t0, i0) = terms_and_index_sum(&state);
            let (t1, i1) = terms_and_index_sum(after);
            if after.value(game.table()) != n {
                violations.push(format!("n={n}: value not conserved after {mv}"));
            }
            if (t1 - t0, i1 - i0) != expected_deltas(mv) {
                violations.push(format!("n={n}: {mv} changed (terms, index sum) by {:?}", (t1 - t0, i1 - i0)));
            }
            if after.counts().iter().skip(i_max + 1).any(|&c| c > 0) {
                violations.push(format!("n={n}: term above i_max after {mv}"));
            }
        }
        let (table, end, _): (_, GameState, MoveTally) = game.into_parts();
        if !end.matches(&zeckendorf_with(&table, n)) {
            violations.push(format!("n={n}: ended at {end}"));
        }
    }
    let t = within("8", start, Duration::from_secs(60));
    report(
        "8",
        violations.is_empty(),
        &format!("10000 random games, {moves} moves, {} violations {:?} {t}", violations.len(), violations.first()),
    );
}

#[test]
fn criterion_8_verify_tally_on_fuzzed_games() {
    // the exact identities also hold for the fuzzed games
    let mut rng = SplitMix64::seed_from_u64(0xfeed);
    let (_, decomps) = decompositions(2000);
    for seed in 0..500u64 {
        let n = 3 + rng.next_u64() % 1998;
        let r = play_out(Strategy::Random { seed }, n).unwrap();
        assert!(verify_tally_with(&decomps[n as usize - 1], &r.tally).all_passed());
    }
}

#[test]
fn criterion_9_batch_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for format in ["json", "csv"] {
        let mut pair = Vec::new();
        for threads in ["1", "8"] {
            let path = dir.path().join(format!("batch-{threads}.{format}"));
            let status = Command::new(env!("CARGO_BIN_EXE_zeckgame"))
                .args(["batch", "--n", "3000", "--games", "1200", "--seed", "17", "--bins", "30"])
                .args(["--format", format, "--threads", threads, "--out"])
                .arg(&path)
                .status()
                .unwrap();
            assert!(status.success());
            pair.push(std::fs::read(&path).unwrap());
        }
        outputs.push((format, pair[0] == pair[1], pair[0].len()));
    }
    report(
        "9",
        outputs.iter().all(|&(_, same, len)| same && len > 0),
        &format!("--threads 1 vs 8 byte-identical (format, identical, bytes): {outputs:?}"),
    );
}
