//! Batch simulation of random games and move-count statistics.
//!
//! Every game in a batch has the same number of combining moves, so a
//! batch is summarized by its splitting-move counts. Moments use two passes
//! over the samples. Results do not depend on the thread count: games are
//! collected in index order before any aggregation.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibcore::zeckendorf;
use crate::strategies::{play_out, Strategy};

/// Runs `f(0..count)` on `threads` workers and returns results in index
/// order. One thread runs inline on the caller.
pub fn par_map<T, F>(threads: usize, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if threads <= 1 {
        return (0..count).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    pool.install(|| (0..count).into_par_iter().map(f).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchConfig {
    pub n: u64,
    pub games: usize,
    pub master_seed: u64,
    pub bins: usize,
    /// Histogram of `(x - mean) / stddev` over `[-5, 5]` instead of raw counts.
    pub standardized: bool,
    pub threads: usize,
}

impl BatchConfig {
    pub fn new(n: u64, games: usize, master_seed: u64) -> Self {
        Self {
            n,
            games,
            master_seed,
            bins: 40,
            standardized: false,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRow {
    pub game_index: u64,
    pub seed: u64,
    pub total_moves: u64,
    pub splits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub n: u64,
    pub games: usize,
    pub master_seed: u64,
    pub combines: u64,
    pub splits_mean: f64,
    /// Sample variance, `games - 1` divisor.
    pub splits_variance: f64,
    pub splits_mean_per_n: f64,
    pub splits_variance_per_n: f64,
    /// `None` when the variance is zero.
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub bin_width: f64,
    pub standardized: bool,
    pub histogram: Vec<HistogramBin>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutcome {
    pub summary: BatchSummary,
    pub rows: Vec<GameRow>,
}

impl BatchOutcome {
    pub fn splits(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.splits as f64).collect()
    }
}

/// Two-pass central moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    /// Population central moments.
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl Moments {
    pub fn from_samples(xs: &[f64]) -> Self {
        let count = xs.len();
        let k = count as f64;
        let mean = xs.iter().sum::<f64>() / k;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &x in xs {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        Self {
            count,
            mean,
            m2: m2 / k,
            m3: m3 / k,
            m4: m4 / k,
        }
    }

    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.m2 * self.count as f64 / (self.count as f64 - 1.0)
    }

    pub fn skewness(&self) -> Option<f64> {
        (self.m2 > 0.0).then(|| self.m3 / self.m2.powf(1.5))
    }

    pub fn excess_kurtosis(&self) -> Option<f64> {
        (self.m2 > 0.0).then(|| self.m4 / (self.m2 * self.m2) - 3.0)
    }
}

/// Unit-or-wider integer bins from `min` to `max`: the width is the
/// smallest integer giving at most `bins` bins.
fn integer_histogram(xs: &[u64], bins: usize) -> (f64, Vec<HistogramBin>) {
    let lo = *xs.iter().min().unwrap();
    let hi = *xs.iter().max().unwrap();
    let span = hi - lo + 1;
    let width = span.div_ceil(bins as u64);
    let nbins = span.div_ceil(width) as usize;
    let mut counts = vec![0u64; nbins];
    for &x in xs {
        counts[((x - lo) / width) as usize] += 1;
    }
    let hist = counts
        .into_iter()
        .enumerate()
        .map(|(j, count)| HistogramBin {
            bin_left: (lo + j as u64 * width) as f64,
            count,
        })
        .collect();
    (width as f64, hist)
}

/// `bins` equal bins over `[-5, 5]`; values outside land in the edge bins.
fn standardized_histogram(xs: &[f64], m: &Moments, bins: usize) -> Result<(f64, Vec<HistogramBin>)> {
    let sd = m.sample_variance().sqrt();
    if sd == 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let width = 10.0 / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in xs {
        let z = (x - m.mean) / sd;
        let j = ((z + 5.0) / width).floor().clamp(0.0, bins as f64 - 1.0) as usize;
        counts[j] += 1;
    }
    let hist = counts
        .into_iter()
        .enumerate()
        .map(|(j, count)| HistogramBin {
            bin_left: -5.0 + j as f64 * width,
            count,
        })
        .collect();
    Ok((width, hist))
}

/// Plays `games` random games on `n`; game `i` uses seed `master_seed + i`.
pub fn run_batch(cfg: &BatchConfig) -> Result<BatchOutcome> {
    if cfg.games < 2 {
        return Err(Error::TooFewGames {
            needed: 2,
            got: cfg.games,
        });
    }
    if cfg.bins == 0 {
        return Err(Error::Domain("bins must be at least 1".into()));
    }
    let decomp = zeckendorf(cfg.n)?;
    let combines = cfg.n - decomp.z;

    let rows = par_map(cfg.threads, cfg.games, |i| {
        let seed = cfg.master_seed.wrapping_add(i as u64);
        let rec = play_out(Strategy::Random { seed }, cfg.n)?;
        if !rec.report.all_passed() {
            return Err(Error::Identity(format!(
                "seed {seed}: {}",
                rec.report.failures().join("; ")
            )));
        }
        if rec.total_moves - combines != rec.splits {
            return Err(Error::Identity(format!(
                "seed {seed}: total - (n - Z) = {} but tally splits = {}",
                rec.total_moves - combines,
                rec.splits
            )));
        }
        Ok(GameRow {
            game_index: i as u64,
            seed,
            total_moves: rec.total_moves,
            splits: rec.splits,
        })
    })?;

    let raw: Vec<u64> = rows.iter().map(|r| r.splits).collect();
    let xs: Vec<f64> = raw.iter().map(|&s| s as f64).collect();
    let m = Moments::from_samples(&xs);
    let (bin_width, histogram) = if cfg.standardized {
        standardized_histogram(&xs, &m, cfg.bins)?
    } else {
        integer_histogram(&raw, cfg.bins)
    };
    let nf = cfg.n as f64;
    let variance = m.sample_variance();
    let summary = BatchSummary {
        n: cfg.n,
        games: cfg.games,
        master_seed: cfg.master_seed,
        combines,
        splits_mean: m.mean,
        splits_variance: variance,
        splits_mean_per_n: m.mean / nf,
        splits_variance_per_n: variance / nf,
        skewness: m.skewness(),
        excess_kurtosis: m.excess_kurtosis(),
        bin_width,
        standardized: cfg.standardized,
        histogram,
    };
    Ok(BatchOutcome { summary, rows })
}

/// Standard normal CDF through `libm::erf` (musl/FreeBSD implementation,
/// absolute error well under `1e-7`).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// One-sample Kolmogorov-Smirnov distance between the empirical CDF of
/// `xs` and `cdf`, including left limits at each jump.
pub fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / k) - f).max(f - i as f64 / k)
        })
        .fold(0.0, f64::max)
}

pub const MIN_NORMALITY_GAMES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub games: usize,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// KS distance of the standardized samples from the standard normal.
    pub ks_statistic: f64,
    /// `1.63 / sqrt(games)`.
    pub ks_critical_1pct: f64,
    pub ks_below_critical: bool,
}

pub fn normality_report(xs: &[f64]) -> Result<NormalityReport> {
    if xs.len() < MIN_NORMALITY_GAMES {
        return Err(Error::TooFewGames {
            needed: MIN_NORMALITY_GAMES,
            got: xs.len(),
        });
    }
    let m = Moments::from_samples(xs);
    let sd = m.sample_variance().sqrt();
    if sd == 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let z: Vec<f64> = xs.iter().map(|&x| (x - m.mean) / sd).collect();
    let ks = ks_statistic(&z, std_normal_cdf);
    let crit = 1.63 / (xs.len() as f64).sqrt();
    Ok(NormalityReport {
        games: xs.len(),
        skewness: m.skewness().unwrap(),
        excess_kurtosis: m.excess_kurtosis().unwrap(),
        ks_statistic: ks,
        ks_critical_1pct: crit,
        ks_below_critical: ks < crit,
    })
}

/// Box-Muller pairs from SplitMix64. Uniforms are `(x >> 11) * 2^-53`.
pub fn standard_normal_samples(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut unit = move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let mut out = Vec::with_capacity(count + 1);
    while out.len() < count {
        let u1 = 1.0 - unit();
        let u2 = unit();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        out.push(r * t.cos());
        out.push(r * t.sin());
    }
    out.truncate(count);
    out
}

/// Outcome of a conjectured numerical relation. Never an exactness failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureCheck {
    pub kind: String,
    pub name: String,
    pub value: f64,
    pub target: String,
    pub passed: bool,
}

impl ConjectureCheck {
    pub fn new(name: &str, value: f64, target: String, passed: bool) -> Self {
        Self {
            kind: "conjecture".into(),
            name: name.into(),
            value,
            target,
            passed,
        }
    }
}

/// Random-game checks at the thresholds used by the acceptance suite.
pub fn batch_conjectures(summary: &BatchSummary, normality: Option<&NormalityReport>) -> Vec<ConjectureCheck> {
    let mut out = vec![ConjectureCheck::new(
        "splits_mean_per_n",
        summary.splits_mean_per_n,
        "[0.20, 0.23]".into(),
        (0.20..=0.23).contains(&summary.splits_mean_per_n),
    )];
    if let Some(r) = normality {
        out.push(ConjectureCheck::new("skewness", r.skewness, "|x| < 0.1".into(), r.skewness.abs() < 0.1));
        out.push(ConjectureCheck::new(
            "excess_kurtosis",
            r.excess_kurtosis,
            "|x| < 0.3".into(),
            r.excess_kurtosis.abs() < 0.3,
        ));
        out.push(ConjectureCheck::new(
            "ks_statistic",
            r.ks_statistic,
            format!("< {:.6}", r.ks_critical_1pct),
            r.ks_below_critical,
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: u64,
    pub total_moves: u64,
    /// `total_moves - constant * n`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSeries {
    pub strategy: String,
    pub constant: f64,
    pub rows: Vec<GrowthRow>,
}

impl GrowthSeries {
    /// Largest `|total / n - constant|` over the rows.
    pub fn max_relative_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.residual / r.n as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Plays each `n` in `n_start..n_start + n_count` once under a
/// deterministic strategy.
pub fn growth_scan(strategy: Strategy, n_start: u64, n_count: usize, constant: f64, threads: usize) -> Result<GrowthSeries> {
    if !strategy.is_deterministic() {
        return Err(Error::StrategyNotAllowed(strategy.to_string()));
    }
    if n_count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    if n_start == 0 {
        return Err(Error::Domain("n must be a positive integer".into()));
    }
    let rows = par_map(threads, n_count, |i| {
        let n = n_start + i as u64;
        let rec = play_out(strategy, n)?;
        Ok(GrowthRow {
            n,
            total_moves: rec.total_moves,
            residual: rec.total_moves as f64 - constant * n as f64,
        })
    })?;
    Ok(GrowthSeries {
        strategy: strategy.name().to_string(),
        constant,
        rows,
    })
}
