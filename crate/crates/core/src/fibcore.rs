//! Fibonacci numbers with the game's normalization `F_1 = 1, F_2 = 2`, the
//! Zeckendorf decomposition, and the quantities derived from it.
//!
//! Indices are 1-based everywhere. `F_0` is never used: with it the
//! decomposition stops being unique.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Golden mean.
pub const PHI: f64 = 1.618_033_988_749_895;

/// `F_1..=F_{i_max + 1}` for a fixed limit `n`.
///
/// One index past `i_max` is stored so that a combine or split reaching
/// `i_max + 1` can be expressed (and then rejected) by the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibTable {
    values: Vec<u64>,
    limit: u64,
    i_max: usize,
}

impl FibTable {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be a positive integer".into()));
        }
        let mut values = vec![1u64, 2];
        while *values.last().unwrap() <= n {
            let k = values.len();
            let next = values[k - 1]
                .checked_add(values[k - 2])
                .ok_or(Error::Overflow(n))?;
            values.push(next);
        }
        // values holds F_1..=F_m with F_m > n, so i_max = m - 1
        let i_max = values.len() - 1;
        Ok(Self {
            values,
            limit: n,
            i_max,
        })
    }

    /// `F_i`. Panics for `i == 0` or `i > i_max + 1`.
    #[inline]
    pub fn fib(&self, i: usize) -> u64 {
        assert!(i >= 1, "fibonacci index 0 is not part of the game");
        self.values[i - 1]
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Largest index `m` with `F_m <= limit`.
    pub fn i_max(&self) -> usize {
        self.i_max
    }

    /// Highest stored index (`i_max + 1`).
    pub fn max_stored_index(&self) -> usize {
        self.values.len()
    }

    /// Stored values `F_1, F_2, ...`.
    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// `n = sum of F_i over indices`, no two indices adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeckDecomposition {
    pub n: u64,
    /// Strictly increasing.
    pub indices: Vec<usize>,
    /// Number of summands, `Z(n)`.
    pub z: u64,
    /// Sum of the indices, `IZ(n)`.
    pub iz: u64,
    /// 1 if `F_1` is a summand.
    pub delta1: u64,
}

impl ZeckDecomposition {
    pub fn values(&self, table: &FibTable) -> Vec<u64> {
        self.indices.iter().map(|&i| table.fib(i)).collect()
    }
}

/// Greedy decomposition: repeatedly take the largest `F_i` that fits.
pub fn zeckendorf(n: u64) -> Result<ZeckDecomposition> {
    let table = FibTable::new(n)?;
    Ok(zeckendorf_with(&table, n))
}

/// Same as [`zeckendorf`] but reuses a table built for some limit `>= n`.
pub fn zeckendorf_with(table: &FibTable, n: u64) -> ZeckDecomposition {
    assert!(n >= 1 && n <= table.limit());
    let mut indices = Vec::new();
    let mut rest = n;
    let mut i = table.i_max();
    while rest > 0 {
        while table.fib(i) > rest {
            i -= 1;
        }
        indices.push(i);
        rest -= table.fib(i);
        // the remainder is < F_{i-1}, so the next summand is at most i - 2
        i = i.saturating_sub(2).max(1);
    }
    indices.reverse();
    let z = indices.len() as u64;
    let iz = indices.iter().map(|&i| i as u64).sum();
    let delta1 = u64::from(indices.first() == Some(&1));
    ZeckDecomposition {
        n,
        indices,
        z,
        iz,
        delta1,
    }
}

/// Range of possible game lengths on `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveBounds {
    /// `n - Z(n)`: the number of combining moves, which is the same in every game.
    pub lower: u64,
    /// `3n - 3Z(n) - IZ(n) + 1`.
    pub upper: u64,
}

pub fn move_bounds(n: u64) -> Result<MoveBounds> {
    Ok(move_bounds_for(&zeckendorf(n)?))
}

pub fn move_bounds_for(decomp: &ZeckDecomposition) -> MoveBounds {
    let n = i128::from(decomp.n);
    let z = i128::from(decomp.z);
    let iz = i128::from(decomp.iz);
    let lower = n - z;
    let upper = 3 * n - 3 * z - iz + 1;
    debug_assert!(0 <= lower && lower <= upper);
    MoveBounds {
        lower: lower as u64,
        upper: upper as u64,
    }
}

pub fn log_phi(x: f64) -> f64 {
    x.ln() / PHI.ln()
}

/// `log_phi(n * sqrt 5)`, an upper bound on `i_max(n)`.
pub fn i_max_bound(n: u64) -> f64 {
    log_phi(n as f64 * 5f64.sqrt())
}

/// `(log_phi(n * sqrt 5) + 3)^2 / 2`, an upper bound on `IZ(n)`.
pub fn iz_bound(n: u64) -> f64 {
    let l = i_max_bound(n) + 3.0;
    l * l / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every subset of `1..=max_index` with no two adjacent indices whose
    /// values sum to `n`. Independent of the greedy path.
    fn brute_force_decompositions(n: u64) -> Vec<Vec<usize>> {
        let table = FibTable::new(n).unwrap();
        let m = table.i_max();
        let mut found = Vec::new();
        for mask in 0u64..(1 << m) {
            if mask & (mask >> 1) != 0 {
                continue;
            }
            let idx: Vec<usize> = (1..=m).filter(|i| mask >> (i - 1) & 1 == 1).collect();
            if idx.iter().map(|&i| table.fib(i)).sum::<u64>() == n {
                found.push(idx);
            }
        }
        found
    }

    #[test]
    fn small_tables() {
        let t = FibTable::new(1).unwrap();
        assert_eq!(t.values(), &[1, 2]);
        assert_eq!(t.i_max(), 1);

        let t = FibTable::new(100).unwrap();
        assert_eq!(t.i_max(), 10);
        assert_eq!(t.fib(10), 89);
        assert_eq!(t.fib(11), 144);

        let t = FibTable::new(2020).unwrap();
        assert_eq!(t.i_max(), 16);
        assert_eq!(t.fib(16), 1597);
    }

    #[test]
    fn table_rejects_zero() {
        assert!(matches!(FibTable::new(0), Err(Error::Domain(_))));
        assert!(matches!(zeckendorf(0), Err(Error::Domain(_))));
        assert!(matches!(move_bounds(0), Err(Error::Domain(_))));
    }

    #[test]
    fn table_overflow_is_checked() {
        // F_{i_max + 1} no longer fits in 64 bits
        assert_eq!(FibTable::new(u64::MAX), Err(Error::Overflow(u64::MAX)));
        assert!(FibTable::new(1_000_000_000_000).is_ok());
    }

    #[test]
    fn table_recurrence() {
        let t = FibTable::new(1_000_000_000_000).unwrap();
        let v = t.values();
        assert_eq!(&v[..2], &[1, 2]);
        for k in 2..v.len() {
            assert_eq!(v[k], v[k - 1] + v[k - 2]);
        }
        assert!(t.fib(t.i_max()) <= t.limit());
        assert!(t.limit() < t.fib(t.i_max() + 1));
    }

    #[test]
    fn decompose_2020() {
        let d = zeckendorf(2020).unwrap();
        assert_eq!(d.indices, vec![1, 3, 5, 8, 13, 16]);
        assert_eq!(d.z, 6);
        assert_eq!(d.iz, 46);
        assert_eq!(d.delta1, 1);
        let t = FibTable::new(2020).unwrap();
        assert_eq!(d.values(&t), vec![1, 3, 8, 34, 377, 1597]);
    }

    #[test]
    fn decompose_small() {
        let d = zeckendorf(1).unwrap();
        assert_eq!((d.indices.clone(), d.z, d.iz, d.delta1), (vec![1], 1, 1, 1));
        let d = zeckendorf(10).unwrap();
        assert_eq!(brute_force_decompositions(10), vec![vec![2, 5]]);
        assert_eq!((d.indices.clone(), d.z, d.iz, d.delta1), (vec![2, 5], 2, 7, 0));
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(move_bounds(4).unwrap(), MoveBounds { lower: 2, upper: 3 });
        assert_eq!(move_bounds(1).unwrap(), MoveBounds { lower: 0, upper: 0 });
        assert_eq!(
            move_bounds(2020).unwrap(),
            MoveBounds {
                lower: 2014,
                upper: 5997
            }
        );
    }

    #[test]
    fn unique_decomposition_up_to_200() {
        for n in 1..=200 {
            let all = brute_force_decompositions(n);
            assert_eq!(all.len(), 1, "n = {n}");
            assert_eq!(all[0], zeckendorf(n).unwrap().indices, "n = {n}");
        }
    }

    #[test]
    fn exhaustive_properties_to_10k() {
        let table = FibTable::new(10_000).unwrap();
        for n in 1..=10_000u64 {
            let d = zeckendorf_with(&table, n);
            assert!(d.indices.windows(2).all(|w| w[1] >= w[0] + 2), "n = {n}");
            assert_eq!(d.values(&table).iter().sum::<u64>(), n);
            assert_eq!(d.z, d.indices.len() as u64);
            assert!((d.iz as f64) <= iz_bound(n), "n = {n}");
            let own = FibTable::new(n).unwrap();
            assert!((own.i_max() as f64) <= i_max_bound(n), "n = {n}");
            assert_eq!(d.indices.last().copied(), Some(own.i_max()));
            let b = move_bounds_for(&d);
            assert!(b.lower <= b.upper);
        }
    }
}
