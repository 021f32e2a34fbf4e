//! Memoized Stirling tables, built row by row from their recurrences.

use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Which kind of Stirling number a doubly-extended argument pair is read as.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StirlingKind {
    /// `{n, m}`: set partitions of an n-set into m blocks.
    Second,
    /// `[n, m]`: permutations of n letters with m cycles (unsigned).
    First,
}

/// Growable triangles of Stirling numbers. Row `n` stores `m = 0..=n`.
///
/// Rows are appended under a write lock and never modified afterwards, so a
/// value read once is the value every later reader sees.
#[derive(Debug, Default)]
pub struct StirlingCache {
    second_kind: RwLock<Vec<Vec<BigInt>>>,
    first_kind_unsigned: RwLock<Vec<Vec<BigInt>>>,
}

impl StirlingCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn second(&self, n: u32, m: u32) -> BigInt {
        Self::lookup(&self.second_kind, n, m, |prev, j, _| {
            // {n+1, m} = {n, m-1} + m {n, m}
            let left = if j == 0 {
                BigInt::zero()
            } else {
                prev[j - 1].clone()
            };
            let stay = prev.get(j).map(|v| v * BigInt::from(j)).unwrap_or_default();
            left + stay
        })
    }

    pub fn first_unsigned(&self, n: u32, m: u32) -> BigInt {
        Self::lookup(&self.first_kind_unsigned, n, m, |prev, j, row_index| {
            // [n+1, m] = [n, m-1] + n [n, m]
            let left = if j == 0 {
                BigInt::zero()
            } else {
                prev[j - 1].clone()
            };
            let stay = prev
                .get(j)
                .map(|v| v * BigInt::from(row_index))
                .unwrap_or_default();
            left + stay
        })
    }

    /// Number of rows currently materialized for each kind.
    pub fn rows(&self) -> (usize, usize) {
        (
            self.second_kind.read().unwrap().len(),
            self.first_kind_unsigned.read().unwrap().len(),
        )
    }

    fn lookup(
        table: &RwLock<Vec<Vec<BigInt>>>,
        n: u32,
        m: u32,
        next: impl Fn(&[BigInt], usize, usize) -> BigInt,
    ) -> BigInt {
        if m > n {
            return BigInt::zero();
        }
        let (n, m) = (n as usize, m as usize);
        {
            let rows = table.read().unwrap();
            if let Some(row) = rows.get(n) {
                return row[m].clone();
            }
        }
        let mut rows = table.write().unwrap();
        if rows.is_empty() {
            rows.push(vec![BigInt::one()]);
        }
        while rows.len() <= n {
            let prev_index = rows.len() - 1;
            let prev = &rows[prev_index];
            let row: Vec<BigInt> = (0..=prev_index + 1)
                .map(|j| next(prev, j, prev_index))
                .collect();
            rows.push(row);
        }
        rows[n][m].clone()
    }
}
