//! Enumeration of complete allocations in which every bundle is non-empty.
//!
//! An allocation of `m` goods to `n` agents is identified with the integer
//! `Σ owner(g_i)·n^i`, i.e. the base-`n` digit string whose `i`-th digit is
//! the owner of good `g_i`. Allocations are produced in ascending order of
//! that integer, which makes any index range independently resumable.

use std::ops::Range;

use thiserror::Error;

use crate::fairness::Allocation;
use crate::goodset::{GoodSet, MAX_GOODS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("cannot give {n} agents non-empty bundles from {m} goods")]
    TooManyAgents { n: usize, m: usize },
    #[error("need at least one agent")]
    NoAgents,
    #[error("{0} goods exceeds the supported maximum")]
    TooManyGoods(usize),
}

fn check(n: usize, m: usize) -> Result<(), EnumError> {
    if n == 0 {
        return Err(EnumError::NoAgents);
    }
    if m > MAX_GOODS {
        return Err(EnumError::TooManyGoods(m));
    }
    if n > m {
        return Err(EnumError::TooManyAgents { n, m });
    }
    Ok(())
}

/// Size of the digit-string space, `n^m`.
pub fn index_space(n: usize, m: usize) -> u64 {
    (n as u64).pow(m as u32)
}

/// Number of ordered partitions of `m` goods into `n` non-empty bundles,
/// `Σ_k (-1)^k C(n,k) (n-k)^m`.
pub fn count_allocations(n: usize, m: usize) -> Result<u64, EnumError> {
    check(n, m)?;
    let mut total: i128 = 0;
    let mut binom: i128 = 1;
    for k in 0..=n {
        let term = binom * ((n - k) as i128).pow(m as u32);
        if k % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        binom = binom * (n - k) as i128 / (k as i128 + 1);
    }
    Ok(total as u64)
}

/// Lazy stream over all allocations with non-empty bundles.
pub fn enumerate_allocations(n: usize, m: usize) -> Result<Allocations, EnumError> {
    Allocations::range(n, m, 0..index_space(n, m))
}

/// Iterator over the allocations whose digit-string index lies in a range.
#[derive(Clone, Debug)]
pub struct Allocations {
    n: usize,
    m: usize,
    digits: Vec<usize>,
    bundles: Vec<GoodSet>,
    out: Vec<GoodSet>,
    allow_empty: bool,
    index: u64,
    end: u64,
}

impl Allocations {
    pub fn range(n: usize, m: usize, range: Range<u64>) -> Result<Self, EnumError> {
        check(n, m)?;
        let end = range.end.min(index_space(n, m));
        let mut digits = vec![0; m];
        let mut rest = range.start.min(end);
        for d in digits.iter_mut() {
            *d = (rest % n as u64) as usize;
            rest /= n as u64;
        }
        let mut bundles = vec![GoodSet::EMPTY; n];
        for (g, &d) in digits.iter().enumerate() {
            bundles[d] = bundles[d].with(g);
        }
        Ok(Allocations {
            n,
            m,
            digits,
            bundles,
            out: Vec::with_capacity(n),
            allow_empty: false,
            index: range.start.min(end),
            end,
        })
    }

    /// Also yield allocations that leave some agents empty-handed.
    pub fn with_empty_bundles(mut self, allow: bool) -> Self {
        self.allow_empty = allow;
        self
    }

    /// Index of the next candidate digit string.
    pub fn position(&self) -> u64 {
        self.index
    }

    fn advance(&mut self) {
        self.index += 1;
        for g in 0..self.m {
            let d = self.digits[g];
            self.bundles[d] = self.bundles[d].without(g);
            let nd = if d + 1 == self.n { 0 } else { d + 1 };
            self.digits[g] = nd;
            self.bundles[nd] = self.bundles[nd].with(g);
            if nd != 0 {
                break;
            }
        }
    }

    /// Like `next`, but hands out a borrowed view and avoids allocating.
    pub fn next_bundles(&mut self) -> Option<&[GoodSet]> {
        while self.index < self.end {
            let ok = self.allow_empty || self.bundles.iter().all(|b| !b.is_empty());
            if ok {
                self.out.clear();
                self.out.extend_from_slice(&self.bundles);
                self.advance();
                return Some(&self.out);
            }
            self.advance();
        }
        None
    }
}

impl Iterator for Allocations {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        let m = self.m;
        self.next_bundles()
            .map(|b| Allocation::new_unchecked(m, b.to_vec()))
    }
}

/// Splits the index space into `parts` contiguous ranges of similar size.
pub fn chunk_ranges(n: usize, m: usize, parts: usize) -> Vec<Range<u64>> {
    let total = index_space(n, m);
    let parts = parts.max(1) as u64;
    let step = total.div_ceil(parts).max(1);
    (0..total)
        .step_by(step as usize)
        .map(|s| s..(s + step).min(total))
        .collect()
}

/// Number of singleton bundles in an allocation.
pub fn singleton_count(bundles: &[GoodSet]) -> usize {
    bundles.iter().filter(|b| b.len() == 1).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_known_values() {
        assert_eq!(count_allocations(3, 3).unwrap(), 6);
        assert_eq!(count_allocations(3, 6).unwrap(), 540);
        assert_eq!(count_allocations(3, 7).unwrap(), 1806);
        assert_eq!(count_allocations(3, 8).unwrap(), 5796);
        assert_eq!(count_allocations(4, 9).unwrap(), 186480);
        for m in 3..=12u32 {
            let three = 3 * (3u64.pow(m - 1) - 2u64.pow(m) + 1);
            assert_eq!(count_allocations(3, m as usize).unwrap(), three);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(
            count_allocations(4, 3),
            Err(EnumError::TooManyAgents { n: 4, m: 3 })
        );
        assert!(enumerate_allocations(0, 3).is_err());
    }

    #[test]
    fn enumeration_length_matches_count() {
        for n in 1..=4 {
            for m in n..=8 {
                let len = enumerate_allocations(n, m).unwrap().count() as u64;
                assert_eq!(len, count_allocations(n, m).unwrap(), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn enumeration_order_and_validity() {
        let all: Vec<Allocation> = enumerate_allocations(3, 3).unwrap().collect();
        assert_eq!(all.len(), 6);
        // smallest index with three distinct digits is 2 + 1·3 + 0·9
        let first: Vec<usize> = (0..3).map(|g| all[0].owner_of(g).unwrap()).collect();
        assert_eq!(first, vec![2, 1, 0]);
        let idx = |a: &Allocation| (0..a.goods()).rev().fold(0, |acc, g| acc * 3 + a.owner_of(g).unwrap());
        assert!(all.windows(2).all(|w| idx(&w[0]) < idx(&w[1])));
        for a in enumerate_allocations(3, 6).unwrap() {
            assert!(Allocation::new(6, a.bundles().to_vec()).is_ok());
            assert!(!a.has_empty_bundle());
        }
    }

    #[test]
    fn ranges_concatenate_to_full_stream() {
        let full: Vec<Allocation> = enumerate_allocations(3, 7).unwrap().collect();
        let mut joined = Vec::new();
        for r in chunk_ranges(3, 7, 7) {
            joined.extend(Allocations::range(3, 7, r).unwrap());
        }
        assert_eq!(full, joined);
    }

    #[test]
    fn singleton_subcounts() {
        let mut hist = [0usize; 4];
        let mut it = enumerate_allocations(3, 7).unwrap();
        while let Some(b) = it.next_bundles() {
            hist[singleton_count(b)] += 1;
        }
        assert_eq!(hist, [630, 1050, 126, 0]);
    }
}
