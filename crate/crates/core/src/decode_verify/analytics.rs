//! Marginal values and MMS-violation quadruples of a rank valuation.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::goodset::{all_sets, GoodSet};
use crate::valuation::RankValuation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error("good {good} out of range for {m} goods")]
    GoodOutOfRange { good: usize, m: usize },
    #[error("set size {size} out of range 1..={m}")]
    SizeOutOfRange { size: usize, m: usize },
}

/// Marginal values `v(S ∪ g) − v(S)` over all `S ∌ g` with `|S ∪ g| = size`,
/// sorted ascending. There are `C(m−1, size−1)` of them.
pub fn marginal_values(v: &RankValuation, good: usize, size: usize) -> Result<Vec<i64>, AnalyticsError> {
    let m = v.m();
    if good >= m {
        return Err(AnalyticsError::GoodOutOfRange { good, m });
    }
    if size == 0 || size > m {
        return Err(AnalyticsError::SizeOutOfRange { size, m });
    }
    let mut out: Vec<i64> = all_sets(m)
        .filter(|s| !s.contains(good) && s.len() + 1 == size)
        .map(|s| v.rank(s.with(good)) as i64 - v.rank(s) as i64)
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// The full marginal-value matrix as CSV: one row per set `S` (grouped by
/// size, then by set number), one column per good, empty where `g ∈ S`.
pub fn marginal_matrix_csv(v: &RankValuation) -> String {
    let m = v.m();
    let mut out = String::from("set,bitstring,size");
    for g in 0..m {
        write!(out, ",g{g}").unwrap();
    }
    out.push('\n');
    let mut sets: Vec<GoodSet> = all_sets(m).collect();
    sets.sort_by_key(|s| (s.len(), s.bits()));
    for s in sets {
        write!(out, "{},{},{}", s.bits(), s.bitstring(m), s.len()).unwrap();
        for g in 0..m {
            if s.contains(g) {
                out.push(',');
            } else {
                write!(out, ",{}", v.rank(s.with(g)) as i64 - v.rank(s) as i64).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// `min(v(A), v(B)) > max(v(C), v(D))` with `{A, B}` and `{C, D}` two
/// splits of the same ground set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MmsViolation {
    pub a: GoodSet,
    pub b: GoodSet,
    pub c: GoodSet,
    pub d: GoodSet,
}

impl MmsViolation {
    pub fn values(&self, v: &RankValuation) -> [u32; 4] {
        [v.rank(self.a), v.rank(self.b), v.rank(self.c), v.rank(self.d)]
    }
}

/// Splits of `u` into two non-empty parts `(x, u∖x)` with `x < u∖x`.
fn splits(u: GoodSet) -> impl Iterator<Item = (GoodSet, GoodSet)> {
    u.subsets()
        .map(move |x| (x, u.difference(x)))
        .filter(|&(x, y)| !x.is_empty() && !y.is_empty() && x < y)
}

/// Scans ground sets in ascending order and, for each, all ordered pairs of
/// its splits. Each unordered pair of parts is listed once, with the smaller
/// set number first. Stops after `limit` violations when given.
pub fn find_mms_violations(v: &RankValuation, limit: Option<usize>) -> Vec<MmsViolation> {
    let mut out = Vec::new();
    for u in all_sets(v.m()) {
        let parts: Vec<(GoodSet, GoodSet, u32, u32)> = splits(u)
            .map(|(x, y)| {
                let (rx, ry) = (v.rank(x), v.rank(y));
                (x, y, rx.min(ry), rx.max(ry))
            })
            .collect();
        for &(a, b, lo, _) in &parts {
            for &(c, d, _, hi) in &parts {
                if lo > hi {
                    out.push(MmsViolation { a, b, c, d });
                    if limit.is_some_and(|l| out.len() >= l) {
                        return out;
                    }
                }
            }
        }
    }
    out
}

pub fn count_mms_violations(v: &RankValuation) -> usize {
    find_mms_violations(v, None).len()
}

/// Violations counted as ordered quadruples `(A, B, C, D)`. Swapping `A`
/// with `B` or `C` with `D` gives four distinct tuples per listed violation.
pub fn count_mms_quadruples(v: &RankValuation) -> usize {
    4 * count_mms_violations(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_multiset_size() {
        let v = RankValuation::random(6, 1).unwrap();
        for g in 0..6 {
            for size in 1..=6 {
                let n = marginal_values(&v, g, size).unwrap().len();
                let binom = [1, 5, 10, 10, 5, 1][size - 1];
                assert_eq!(n, binom);
            }
        }
        assert!(marginal_values(&v, 6, 1).is_err());
        assert!(marginal_values(&v, 0, 0).is_err());
        assert!(marginal_values(&v, 0, 7).is_err());
    }

    #[test]
    fn marginals_are_positive() {
        let v = RankValuation::random(5, 9).unwrap();
        assert!(marginal_values(&v, 2, 3).unwrap().iter().all(|&d| d > 0));
    }

    #[test]
    fn numeric_order_on_three_goods_is_mms_feasible() {
        // set numbers are additive values 1, 2, 4
        let v = RankValuation::numeric(3).unwrap();
        assert!(find_mms_violations(&v, None).is_empty());
    }

    #[test]
    fn violation_found_when_present() {
        // splits of {g0..g3}: make {g0,g1} and {g2,g3} both beat {g0,g2} and {g1,g3}
        let m = 4;
        let mut order: Vec<GoodSet> = all_sets(m).collect();
        order.sort_by_key(|s| {
            let bonus = if *s == GoodSet::from_bits(0b0011) || *s == GoodSet::from_bits(0b1100) { 1 } else { 0 };
            (s.len(), bonus, s.bits())
        });
        let v = RankValuation::from_order(&order).unwrap();
        let found = find_mms_violations(&v, None);
        let want = MmsViolation {
            a: GoodSet::from_bits(0b0011),
            b: GoodSet::from_bits(0b1100),
            c: GoodSet::from_bits(0b0101),
            d: GoodSet::from_bits(0b1010),
        };
        assert!(found.contains(&want));
        assert_eq!(find_mms_violations(&v, Some(1)).len(), 1);
        let csv = marginal_matrix_csv(&v);
        assert_eq!(csv.lines().count(), 17);
        assert!(csv.starts_with("set,bitstring,size,g0,g1,g2,g3\n0,0000,0,"));
    }
}
