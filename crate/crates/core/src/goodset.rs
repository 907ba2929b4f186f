//! Sets of goods as bitmasks.
//!
//! Goods are numbered `0..m` and a set of goods is identified with the
//! integer whose binary expansion has bit `i` set iff good `g_i` belongs to
//! the set. This numbering is a linear extension of inclusion: `A ⊂ B`
//! implies `A < B`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest number of goods supported by the bitmask representation.
pub const MAX_GOODS: usize = 16;

/// A subset of the goods `{g_0, …, g_{m-1}}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GoodSet(u32);

impl GoodSet {
    pub const EMPTY: GoodSet = GoodSet(0);

    #[inline]
    pub const fn from_bits(bits: u32) -> Self {
        GoodSet(bits)
    }

    /// The set containing all `m` goods.
    #[inline]
    pub const fn full(m: usize) -> Self {
        GoodSet(((1u64 << m) - 1) as u32)
    }

    #[inline]
    pub const fn singleton(good: usize) -> Self {
        GoodSet(1 << good)
    }

    pub fn from_goods<I: IntoIterator<Item = usize>>(goods: I) -> Self {
        goods.into_iter().fold(GoodSet::EMPTY, |s, g| s.with(g))
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    /// The set number, usable as a table index.
    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn contains(self, good: usize) -> bool {
        self.0 >> good & 1 == 1
    }

    #[inline]
    #[must_use]
    pub const fn with(self, good: usize) -> Self {
        GoodSet(self.0 | 1 << good)
    }

    #[inline]
    #[must_use]
    pub const fn without(self, good: usize) -> Self {
        GoodSet(self.0 & !(1 << good))
    }

    #[inline]
    pub const fn union(self, other: GoodSet) -> Self {
        GoodSet(self.0 | other.0)
    }

    #[inline]
    pub const fn intersection(self, other: GoodSet) -> Self {
        GoodSet(self.0 & other.0)
    }

    #[inline]
    pub const fn difference(self, other: GoodSet) -> Self {
        GoodSet(self.0 & !other.0)
    }

    #[inline]
    pub const fn is_disjoint(self, other: GoodSet) -> bool {
        self.0 & other.0 == 0
    }

    #[inline]
    pub const fn is_subset(self, other: GoodSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_proper_subset(self, other: GoodSet) -> bool {
        self.is_subset(other) && self.0 != other.0
    }

    /// Goods in ascending index order.
    pub fn goods(self) -> Goods {
        Goods(self.0)
    }

    /// All subsets of `self`, in ascending set-number order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            universe: self.0,
            next: Some(0),
        }
    }

    /// `m`-character bitstring, leftmost character is good `m-1`.
    pub fn bitstring(self, m: usize) -> String {
        (0..m)
            .rev()
            .map(|g| if self.contains(g) { '1' } else { '0' })
            .collect()
    }

    /// Inverse of [`GoodSet::bitstring`]; the length of `s` fixes `m`.
    pub fn parse_bitstring(s: &str) -> Option<Self> {
        if s.is_empty() || s.len() > MAX_GOODS {
            return None;
        }
        let mut bits = 0u32;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => return None,
            }
        }
        Some(GoodSet(bits))
    }
}

impl fmt::Debug for GoodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GoodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, g) in self.goods().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "g{g}")?;
        }
        f.write_str("}")
    }
}

/// Iterator over the goods of a set.
#[derive(Clone)]
pub struct Goods(u32);

impl Iterator for Goods {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let g = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Goods {}

/// Iterator over the subsets of a fixed universe.
#[derive(Clone)]
pub struct Subsets {
    universe: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = GoodSet;

    fn next(&mut self) -> Option<GoodSet> {
        let cur = self.next?;
        // standard "next submask in increasing order" step
        self.next = if cur == self.universe {
            None
        } else {
            Some((cur.wrapping_sub(self.universe)) & self.universe)
        };
        Some(GoodSet(cur))
    }
}

/// Iterator over all `2^m` sets in set-number order.
pub fn all_sets(m: usize) -> impl Iterator<Item = GoodSet> + Clone {
    (0..1u32 << m).map(GoodSet)
}
