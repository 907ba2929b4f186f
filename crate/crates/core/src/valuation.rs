//! Valuation data model.
//!
//! The canonical valuation is a [`RankValuation`]: a monotone bijection from
//! the `2^m` sets of goods onto `0..2^m`. Every comparison-based fairness
//! notion only depends on this order, so ranks are all the fairness code ever
//! needs. [`RealValuation`] holds exact, possibly degenerate values and is
//! used for perturbation and for the counterexample extensions.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::goodset::{all_sets, GoodSet, MAX_GOODS};

/// Smallest good count accepted by valuation constructors.
pub const MIN_GOODS: usize = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValuationError {
    #[error("good count {0} outside supported range {MIN_GOODS}..={MAX_GOODS}")]
    GoodCountOutOfRange(usize),
    #[error("table length {found} is not 2^m (expected {expected})")]
    LengthMismatch { expected: usize, found: usize },
    #[error("ranks or order do not form a permutation of all subsets")]
    NotAPermutation,
    #[error("monotonicity violated: {lower} is a proper subset of {upper} but is not ranked below it")]
    MonotonicityViolated { lower: GoodSet, upper: GoodSet },
    #[error("value of the empty set must be zero")]
    EmptySetNotZero,
    #[error("value of {0} is negative")]
    Negative(GoodSet),
}

/// Anything that orders sets of goods.
///
/// Fairness predicates only ever compare two bundles, so this is the whole
/// interface they need.
pub trait Valuation: Sync {
    /// Number of goods `m`.
    fn goods(&self) -> usize;

    fn compare(&self, a: GoodSet, b: GoodSet) -> Ordering;

    /// `v(a) > v(b)`.
    #[inline]
    fn prefers(&self, a: GoodSet, b: GoodSet) -> bool {
        self.compare(a, b) == Ordering::Greater
    }

    /// Weak monotonicity over all covering pairs `S ⊂ S ∪ {g}`.
    fn is_monotone(&self) -> bool {
        let m = self.goods();
        all_sets(m).all(|s| {
            (0..m)
                .filter(|&g| !s.contains(g))
                .all(|g| self.compare(s, s.with(g)) != Ordering::Greater)
        })
    }

    /// Favourite bundle among `bundles`; ties go to the lowest index.
    fn favorite(&self, bundles: &[GoodSet]) -> usize {
        let mut best = 0;
        for (i, &b) in bundles.iter().enumerate().skip(1) {
            if self.prefers(b, bundles[best]) {
                best = i;
            }
        }
        best
    }
}

fn check_good_count(m: usize) -> Result<(), ValuationError> {
    if (MIN_GOODS..=MAX_GOODS).contains(&m) {
        Ok(())
    } else {
        Err(ValuationError::GoodCountOutOfRange(m))
    }
}

/// A non-degenerate monotone valuation given by the rank of every set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RankValuation {
    m: usize,
    rank: Vec<u32>,
}

impl std::fmt::Debug for RankValuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RankValuation")
            .field("m", &self.m)
            .finish_non_exhaustive()
    }
}

impl RankValuation {
    /// Builds a valuation from `rank[set-number]`, checking bijectivity and
    /// strict monotonicity.
    pub fn from_ranks(m: usize, rank: Vec<u32>) -> Result<Self, ValuationError> {
        check_good_count(m)?;
        let p = 1usize << m;
        if rank.len() != p {
            return Err(ValuationError::LengthMismatch {
                expected: p,
                found: rank.len(),
            });
        }
        let mut seen = vec![false; p];
        for &r in &rank {
            let r = r as usize;
            if r >= p || seen[r] {
                return Err(ValuationError::NotAPermutation);
            }
            seen[r] = true;
        }
        let v = RankValuation { m, rank };
        v.check_monotone()?;
        Ok(v)
    }

    /// Builds a valuation from the list of all sets in increasing value.
    pub fn from_order(order: &[GoodSet]) -> Result<Self, ValuationError> {
        let p = order.len();
        if !p.is_power_of_two() {
            return Err(ValuationError::NotAPermutation);
        }
        let m = p.trailing_zeros() as usize;
        check_good_count(m)?;
        let mut rank = vec![u32::MAX; p];
        for (r, s) in order.iter().enumerate() {
            let i = s.index();
            if i >= p || rank[i] != u32::MAX {
                return Err(ValuationError::NotAPermutation);
            }
            rank[i] = r as u32;
        }
        let v = RankValuation { m, rank };
        v.check_monotone()?;
        Ok(v)
    }

    /// The valuation ranking sets by set number.
    pub fn numeric(m: usize) -> Result<Self, ValuationError> {
        check_good_count(m)?;
        Ok(RankValuation {
            m,
            rank: (0..1u32 << m).collect(),
        })
    }

    /// A seeded random linear extension of the subset lattice.
    ///
    /// Sets are placed one at a time, each time choosing uniformly among the
    /// unplaced sets whose immediate subsets have all been placed.
    pub fn random(m: usize, seed: u64) -> Result<Self, ValuationError> {
        check_good_count(m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = 1usize << m;
        let mut missing: Vec<u8> = all_sets(m).map(|s| s.len() as u8).collect();
        let mut ready = vec![GoodSet::EMPTY];
        let mut rank = vec![0u32; p];
        let mut next = 0u32;
        while !ready.is_empty() {
            let pick = rng.gen_range(0..ready.len());
            let s = ready.swap_remove(pick);
            rank[s.index()] = next;
            next += 1;
            for g in (0..m).filter(|&g| !s.contains(g)) {
                let t = s.with(g);
                missing[t.index()] -= 1;
                if missing[t.index()] == 0 {
                    ready.push(t);
                }
            }
        }
        debug_assert_eq!(next as usize, p);
        Ok(RankValuation { m, rank })
    }

    fn check_monotone(&self) -> Result<(), ValuationError> {
        for s in all_sets(self.m) {
            for g in (0..self.m).filter(|&g| !s.contains(g)) {
                let t = s.with(g);
                if self.rank[s.index()] >= self.rank[t.index()] {
                    return Err(ValuationError::MonotonicityViolated { lower: s, upper: t });
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn rank(&self, set: GoodSet) -> u32 {
        self.rank[set.index()]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    /// All sets in increasing value.
    pub fn order(&self) -> Vec<GoodSet> {
        let mut order = vec![GoodSet::EMPTY; self.rank.len()];
        for (i, &r) in self.rank.iter().enumerate() {
            order[r as usize] = GoodSet::from_bits(i as u32);
        }
        order
    }

    /// Leveled version for threshold `k`.
    ///
    /// Sets smaller than `k` keep their relative order and rank below every
    /// set of size `>= k`; the latter are ordered by cardinality, then by set
    /// number.
    pub fn leveled(&self, k: usize) -> RankValuation {
        let mut low: Vec<GoodSet> = self.order().into_iter().filter(|s| s.len() < k).collect();
        let mut high: Vec<GoodSet> = all_sets(self.m).filter(|s| s.len() >= k).collect();
        high.sort_by_key(|s| (s.len(), s.bits()));
        low.extend(high);
        RankValuation::from_order(&low).expect("leveling preserves monotonicity")
    }

    pub fn to_real(&self) -> RealValuation {
        RealValuation {
            m: self.m,
            value: self
                .rank
                .iter()
                .map(|&r| BigRational::from_integer(BigInt::from(r)))
                .collect(),
        }
    }
}

impl Valuation for RankValuation {
    #[inline]
    fn goods(&self) -> usize {
        self.m
    }

    #[inline]
    fn compare(&self, a: GoodSet, b: GoodSet) -> Ordering {
        self.rank[a.index()].cmp(&self.rank[b.index()])
    }
}

/// Exact rational valuation, possibly degenerate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RealValuation {
    m: usize,
    value: Vec<BigRational>,
}

impl RealValuation {
    /// Checks `v(∅) = 0`, non-negativity and weak monotonicity.
    pub fn new(m: usize, value: Vec<BigRational>) -> Result<Self, ValuationError> {
        check_good_count(m)?;
        let p = 1usize << m;
        if value.len() != p {
            return Err(ValuationError::LengthMismatch {
                expected: p,
                found: value.len(),
            });
        }
        if !value[0].is_zero() {
            return Err(ValuationError::EmptySetNotZero);
        }
        if let Some(i) = value.iter().position(|x| x.is_negative()) {
            return Err(ValuationError::Negative(GoodSet::from_bits(i as u32)));
        }
        let v = RealValuation { m, value };
        for s in all_sets(m) {
            for g in (0..m).filter(|&g| !s.contains(g)) {
                if v.value[s.index()] > v.value[s.with(g).index()] {
                    return Err(ValuationError::MonotonicityViolated {
                        lower: s,
                        upper: s.with(g),
                    });
                }
            }
        }
        Ok(v)
    }

    pub fn from_fn(
        m: usize,
        f: impl Fn(GoodSet) -> BigRational,
    ) -> Result<Self, ValuationError> {
        check_good_count(m)?;
        RealValuation::new(m, all_sets(m).map(f).collect())
    }

    /// Convenience constructor from integer values.
    pub fn from_integers(m: usize, values: &[i64]) -> Result<Self, ValuationError> {
        RealValuation::new(
            m,
            values
                .iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
        )
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn value(&self, set: GoodSet) -> &BigRational {
        &self.value[set.index()]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.value
    }

    /// True if distinct sets always get distinct values.
    pub fn is_nondegenerate(&self) -> bool {
        let mut sorted: Vec<&BigRational> = self.value.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// The rank valuation with the same order, if there are no ties.
    pub fn to_rank(&self) -> Option<RankValuation> {
        if !self.is_nondegenerate() {
            return None;
        }
        let mut order: Vec<GoodSet> = all_sets(self.m).collect();
        order.sort_by(|a, b| self.value[a.index()].cmp(&self.value[b.index()]));
        RankValuation::from_order(&order).ok()
    }

    /// Removes all ties while keeping every strict comparison.
    ///
    /// Values are scaled by `C`, the smallest power of two for which distinct
    /// values end up at least `2^m` apart, and then every set `S` gains
    /// `Σ_{g_i ∈ S} 2^i`.
    pub fn perturb_nondegenerate(&self) -> RealValuation {
        let scale = self.perturbation_scale();
        let value = all_sets(self.m)
            .map(|s| &self.value[s.index()] * &scale + BigRational::from_integer(BigInt::from(s.bits())))
            .collect();
        RealValuation { m: self.m, value }
    }

    /// The constant `C` used by [`RealValuation::perturb_nondegenerate`].
    pub fn perturbation_scale(&self) -> BigRational {
        let mut sorted: Vec<&BigRational> = self.value.iter().collect();
        sorted.sort();
        sorted.dedup();
        let min_gap = sorted.windows(2).map(|w| w[1] - w[0]).min();
        let Some(gap) = min_gap else {
            return BigRational::one();
        };
        let target = BigRational::from_integer(BigInt::from(1u64 << self.m)) / gap;
        let two = BigRational::from_integer(BigInt::from(2));
        let mut c = BigRational::one();
        if c >= target {
            loop {
                let half = &c / &two;
                if half < target {
                    return c;
                }
                c = half;
            }
        }
        while c < target {
            c = &c * &two;
        }
        c
    }
}

impl Valuation for RealValuation {
    #[inline]
    fn goods(&self) -> usize {
        self.m
    }

    #[inline]
    fn compare(&self, a: GoodSet, b: GoodSet) -> Ordering {
        self.value[a.index()].cmp(&self.value[b.index()])
    }
}

impl<V: Valuation + ?Sized> Valuation for &V {
    fn goods(&self) -> usize {
        (**self).goods()
    }

    fn compare(&self, a: GoodSet, b: GoodSet) -> Ordering {
        (**self).compare(a, b)
    }
}

/// Any valuation with its values replaced by their position among the
/// distinct values. Comparisons, including ties, are unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseRanks {
    m: usize,
    key: Vec<u32>,
}

impl DenseRanks {
    pub fn of<V: Valuation + ?Sized>(v: &V) -> Self {
        let m = v.goods();
        let mut sets: Vec<GoodSet> = all_sets(m).collect();
        sets.sort_by(|&a, &b| v.compare(a, b));
        let mut key = vec![0u32; sets.len()];
        let mut k = 0;
        for w in 0..sets.len() {
            if w > 0 && v.compare(sets[w - 1], sets[w]) == Ordering::Less {
                k += 1;
            }
            key[sets[w].index()] = k;
        }
        DenseRanks { m, key }
    }

    #[inline]
    pub fn key(&self, set: GoodSet) -> u32 {
        self.key[set.index()]
    }
}

impl Valuation for DenseRanks {
    #[inline]
    fn goods(&self) -> usize {
        self.m
    }

    #[inline]
    fn compare(&self, a: GoodSet, b: GoodSet) -> Ordering {
        self.key[a.index()].cmp(&self.key[b.index()])
    }
}
