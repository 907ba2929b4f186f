//! Submodular realizations of rank valuations and larger instances built
//! from a three-agent one.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::goodset::{all_sets, GoodSet, MAX_GOODS};
use crate::valuation::{RankValuation, RealValuation, Valuation, ValuationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("expected three base valuations over the same goods")]
    BadBase,
    #[error("extension needs at least 4 agents, got {0}")]
    TooFewAgents(usize),
    #[error("{0} goods exceeds the supported maximum")]
    TooManyGoods(usize),
    #[error("table has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// A set function with values `f(S)·2^N`, `N = 2^m − 1`, stored exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicValuation {
    m: usize,
    value: Vec<BigUint>,
}

impl DyadicValuation {
    /// Arbitrary table, used for checker inputs that are not realizations.
    pub fn from_raw(m: usize, value: Vec<BigUint>) -> Result<Self, ConstructionError> {
        if m > MAX_GOODS {
            return Err(ConstructionError::TooManyGoods(m));
        }
        if value.len() != 1 << m {
            return Err(ConstructionError::LengthMismatch {
                expected: 1 << m,
                found: value.len(),
            });
        }
        Ok(DyadicValuation { m, value })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The scaling exponent `N = 2^m − 1`.
    pub fn exponent(&self) -> usize {
        (1 << self.m) - 1
    }

    pub fn value(&self, s: GoodSet) -> &BigUint {
        &self.value[s.index()]
    }

    pub fn values(&self) -> &[BigUint] {
        &self.value
    }

    /// `f(S)` as an exact fraction.
    pub fn as_fraction(&self, s: GoodSet) -> BigRational {
        let den = BigInt::one() << self.exponent();
        BigRational::new(BigInt::from(self.value(s).clone()), den)
    }

    /// Lines `<set-number> <decimal>` in set-number order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, x) in self.value.iter().enumerate() {
            writeln!(out, "{i} {x}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str, m: usize) -> Result<Self, ConstructionError> {
        let mut value = Vec::new();
        for (k, line) in text.lines().map(str::trim).filter(|l| !l.is_empty()).enumerate() {
            let mut parts = line.split_whitespace();
            let (Some(i), Some(x), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(ConstructionError::Malformed {
                    line: k + 1,
                    msg: "expected two columns".into(),
                });
            };
            if i.parse::<usize>().ok() != Some(k) {
                return Err(ConstructionError::Malformed {
                    line: k + 1,
                    msg: format!("expected set number {k}"),
                });
            }
            value.push(x.parse::<BigUint>().map_err(|_| ConstructionError::Malformed {
                line: k + 1,
                msg: format!("bad value `{x}`"),
            })?);
        }
        DyadicValuation::from_raw(m, value)
    }
}

impl Valuation for DyadicValuation {
    fn goods(&self) -> usize {
        self.m
    }

    fn compare(&self, a: GoodSet, b: GoodSet) -> Ordering {
        self.value[a.index()].cmp(&self.value[b.index()])
    }
}

/// `f(S_i) = Σ_{ℓ=1..i} 2^{−ℓ}` for the set `S_i` of rank `i`, i.e. the
/// stored value `2^N − 2^{N−i}`.
pub fn submodular_realize(v: &RankValuation) -> DyadicValuation {
    let n = (1usize << v.m()) - 1;
    let top = BigUint::one() << n;
    let value = v
        .ranks()
        .iter()
        .map(|&r| &top - (BigUint::one() << (n - r as usize)))
        .collect();
    DyadicValuation { m: v.m(), value }
}

/// A violation of diminishing returns: `f(S∪g) − f(S) < f(T∪g) − f(T)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubmodularWitness {
    pub s: GoodSet,
    pub t: GoodSet,
    pub good: usize,
}

/// Checks `f(S∪g) − f(S) >= f(T∪g) − f(T)` for all `S ⊆ T`, `g ∉ T`.
/// The first violation in order of `(S, T, g)` is returned.
pub fn is_submodular(f: &DyadicValuation) -> Result<(), SubmodularWitness> {
    let m = f.m;
    let full = GoodSet::full(m);
    for s in all_sets(m) {
        let rest = full.difference(s);
        for extra in rest.subsets() {
            let t = s.union(extra);
            for g in full.difference(t).goods() {
                // compared without subtraction
                let lhs = f.value(s.with(g)) + f.value(t);
                let rhs = f.value(t.with(g)) + f.value(s);
                if lhs < rhs {
                    return Err(SubmodularWitness { s, t, good: g });
                }
            }
        }
    }
    Ok(())
}

/// Extends a three-agent instance over goods `G` to `n` agents by adding the
/// goods `H = {h_0, …, h_{n-4}}` (numbered after `G`). Agents 0 and 1 ignore
/// `H`; every agent `i >= 2` values `S` at `T·|S ∩ H| + v_2(S ∩ G)` with
/// `T = 2^{|G|}`, one more than the largest rank.
pub fn extend_counterexample(base: &[RankValuation], n: usize) -> Result<Vec<RealValuation>, ConstructionError> {
    if base.len() != 3 || base.iter().any(|v| v.m() != base[0].m()) {
        return Err(ConstructionError::BadBase);
    }
    if n < 4 {
        return Err(ConstructionError::TooFewAgents(n));
    }
    let g = base[0].m();
    let total = g + n - 3;
    if total > MAX_GOODS {
        return Err(ConstructionError::TooManyGoods(total));
    }
    let g_mask = GoodSet::full(g);
    let t = BigInt::one() << g;
    let int = |x: BigInt| BigRational::from_integer(x);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let v = &base[i.min(2)];
        let f = |s: GoodSet| {
            let own = BigInt::from(v.rank(s.intersection(g_mask)));
            if i < 2 {
                int(own)
            } else {
                let h = s.difference(g_mask).len();
                int(&t * h + own)
            }
        };
        out.push(RealValuation::from_fn(total, f)?);
    }
    Ok(out)
}

/// Adds `extra` goods of value zero: `v̄(S) = v(S ∩ I_0)`.
pub fn add_dummy_goods(vals: &[RealValuation], extra: usize) -> Result<Vec<RealValuation>, ConstructionError> {
    let mut out = Vec::with_capacity(vals.len());
    for v in vals {
        let m = v.m();
        if m + extra > MAX_GOODS {
            return Err(ConstructionError::TooManyGoods(m + extra));
        }
        let base = GoodSet::full(m);
        out.push(RealValuation::from_fn(m + extra, |s| v.value(s.intersection(base)).clone())?);
    }
    Ok(out)
}

/// Adding `good` to any set leaves its value unchanged.
pub fn is_dummy(v: &RealValuation, good: usize) -> bool {
    all_sets(v.m())
        .filter(|s| !s.contains(good))
        .all(|s| v.value(s.with(good)) == v.value(s))
        && v.value(GoodSet::EMPTY).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `f(S) + f(T) >= f(S∪T) + f(S∩T)` for all pairs.
    fn naive_submodular(f: &DyadicValuation) -> bool {
        let m = f.m();
        all_sets(m).all(|s| {
            all_sets(m).all(|t| {
                f.value(s) + f.value(t) >= f.value(s.union(t)) + f.value(s.intersection(t))
            })
        })
    }

    #[test]
    fn realization_values() {
        let v = RankValuation::numeric(3).unwrap();
        let f = submodular_realize(&v);
        assert_eq!(f.exponent(), 7);
        assert!(f.value(GoodSet::EMPTY).is_zero());
        assert_eq!(*f.value(GoodSet::from_bits(1)), BigUint::one() << 6);
        assert_eq!(*f.value(GoodSet::full(3)), (BigUint::one() << 7) - 1u32);
        assert_eq!(f.as_fraction(GoodSet::from_bits(1)), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn realizations_are_submodular_and_order_preserving() {
        for seed in 0..20 {
            let v = RankValuation::random(4, seed).unwrap();
            let f = submodular_realize(&v);
            assert_eq!(is_submodular(&f), Ok(()));
            assert!(naive_submodular(&f));
            for a in all_sets(4) {
                for b in all_sets(4) {
                    assert_eq!(f.compare(a, b), v.compare(a, b));
                }
            }
        }
    }

    #[test]
    fn supermodular_input_fails() {
        let f = DyadicValuation::from_raw(2, [0u32, 1, 1, 100].map(BigUint::from).to_vec()).unwrap();
        let w = is_submodular(&f).unwrap_err();
        assert_eq!(
            w,
            SubmodularWitness {
                s: GoodSet::EMPTY,
                t: GoodSet::from_bits(1),
                good: 1
            }
        );
        assert!(!naive_submodular(&f));
    }

    #[test]
    fn text_roundtrip() {
        let f = submodular_realize(&RankValuation::random(3, 1).unwrap());
        assert_eq!(DyadicValuation::from_text(&f.to_text(), 3).unwrap(), f);
        assert!(DyadicValuation::from_text("0 0\n2 1\n", 1).is_err());
    }

    #[test]
    fn extension_shape() {
        let base: Vec<RankValuation> = (0..3).map(|s| RankValuation::random(5, s).unwrap()).collect();
        let ext = extend_counterexample(&base, 5).unwrap();
        assert_eq!(ext.len(), 5);
        assert!(ext.iter().all(|v| v.m() == 7));
        assert_eq!(ext[2], ext[3]);
        assert_eq!(ext[3], ext[4]);
        let h0 = GoodSet::singleton(5);
        assert!(ext[0].value(h0).is_zero());
        let t = BigRational::from_integer(32.into());
        assert_eq!(ext[2].value(h0), &t);
        assert!(ext[2].value(h0) > ext[2].value(GoodSet::full(5)));
        assert!(is_dummy(&ext[1], 6));
        assert!(matches!(extend_counterexample(&base, 3), Err(ConstructionError::TooFewAgents(3))));
        assert!(matches!(extend_counterexample(&base[..2], 4), Err(ConstructionError::BadBase)));
    }

    #[test]
    fn dummy_goods() {
        let v = RankValuation::random(3, 2).unwrap().to_real();
        assert_eq!(add_dummy_goods(std::slice::from_ref(&v), 0).unwrap(), vec![v.clone()]);
        let w = add_dummy_goods(&[v], 2).unwrap().pop().unwrap();
        assert_eq!(w.m(), 5);
        assert!(is_dummy(&w, 3) && is_dummy(&w, 4));
        assert!(!is_dummy(&w, 0));
    }
}
