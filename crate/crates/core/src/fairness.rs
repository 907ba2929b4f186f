//! Fairness predicates and envy-graph machinery.
//!
//! All predicates compare bundles through [`Valuation::compare`] only. The
//! feasibility predicates take the valuation of a single agent and ask
//! whether a given bundle of a partition would be acceptable to that agent.

use serde::Serialize;
use thiserror::Error;

use crate::goodset::GoodSet;
use crate::valuation::Valuation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FairnessError {
    #[error("bundles {0} and {1} overlap")]
    OverlappingBundles(GoodSet, GoodSet),
    #[error("bundles do not cover all {m} goods (missing {missing})")]
    Incomplete { m: usize, missing: GoodSet },
    #[error("{valuations} valuations for {agents} agents")]
    ArityMismatch { agents: usize, valuations: usize },
    #[error("valuations disagree on the number of goods")]
    GoodCountMismatch,
    #[error("bundle index {index} out of range for {n} bundles")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("bundle and rest must partition all goods")]
    BadPartitionInput,
    #[error("agents {0:?} do not form an envy cycle")]
    NotACycle(Vec<usize>),
}

/// A complete assignment of pairwise-disjoint bundles to agents `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Allocation {
    m: usize,
    bundles: Vec<GoodSet>,
}

impl Allocation {
    pub fn new(m: usize, bundles: Vec<GoodSet>) -> Result<Self, FairnessError> {
        let mut seen = GoodSet::EMPTY;
        for &b in &bundles {
            if !b.is_disjoint(seen) {
                let other = bundles
                    .iter()
                    .copied()
                    .find(|o| !o.is_disjoint(b) && *o != b)
                    .unwrap_or(b);
                return Err(FairnessError::OverlappingBundles(other, b));
            }
            seen = seen.union(b);
        }
        if seen != GoodSet::full(m) {
            return Err(FairnessError::Incomplete {
                m,
                missing: GoodSet::full(m).difference(seen),
            });
        }
        Ok(Allocation { m, bundles })
    }

    /// Constructor for callers that already guarantee the invariants.
    pub(crate) fn new_unchecked(m: usize, bundles: Vec<GoodSet>) -> Self {
        debug_assert!(Allocation::new(m, bundles.clone()).is_ok());
        Allocation { m, bundles }
    }

    /// Builds the allocation in which good `g` goes to agent `owner[g]`.
    pub fn from_owners(n: usize, owner: &[usize]) -> Self {
        let mut bundles = vec![GoodSet::EMPTY; n];
        for (g, &i) in owner.iter().enumerate() {
            bundles[i] = bundles[i].with(g);
        }
        Allocation {
            m: owner.len(),
            bundles,
        }
    }

    #[inline]
    pub fn agents(&self) -> usize {
        self.bundles.len()
    }

    #[inline]
    pub fn goods(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn bundle(&self, agent: usize) -> GoodSet {
        self.bundles[agent]
    }

    pub fn bundles(&self) -> &[GoodSet] {
        &self.bundles
    }

    pub fn into_bundles(self) -> Vec<GoodSet> {
        self.bundles
    }

    pub fn owner_of(&self, good: usize) -> Option<usize> {
        self.bundles.iter().position(|b| b.contains(good))
    }

    pub fn has_empty_bundle(&self) -> bool {
        self.bundles.iter().any(|b| b.is_empty())
    }
}

fn check_arity<V: Valuation>(x: &Allocation, vs: &[V]) -> Result<(), FairnessError> {
    if vs.len() != x.agents() {
        return Err(FairnessError::ArityMismatch {
            agents: x.agents(),
            valuations: vs.len(),
        });
    }
    if vs.iter().any(|v| v.goods() != x.goods()) {
        return Err(FairnessError::GoodCountMismatch);
    }
    Ok(())
}

/// `∃ g ∈ other : v(other ∖ g) > v(own)`.
pub fn strongly_envies<V: Valuation + ?Sized>(
    v: &V,
    own: GoodSet,
    other: GoodSet,
) -> Result<bool, FairnessError> {
    if !own.is_disjoint(other) {
        return Err(FairnessError::OverlappingBundles(own, other));
    }
    Ok(strongly_envies_unchecked(v, own, other))
}

#[inline]
pub(crate) fn strongly_envies_unchecked<V: Valuation + ?Sized>(
    v: &V,
    own: GoodSet,
    other: GoodSet,
) -> bool {
    other.goods().any(|g| v.prefers(other.without(g), own))
}

/// No agent strongly envies another agent's bundle.
pub fn is_efx<V: Valuation>(x: &Allocation, vs: &[V]) -> Result<bool, FairnessError> {
    check_arity(x, vs)?;
    Ok((0..x.agents()).all(|i| {
        (0..x.agents())
            .filter(|&j| j != i)
            .all(|j| !strongly_envies_unchecked(&vs[i], x.bundle(i), x.bundle(j)))
    }))
}

/// Number of violated EFX conditions `v_i(X_j ∖ g) <= v_i(X_i)` over all goods
/// `g ∈ X_j` and all agents `i ≠ j`. Ranges over `0..=(n-1)·m`.
pub fn violated_condition_count<V: Valuation>(
    x: &Allocation,
    vs: &[V],
) -> Result<usize, FairnessError> {
    check_arity(x, vs)?;
    Ok(violations_unchecked(x.bundles(), vs))
}

pub(crate) fn violations_unchecked<V: Valuation>(bundles: &[GoodSet], vs: &[V]) -> usize {
    let mut count = 0;
    for (j, &xj) in bundles.iter().enumerate() {
        for g in xj.goods() {
            let rest = xj.without(g);
            for (i, v) in vs.iter().enumerate() {
                if i != j && v.prefers(rest, bundles[i]) {
                    count += 1;
                }
            }
        }
    }
    count
}

fn check_index(bundles: &[GoodSet], index: usize) -> Result<(), FairnessError> {
    if index >= bundles.len() {
        Err(FairnessError::IndexOutOfRange {
            index,
            n: bundles.len(),
        })
    } else {
        Ok(())
    }
}

/// `v(X_index) >= v(X_l ∖ g)` for every bundle `X_l` and every `g ∈ X_l`.
pub fn is_efx_feasible<V: Valuation + ?Sized>(
    v: &V,
    index: usize,
    bundles: &[GoodSet],
) -> Result<bool, FairnessError> {
    check_index(bundles, index)?;
    Ok(efx_feasible(v, index, bundles))
}

pub(crate) fn efx_feasible<V: Valuation + ?Sized>(v: &V, index: usize, bundles: &[GoodSet]) -> bool {
    let own = bundles[index];
    bundles
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != index)
        .all(|(_, &other)| !strongly_envies_unchecked(v, own, other))
}

/// Envy towards any other bundle is cured by transferring any single good:
/// for every `l`, either `v(X_i) > v(X_l)` or `v(X_i ∪ g) >= v(X_l ∖ g)` for
/// all `g ∈ X_l`.
pub fn is_tefx_feasible<V: Valuation + ?Sized>(
    v: &V,
    index: usize,
    bundles: &[GoodSet],
) -> Result<bool, FairnessError> {
    check_index(bundles, index)?;
    Ok(tefx_feasible(v, index, bundles))
}

pub(crate) fn tefx_feasible<V: Valuation + ?Sized>(v: &V, index: usize, bundles: &[GoodSet]) -> bool {
    let own = bundles[index];
    bundles
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != index)
        .all(|(_, &other)| {
            v.prefers(own, other) || other.goods().all(|g| !v.prefers(other.without(g), own.with(g)))
        })
}

/// For every other bundle `X_l`, either it is empty or some `g ∈ X_l`
/// satisfies `v(X_i) >= v(X_l ∖ g)`.
pub fn is_ef1_feasible<V: Valuation + ?Sized>(
    v: &V,
    index: usize,
    bundles: &[GoodSet],
) -> Result<bool, FairnessError> {
    check_index(bundles, index)?;
    Ok(ef1_feasible(v, index, bundles))
}

pub(crate) fn ef1_feasible<V: Valuation + ?Sized>(v: &V, index: usize, bundles: &[GoodSet]) -> bool {
    let own = bundles[index];
    bundles
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != index)
        .all(|(_, &other)| other.is_empty() || other.goods().any(|g| !v.prefers(other.without(g), own)))
}

/// Searches for a certificate that `bundle` is EEFX-feasible for `v`: a
/// partition of all goods into `n` parts with `bundle` as part 0 such that
/// `bundle` is EFX-feasible against every other part.
///
/// Splits of `rest` are tried in ascending order of the base-`(n-1)` number
/// whose digit `k` is the part of the `k`-th good of `rest` (for three agents
/// this is ascending bitmask of the first part); the first certificate found
/// is returned.
pub fn is_eefx_feasible<V: Valuation + ?Sized>(
    v: &V,
    bundle: GoodSet,
    rest: GoodSet,
    n: usize,
) -> Result<Option<Vec<GoodSet>>, FairnessError> {
    if n < 2 || !bundle.is_disjoint(rest) || bundle.union(rest) != GoodSet::full(v.goods()) {
        return Err(FairnessError::BadPartitionInput);
    }
    // a part Y is acceptable iff no single removal from it beats the bundle
    let acceptable = |y: GoodSet| !strongly_envies_unchecked(v, bundle, y);
    if n == 2 {
        return Ok(acceptable(rest).then(|| vec![bundle, rest]));
    }
    let goods: Vec<usize> = rest.goods().collect();
    let parts = n - 1;
    let mut digits = vec![0usize; goods.len()];
    loop {
        let mut ys = vec![GoodSet::EMPTY; parts];
        for (k, &g) in goods.iter().enumerate() {
            ys[digits[k]] = ys[digits[k]].with(g);
        }
        if ys.iter().all(|&y| acceptable(y)) {
            let mut cert = Vec::with_capacity(n);
            cert.push(bundle);
            cert.extend(ys);
            return Ok(Some(cert));
        }
        // increment, least significant digit first (good order)
        let mut k = 0;
        loop {
            if k == digits.len() {
                return Ok(None);
            }
            digits[k] += 1;
            if digits[k] < parts {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Re-checks a claimed EEFX certificate for `bundle`.
pub fn is_eefx_certificate<V: Valuation + ?Sized>(v: &V, bundle: GoodSet, certificate: &[GoodSet]) -> bool {
    let Ok(alloc) = Allocation::new(v.goods(), certificate.to_vec()) else {
        return false;
    };
    match alloc.bundles().iter().position(|&b| b == bundle) {
        Some(i) => efx_feasible(v, i, alloc.bundles()),
        None => false,
    }
}

/// Directed envy graph: edge `i -> j` iff `v_i(X_j) > v_i(X_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvyGraph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
}

impl EnvyGraph {
    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(&j)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, out)| out.iter().map(move |&j| (i, j)))
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.iter().all(Vec::is_empty)
    }

    /// Some directed cycle, found by depth-first search from the lowest
    /// vertex with successors visited in ascending order.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            OnStack,
            Done,
        }
        let mut mark = vec![Mark::New; self.n];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for root in 0..self.n {
            if mark[root] != Mark::New {
                continue;
            }
            stack.push((root, 0));
            mark[root] = Mark::OnStack;
            while let Some(&mut (u, ref mut next)) = stack.last_mut() {
                if let Some(&w) = self.adjacency[u].get(*next) {
                    *next += 1;
                    match mark[w] {
                        Mark::New => {
                            mark[w] = Mark::OnStack;
                            stack.push((w, 0));
                        }
                        Mark::OnStack => {
                            let start = stack.iter().position(|&(x, _)| x == w).unwrap();
                            return Some(stack[start..].iter().map(|&(x, _)| x).collect());
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[u] = Mark::Done;
                    stack.pop();
                }
            }
        }
        None
    }
}

pub fn envy_graph<V: Valuation>(x: &Allocation, vs: &[V]) -> Result<EnvyGraph, FairnessError> {
    check_arity(x, vs)?;
    let n = x.agents();
    let adjacency = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && vs[i].prefers(x.bundle(j), x.bundle(i)))
                .collect()
        })
        .collect();
    Ok(EnvyGraph { n, adjacency })
}

/// Gives every agent on `cycle` the bundle of its successor.
///
/// `cycle = [a_0, …, a_{k-1}]` must satisfy `a_t -> a_{t+1}` (indices mod k)
/// in the envy graph of `x`.
pub fn rotate_cycle<V: Valuation>(
    x: &Allocation,
    vs: &[V],
    cycle: &[usize],
) -> Result<Allocation, FairnessError> {
    let graph = envy_graph(x, vs)?;
    let k = cycle.len();
    let mut distinct = cycle.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let valid = k >= 2
        && distinct.len() == k
        && cycle.iter().all(|&a| a < x.agents())
        && (0..k).all(|t| graph.has_edge(cycle[t], cycle[(t + 1) % k]));
    if !valid {
        return Err(FairnessError::NotACycle(cycle.to_vec()));
    }
    let mut bundles = x.bundles().to_vec();
    for t in 0..k {
        bundles[cycle[t]] = x.bundle(cycle[(t + 1) % k]);
    }
    Ok(Allocation::new_unchecked(x.goods(), bundles))
}

/// Rotates envy cycles until the envy graph is acyclic.
pub fn eliminate_envy_cycles<V: Valuation>(
    x: &Allocation,
    vs: &[V],
) -> Result<(Allocation, usize), FairnessError> {
    let mut cur = x.clone();
    let mut rotations = 0;
    while let Some(cycle) = envy_graph(&cur, vs)?.find_cycle() {
        cur = rotate_cycle(&cur, vs, &cycle)?;
        rotations += 1;
    }
    Ok((cur, rotations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::RankValuation;

    fn gs(goods: &[usize]) -> GoodSet {
        GoodSet::from_goods(goods.iter().copied())
    }

    #[test]
    fn strong_envy_edge_cases() {
        let v = RankValuation::random(4, 5).unwrap();
        assert!(!strongly_envies(&v, gs(&[0]), GoodSet::EMPTY).unwrap());
        for g in 0..4 {
            for own in [gs(&[]), gs(&[(g + 1) % 4])] {
                assert!(!strongly_envies(&v, own, gs(&[g])).unwrap());
            }
        }
        assert_eq!(
            strongly_envies(&v, gs(&[0, 1]), gs(&[1])),
            Err(FairnessError::OverlappingBundles(gs(&[0, 1]), gs(&[1])))
        );
    }

    #[test]
    fn singletons_with_identical_valuations_are_efx() {
        let v = RankValuation::random(3, 2).unwrap();
        let x = Allocation::new(3, vec![gs(&[0]), gs(&[1]), gs(&[2])]).unwrap();
        let vs = vec![v.clone(), v.clone(), v];
        assert!(is_efx(&x, &vs).unwrap());
        assert_eq!(violated_condition_count(&x, &vs).unwrap(), 0);
    }

    #[test]
    fn arity_is_checked() {
        let v = RankValuation::random(3, 2).unwrap();
        let x = Allocation::new(3, vec![gs(&[0]), gs(&[1]), gs(&[2])]).unwrap();
        assert!(matches!(
            is_efx(&x, &[v.clone(), v]),
            Err(FairnessError::ArityMismatch { agents: 3, valuations: 2 })
        ));
    }

    #[test]
    fn allocation_validation() {
        assert!(matches!(
            Allocation::new(3, vec![gs(&[0, 1]), gs(&[1, 2])]),
            Err(FairnessError::OverlappingBundles(..))
        ));
        assert!(matches!(
            Allocation::new(3, vec![gs(&[0]), gs(&[1])]),
            Err(FairnessError::Incomplete { .. })
        ));
        assert!(Allocation::new(3, vec![gs(&[0, 1, 2]), GoodSet::EMPTY]).is_ok());
    }

    #[test]
    fn favourite_bundle_is_efx_and_tefx_feasible() {
        for seed in 0..50 {
            let v = RankValuation::random(6, seed).unwrap();
            let b = [gs(&[0, 3]), gs(&[1, 4, 5]), gs(&[2])];
            let fav = v.favorite(&b);
            assert!(is_efx_feasible(&v, fav, &b).unwrap());
            assert!(is_tefx_feasible(&v, fav, &b).unwrap());
        }
    }

    #[test]
    fn dominated_tiny_bundle_is_not_tefx_feasible() {
        // numeric order on 5 goods: {g0} vs {g1..g4}; moving g1 over still loses
        let v = RankValuation::numeric(5).unwrap();
        let b = [gs(&[0]), gs(&[1, 2, 3, 4])];
        assert!(!is_tefx_feasible(&v, 0, &b).unwrap());
        // direct scan of the condition
        let own = b[0];
        let other = b[1];
        let cured = v.prefers(own, other)
            || other.goods().all(|g| v.rank(own.with(g)) >= v.rank(other.without(g)));
        assert!(!cured);
        assert_eq!(
            is_tefx_feasible(&v, 2, &b),
            Err(FairnessError::IndexOutOfRange { index: 2, n: 2 })
        );
    }

    #[test]
    fn ef1_feasibility() {
        let v = RankValuation::numeric(4).unwrap();
        let singles = [gs(&[0]), gs(&[1]), gs(&[2, 3]), GoodSet::EMPTY];
        // removing the best good of {g2,g3} leaves {g2} = 4 > {g0} = 1
        assert!(!is_ef1_feasible(&v, 0, &singles).unwrap());
        let b = [gs(&[0]), gs(&[1, 2, 3])];
        // best removal leaves {g1,g2} (6) or {g1,g3}... all beat {g0}
        assert!(!is_ef1_feasible(&v, 0, &b).unwrap());
        let only_singletons = [gs(&[0, 1]), gs(&[2]), gs(&[3]), GoodSet::EMPTY];
        assert!(is_ef1_feasible(&v, 0, &only_singletons).unwrap());
    }

    #[test]
    fn eefx_certificates() {
        let v = RankValuation::random(4, 17).unwrap();
        // empty bundle can never win against a part with two or more goods
        let cert = is_eefx_feasible(&v, GoodSet::EMPTY, GoodSet::full(4), 3).unwrap();
        assert!(cert.is_none());
        let full = GoodSet::full(4);
        for b in full.subsets() {
            let rest = full.difference(b);
            if let Some(c) = is_eefx_feasible(&v, b, rest, 3).unwrap() {
                assert!(is_eefx_certificate(&v, b, &c));
            }
        }
        assert_eq!(
            is_eefx_feasible(&v, gs(&[0]), gs(&[0, 1, 2, 3]), 3),
            Err(FairnessError::BadPartitionInput)
        );
    }

    #[test]
    fn envy_graph_and_rotation() {
        let m = 4;
        // agent 0 loves g3, agent 1 loves g0
        let v0 = RankValuation::numeric(m).unwrap();
        let mut order: Vec<GoodSet> = crate::goodset::all_sets(m).collect();
        order.sort_by_key(|s| {
            
            (0..m).filter(|&g| s.contains(g)).map(|g| 1u32 << (m - 1 - g)).sum::<u32>()
        });
        let v1 = RankValuation::from_order(&order).unwrap();
        let vs = [v0, v1];
        let x = Allocation::new(m, vec![gs(&[0]), gs(&[3, 1, 2])]).unwrap();
        let g = envy_graph(&x, &vs).unwrap();
        assert!(g.has_edge(0, 1));
        let y = Allocation::new(m, vec![gs(&[0, 1, 2]), gs(&[3])]).unwrap();
        let gy = envy_graph(&y, &vs).unwrap();
        assert!(gy.has_edge(0, 1) && gy.has_edge(1, 0));
        assert_eq!(gy.find_cycle(), Some(vec![0, 1]));
        let z = rotate_cycle(&y, &vs, &[0, 1]).unwrap();
        assert_eq!(z.bundles(), &[gs(&[3]), gs(&[0, 1, 2])]);
        assert!(envy_graph(&z, &vs).unwrap().is_empty());
        assert!(matches!(rotate_cycle(&z, &vs, &[0, 1]), Err(FairnessError::NotACycle(_))));
    }
}
