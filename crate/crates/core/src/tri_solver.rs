//! Three agents: an allocation that is tEFX, or EF1 and EEFX at once.
//!
//! The loop keeps a partition `(X_0, X_1, X_2)` in which `X_0` and `X_1` are
//! EFX-feasible for agent 0, `v_0(X_0) < v_0(X_1)`, and `X_2` is
//! tEFX-feasible for agent 1 or agent 2. Each round either returns an
//! allocation or moves to a partition with larger `v_0(X_0)`.

use serde::Serialize;
use thiserror::Error;

use crate::alloc_enum::count_allocations;
use crate::fairness::{ef1_feasible, efx_feasible, is_eefx_certificate, is_eefx_feasible, tefx_feasible, Allocation};
use crate::goodset::GoodSet;
use crate::valuation::{RankValuation, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriError {
    #[error("need three valuations over the same m >= 3 goods")]
    BadInput,
    #[error("predicate fails on the whole pool {0}")]
    PredicateFailsOnPool(GoodSet),
    #[error("first bundle {first} does not beat {third}")]
    SetupViolated { first: GoodSet, third: GoodSet },
    #[error("loop invariant broken: {0}")]
    InvariantBroken(String),
    #[error("no result after {0} rounds")]
    NonTermination(usize),
    #[error("result failed the independent {0} check")]
    VerificationFailed(Tag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tag {
    #[serde(rename = "tEFX")]
    Tefx,
    #[serde(rename = "EF1_and_EEFX")]
    Ef1AndEefx,
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Tag::Tefx => "tEFX",
            Tag::Ef1AndEefx => "EF1_and_EEFX",
        })
    }
}

/// Which branch a round took.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Step {
    Matching,
    Case1,
    Case2,
    Case3,
    Remaining,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriResult {
    /// `allocation.bundle(i)` goes to agent `i`.
    pub allocation: Allocation,
    pub tag: Tag,
    /// For EF1&EEFX results: per agent, a partition containing its bundle in
    /// which that bundle is EFX-feasible for it.
    pub certificates: Option<Vec<Vec<GoodSet>>>,
    pub rounds: usize,
    pub steps: Vec<Step>,
    /// `v_0(X_0)` at the start of every round that reached the case analysis.
    pub potentials: Vec<u32>,
}

/// Moves goods out of violating bundles into the least valuable one until
/// the partition is EFX with respect to `v`.
pub fn pr<V: Valuation + ?Sized>(x: &[GoodSet], v: &V) -> Vec<GoodSet> {
    let mut x = x.to_vec();
    loop {
        let i = (0..x.len())
            .min_by(|&a, &b| v.compare(x[a], x[b]))
            .expect("at least one bundle");
        let mv = x.iter().enumerate().find_map(|(j, &xj)| {
            xj.goods()
                .find(|&g| v.prefers(xj.without(g), x[i]))
                .map(|g| (j, g))
        });
        match mv {
            None => return x,
            Some((j, g)) => {
                x[j] = x[j].without(g);
                x[i] = x[i].with(g);
            }
        }
    }
}

/// Is every bundle of `x` EFX-feasible for `v`?
pub fn is_efx_partition<V: Valuation + ?Sized>(x: &[GoodSet], v: &V) -> bool {
    (0..x.len()).all(|i| efx_feasible(v, i, x))
}

/// Inclusion-minimal subset of `pool` satisfying the upward-closed `pred`,
/// by one pass of removals in ascending good order.
pub fn minimal_superset(pool: GoodSet, pred: impl Fn(GoodSet) -> bool) -> Result<GoodSet, TriError> {
    if !pred(pool) {
        return Err(TriError::PredicateFailsOnPool(pool));
    }
    let mut cur = pool;
    for g in pool.goods() {
        if pred(cur.without(g)) {
            cur = cur.without(g);
        }
    }
    Ok(cur)
}

/// Moves goods from `first` to `third` while `first` stays more valuable:
/// returns `(Y, third ∪ (first ∖ Y))` with `Y ⊆ first` minimal such that
/// `v(Y) > v(third ∪ (first ∖ Y))`.
pub fn case3_split(v: &RankValuation, first: GoodSet, third: GoodSet) -> Result<(GoodSet, GoodSet), TriError> {
    let rest = |y: GoodSet| third.union(first.difference(y));
    let y = minimal_superset(first, |y| v.prefers(y, rest(y)))
        .map_err(|_| TriError::SetupViolated { first, third })?;
    Ok((y, rest(y)))
}

fn agents_for(bundles: [GoodSet; 3], owner_of_bundle: [usize; 3]) -> Allocation {
    let mut per_agent = [GoodSet::EMPTY; 3];
    for (b, &a) in owner_of_bundle.iter().enumerate() {
        per_agent[a] = bundles[b];
    }
    let m = bundles.iter().fold(GoodSet::EMPTY, |s, &b| s.union(b)).len();
    Allocation::new_unchecked(m, per_agent.to_vec())
}

/// A permutation giving every agent a tEFX-feasible bundle, if any.
fn tefx_matching(x: &[GoodSet; 3], vals: &[RankValuation]) -> Option<[usize; 3]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    // perm[agent] = bundle
    PERMS
        .into_iter()
        .find(|p| (0..3).all(|a| tefx_feasible(&vals[a], p[a], x)))
}

enum Outcome {
    Done(Allocation, Tag, Option<Vec<Vec<GoodSet>>>),
    Next([GoodSet; 3]),
}

struct Solver<'a> {
    v: &'a [RankValuation],
}

impl Solver<'_> {
    fn tefx(&self, owner_of_bundle: [usize; 3], bundles: [GoodSet; 3]) -> Outcome {
        Outcome::Done(agents_for(bundles, owner_of_bundle), Tag::Tefx, None)
    }

    /// `Y` becomes the next state if both leading bundles are EFX-feasible
    /// for agent 0, otherwise PR is run on it.
    fn settle(&self, y: [GoodSet; 3]) -> Outcome {
        if efx_feasible(&self.v[0], 0, &y) && efx_feasible(&self.v[0], 1, &y) {
            Outcome::Next(y)
        } else {
            let x = pr(&y, &self.v[0]);
            Outcome::Next([x[0], x[1], x[2]])
        }
    }

    /// Shared tail of Case 3 and the remaining case, given the split
    /// `Y' = (y0, x1, y2)` with both `y0` and `y2` tEFX-feasible for `a`.
    fn finish_split(&self, a: usize, y0: GoodSet, x1: GoodSet, y2: GoodSet) -> Result<Outcome, TriError> {
        let b = 3 - a;
        let yp = [y0, x1, y2];
        if efx_feasible(&self.v[0], 1, &yp) {
            // agent 0 takes X_1, agent b picks among the other two
            let pick = if self.v[b].prefers(y2, y0) { 2 } else { 0 };
            let mut owner = [0usize; 3];
            owner[1] = 0;
            owner[pick] = b;
            owner[2 - pick] = a;
            return Ok(self.tefx(owner, yp));
        }
        let v0 = &self.v[0];
        let z_is_first = crate::fairness::strongly_envies_unchecked(v0, x1, y0);
        let (z, zbar) = if z_is_first {
            (y0, y2)
        } else if crate::fairness::strongly_envies_unchecked(v0, x1, y2) {
            (y2, y0)
        } else {
            return Err(TriError::InvariantBroken(
                "agent 0 rejects X_1 but envies neither other bundle".into(),
            ));
        };
        let zp = minimal_superset(z, |s| v0.prefers(s, x1))?;
        let xp = [x1, zp, zbar.union(z.difference(zp))];
        if efx_feasible(v0, 0, &xp) {
            Ok(Outcome::Next(xp))
        } else {
            let x = pr(&xp, v0);
            Ok(Outcome::Next([x[0], x[1], x[2]]))
        }
    }

    fn round(&self, x: [GoodSet; 3], steps: &mut Vec<Step>) -> Result<Outcome, TriError> {
        let v = self.v;
        let [x0, x1, x2] = x;

        // Case 1
        for g in x2.goods() {
            for i in 1..=2 {
                let vi = &v[i];
                let rest = x2.without(g);
                if vi.prefers(rest, x0.with(g)) && vi.prefers(rest, x1) {
                    steps.push(Step::Case1);
                    let y = [x0.with(g), x1, rest];
                    if efx_feasible(&v[0], 1, &y) {
                        return Ok(self.settle(y));
                    }
                    let y0 = minimal_superset(x0.with(g), |s| v[0].prefers(s, x1))?;
                    let yp = [y0, x1, rest.union(x0.with(g).difference(y0))];
                    return Ok(self.settle(yp));
                }
            }
        }

        // Case 2; once Case 1 fails this cannot hold, see the module tests
        for i in 1..=2 {
            if v[i].prefers(x0, x1) {
                steps.push(Step::Case2);
                let mut owner = [0usize; 3];
                owner[0] = i;
                owner[1] = 0;
                owner[2] = 3 - i;
                return Ok(self.tefx(owner, x));
            }
        }

        // Case 3
        for g in x2.goods() {
            let rest = x2.without(g);
            if v[1].prefers(rest, x1) && v[2].prefers(rest, x1) {
                steps.push(Step::Case3);
                let (y0, y2) = case3_split(&v[1], x0.with(g), rest)?;
                return self.finish_split(1, y0, x1, y2);
            }
        }

        // Remaining case
        steps.push(Step::Remaining);
        let a = (1..=2)
            .find(|&i| ef1_feasible(&v[i], 1, &x))
            .ok_or_else(|| TriError::InvariantBroken("X_1 is EF1-feasible for neither agent".into()))?;
        let b = 3 - a;
        let rest_goods = x0.union(x2);
        if let Some(cert) = is_eefx_feasible(&v[a], x1, rest_goods, 3).expect("valid partition") {
            let mut owner = [0usize; 3];
            owner[1] = a;
            owner[2] = b;
            let alloc = agents_for(x, owner);
            let mut certs = vec![x.to_vec(), Vec::new(), Vec::new()];
            certs[a] = cert;
            certs[b] = x.to_vec();
            return Ok(Outcome::Done(alloc, Tag::Ef1AndEefx, Some(certs)));
        }
        let g = x2
            .goods()
            .find(|&g| v[a].prefers(x2.without(g), x1.with(g)))
            .ok_or_else(|| TriError::InvariantBroken("no good witnesses the missing tEFX".into()))?;
        let (y0, y2) = case3_split(&v[a], x0.with(g), x2.without(g))?;
        let yp = [y0, x1, y2];
        if v[b].favorite(&yp) == 1 {
            // agent b takes X_1 with Y' as certificate, agent a takes X_2
            let mut owner = [0usize; 3];
            owner[1] = b;
            owner[2] = a;
            let alloc = agents_for(x, owner);
            let mut certs = vec![x.to_vec(), Vec::new(), Vec::new()];
            certs[a] = x.to_vec();
            certs[b] = yp.to_vec();
            return Ok(Outcome::Done(alloc, Tag::Ef1AndEefx, Some(certs)));
        }
        self.finish_split(a, y0, x1, y2)
    }
}

/// Re-checks a result with the fairness predicates.
pub fn verify_result(vals: &[RankValuation], r: &TriResult) -> bool {
    let b = r.allocation.bundles();
    if b.len() != 3 || Allocation::new(vals[0].goods(), b.to_vec()).is_err() {
        return false;
    }
    match r.tag {
        Tag::Tefx => (0..3).all(|i| tefx_feasible(&vals[i], i, b)),
        Tag::Ef1AndEefx => {
            let Some(certs) = &r.certificates else {
                return false;
            };
            (0..3).all(|i| ef1_feasible(&vals[i], i, b) && is_eefx_certificate(&vals[i], b[i], &certs[i]))
        }
    }
}

/// Runs the algorithm on three rank valuations over the same `m >= 3` goods.
pub fn solve_three(vals: &[RankValuation]) -> Result<TriResult, TriError> {
    if vals.len() != 3 || vals[0].m() < 3 || vals.iter().any(|v| v.m() != vals[0].m()) {
        return Err(TriError::BadInput);
    }
    let m = vals[0].m();
    let v0 = &vals[0];
    let solver = Solver { v: vals };
    let limit = count_allocations(3, m).expect("m >= 3") as usize + 1;

    let start: Vec<GoodSet> = (0..3)
        .map(|r| GoodSet::from_goods((0..m).filter(|g| g % 3 == r)))
        .collect();
    let x = pr(&start, v0);
    let mut x = [x[0], x[1], x[2]];
    let mut steps = Vec::new();
    let mut potentials: Vec<u32> = Vec::new();

    for round in 1..=limit {
        let done = if let Some(perm) = tefx_matching(&x, vals) {
            steps.push(Step::Matching);
            let alloc = Allocation::new_unchecked(m, perm.iter().map(|&b| x[b]).collect());
            Some((alloc, Tag::Tefx, None))
        } else {
            // without a matching both agents accept exactly one common bundle
            let t1: Vec<usize> = (0..3).filter(|&b| tefx_feasible(&vals[1], b, &x)).collect();
            let t2: Vec<usize> = (0..3).filter(|&b| tefx_feasible(&vals[2], b, &x)).collect();
            if t1.len() != 1 || t1 != t2 {
                return Err(TriError::InvariantBroken(format!(
                    "no matching, yet tEFX-feasible sets are {t1:?} and {t2:?}"
                )));
            }
            let c = t1[0];
            let mut others: Vec<GoodSet> = (0..3).filter(|&b| b != c).map(|b| x[b]).collect();
            others.sort_by(|&a, &b| v0.compare(a, b));
            x = [others[0], others[1], x[c]];
            if !(efx_feasible(v0, 0, &x) && efx_feasible(v0, 1, &x)) {
                return Err(TriError::InvariantBroken(
                    "leading bundles are not EFX-feasible for agent 0".into(),
                ));
            }
            let phi = v0.rank(x[0]);
            if potentials.last().is_some_and(|&p| phi <= p) {
                return Err(TriError::InvariantBroken(format!(
                    "potential did not increase ({:?} -> {phi})",
                    potentials.last()
                )));
            }
            potentials.push(phi);
            match solver.round(x, &mut steps)? {
                Outcome::Done(a, t, c) => Some((a, t, c)),
                Outcome::Next(next) => {
                    x = next;
                    None
                }
            }
        };
        if let Some((allocation, tag, certificates)) = done {
            let result = TriResult {
                allocation,
                tag,
                certificates,
                rounds: round,
                steps,
                potentials,
            };
            if !verify_result(vals, &result) {
                return Err(TriError::VerificationFailed(tag));
            }
            return Ok(result);
        }
    }
    Err(TriError::NonTermination(limit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs(g: &[usize]) -> GoodSet {
        GoodSet::from_goods(g.iter().copied())
    }

    #[test]
    fn pr_leaves_efx_partitions_alone() {
        let v = RankValuation::numeric(3).unwrap();
        let x = vec![gs(&[0]), gs(&[1]), gs(&[2])];
        assert_eq!(pr(&x, &v), x);
    }

    #[test]
    fn pr_fills_empty_bundles() {
        let v = RankValuation::numeric(3).unwrap();
        let out = pr(&[GoodSet::EMPTY, GoodSet::EMPTY, gs(&[0, 1, 2])], &v);
        assert!(out.iter().all(|b| !b.is_empty()));
        assert!(is_efx_partition(&out, &v));
    }

    #[test]
    fn pr_raises_the_minimum() {
        for seed in 0..30 {
            let v = RankValuation::random(6, seed).unwrap();
            let x = vec![gs(&[0, 1, 2, 3, 4]), gs(&[5]), GoodSet::EMPTY];
            let out = pr(&x, &v);
            assert!(is_efx_partition(&out, &v));
            let min = |b: &[GoodSet]| b.iter().map(|&s| v.rank(s)).min().unwrap();
            assert!(min(&out) > min(&x));
        }
    }

    #[test]
    fn minimal_superset_examples() {
        let v = RankValuation::numeric(2).unwrap();
        assert_eq!(minimal_superset(gs(&[0, 1]), |_| true).unwrap(), GoodSet::EMPTY);
        assert_eq!(
            minimal_superset(gs(&[0, 1]), |s| v.prefers(s, gs(&[0]))).unwrap(),
            gs(&[1])
        );
        assert_eq!(
            minimal_superset(gs(&[0]), |_| false),
            Err(TriError::PredicateFailsOnPool(gs(&[0])))
        );
    }

    #[test]
    fn case3_split_boundaries() {
        let v = RankValuation::numeric(3).unwrap();
        // {g2} beats {g0}: stays
        assert_eq!(case3_split(&v, gs(&[2]), gs(&[0])).unwrap(), (gs(&[2]), gs(&[0])));
        assert!(matches!(
            case3_split(&v, gs(&[0]), gs(&[2])),
            Err(TriError::SetupViolated { .. })
        ));
        let (y, rest) = case3_split(&v, gs(&[1, 2]), gs(&[0])).unwrap();
        assert!(v.prefers(y, rest));
        assert_eq!(y.union(rest), gs(&[0, 1, 2]));
    }

    #[test]
    fn identical_valuations_give_tefx() {
        let v = RankValuation::numeric(3).unwrap();
        let r = solve_three(&[v.clone(), v.clone(), v.clone()]).unwrap();
        assert_eq!(r.tag, Tag::Tefx);
        assert!(verify_result(&[v.clone(), v.clone(), v], &r));
    }

    #[test]
    fn random_instances_verify() {
        for m in 3..=6 {
            for seed in 0..40u64 {
                let vals: Vec<RankValuation> =
                    (0..3).map(|i| RankValuation::random(m, seed * 3 + i).unwrap()).collect();
                let r = solve_three(&vals).unwrap_or_else(|e| panic!("m={m} seed={seed}: {e}"));
                assert!(verify_result(&vals, &r));
            }
        }
    }

    /// Swaps a few adjacent incomparable sets in the order of `v`.
    fn perturb(v: &RankValuation, seed: u64) -> RankValuation {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut order = v.order();
        for _ in 0..1 + seed % 8 {
            let k = rng.gen_range(1..order.len() - 1);
            if !order[k].is_subset(order[k + 1]) {
                order.swap(k, k + 1);
            }
        }
        RankValuation::from_order(&order).unwrap()
    }

    /// A loop state: leading bundles EFX-feasible for agent 0 and sorted,
    /// no tEFX matching, both agents accepting only `X_2`.
    fn is_loop_state(x: &[GoodSet; 3], v: &[RankValuation]) -> bool {
        efx_feasible(&v[0], 0, x)
            && efx_feasible(&v[0], 1, x)
            && v[0].prefers(x[1], x[0])
            && tefx_matching(x, v).is_none()
            && (1..=2).all(|i| (0..3).all(|b| tefx_feasible(&v[i], b, x) == (b == 2)))
    }

    /// Runs one round from every loop state of small instances and checks
    /// that each branch returns a valid allocation or a state with larger
    /// potential that again satisfies the invariant.
    #[test]
    fn every_branch_from_every_loop_state() {
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..3000u64 {
            let m = 4 + (seed % 3) as usize;
            let base = RankValuation::random(m, seed).unwrap();
            let w = RankValuation::random(m, seed + 1_000_000).unwrap();
            let vals = match (seed / 3) % 6 {
                0 => vec![base.clone(), base.clone(), base],
                1 => vec![base, w.clone(), w],
                2 => vec![w, base.clone(), base],
                3 => vec![base.clone(), base, w],
                _ => {
                    let p = perturb(&base, seed);
                    vec![w, base, p]
                }
            };
            let solver = Solver { v: &vals };
            for code in 0..3u32.pow(m as u32) {
                let mut x = [GoodSet::EMPTY; 3];
                let mut c = code;
                for g in 0..m {
                    x[(c % 3) as usize] = x[(c % 3) as usize].with(g);
                    c /= 3;
                }
                if !is_loop_state(&x, &vals) {
                    continue;
                }
                let mut steps = Vec::new();
                match solver.round(x, &mut steps) {
                    Ok(Outcome::Done(allocation, tag, certificates)) => {
                        let r = TriResult {
                            allocation,
                            tag,
                            certificates,
                            rounds: 1,
                            steps: steps.clone(),
                            potentials: vec![],
                        };
                        assert!(verify_result(&vals, &r), "{steps:?} from {x:?}");
                    }
                    Ok(Outcome::Next(y)) => {
                        assert_eq!(y[0].union(y[1]).union(y[2]), GoodSet::full(m));
                        if tefx_matching(&y, &vals).is_none() {
                            let common = (0..3).find(|&b| tefx_feasible(&vals[1], b, &y)).unwrap();
                            let others: Vec<GoodSet> = (0..3).filter(|&b| b != common).map(|b| y[b]).collect();
                            assert!(others.iter().all(|&o| vals[0].prefers(o, x[0])), "{steps:?} from {x:?}");
                        }
                    }
                    Err(e) => panic!("{steps:?} from {x:?}: {e}"),
                }
                seen.insert(steps[0]);
            }
        }
        assert!(seen.contains(&Step::Case1) && seen.contains(&Step::Case3), "{seen:?}");
    }

    #[test]
    fn remaining_case_instance() {
        let r = |v: &[u32]| RankValuation::from_ranks(5, v.to_vec()).unwrap();
        let vals = vec![
            r(&[0, 9, 4, 19, 5, 10, 13, 21, 1, 11, 12, 26, 6, 25, 14, 29, 2, 16, 15, 20, 7, 22, 17, 23, 3, 18, 24, 27, 8, 30, 28, 31]),
            r(&[0, 1, 2, 3, 4, 6, 7, 13, 5, 15, 8, 22, 9, 18, 10, 27, 11, 19, 16, 20, 14, 23, 24, 25, 12, 26, 17, 28, 21, 29, 30, 31]),
            r(&[0, 1, 3, 4, 5, 7, 6, 9, 12, 14, 24, 28, 13, 20, 25, 29, 2, 16, 8, 19, 10, 21, 11, 23, 15, 17, 26, 30, 18, 22, 27, 31]),
        ];
        let x = [gs(&[0]), gs(&[1, 2]), gs(&[3, 4])];
        assert!(is_loop_state(&x, &vals));
        let mut steps = Vec::new();
        let Ok(Outcome::Done(allocation, tag, certificates)) = (Solver { v: &vals }).round(x, &mut steps) else {
            panic!("round did not finish");
        };
        assert_eq!(steps, [Step::Remaining]);
        assert_eq!(tag, Tag::Ef1AndEefx);
        let res = TriResult {
            allocation,
            tag,
            certificates,
            rounds: 1,
            steps,
            potentials: vec![],
        };
        assert!(verify_result(&vals, &res));
    }

    #[test]
    fn bad_input() {
        let v = RankValuation::numeric(3).unwrap();
        assert_eq!(solve_three(&[v.clone(), v]), Err(TriError::BadInput));
    }
}
