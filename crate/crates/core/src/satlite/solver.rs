//! A small CDCL solver: two watched literals, first-UIP learning with
//! minimization, VSIDS with phase saving, Luby restarts and LBD-based
//! deletion of learnt clauses.

use serde::Serialize;

use super::model::Assignment;
use crate::cnf::{CnfFormula, Lit};

/// Outcome of [`solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// A model that satisfies every clause of the input.
    Sat(Assignment),
    Unsat,
    /// The conflict budget ran out.
    Unknown,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learnt: u64,
    pub deleted: u64,
}

const RESTART_UNIT: u64 = 64;

/// Solves `f`, giving up after `conflict_budget` conflicts when set.
pub fn solve(f: &CnfFormula, conflict_budget: Option<u64>) -> SolveResult {
    solve_with_stats(f, conflict_budget).0
}

pub fn solve_with_stats(f: &CnfFormula, conflict_budget: Option<u64>) -> (SolveResult, SolverStats) {
    let mut s = Solver::new(f.num_vars());
    for c in f.clauses() {
        if !s.add_clause(c) {
            return (SolveResult::Unsat, s.stats);
        }
    }
    let result = s.search(conflict_budget);
    if let SolveResult::Sat(model) = &result {
        assert!(
            model.satisfies(f),
            "solver produced a model that falsifies clause {:?}",
            model.first_unsatisfied(f)
        );
    }
    (result, s.stats)
}

// internal literal: 2*var + sign, var 0-based; sign 1 means negative
type L = u32;

#[inline]
fn to_internal(l: Lit) -> L {
    2 * (l.unsigned_abs() - 1) + (l < 0) as u32
}

#[inline]
fn var(l: L) -> usize {
    (l >> 1) as usize
}

#[inline]
fn neg(l: L) -> L {
    l ^ 1
}

const UNDEF: u8 = 2;

#[derive(Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: L,
}

struct Clause {
    lits: Vec<L>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

struct Solver {
    num_vars: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    // per variable
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    seen: Vec<bool>,
    heap: VarHeap,
    trail: Vec<L>,
    trail_lim: Vec<usize>,
    qhead: usize,
    var_inc: f64,
    cla_inc: f64,
    learnt_count: usize,
    stats: SolverStats,
}

impl Solver {
    fn new(num_vars: usize) -> Self {
        let mut heap = VarHeap::new(num_vars);
        let activity = vec![0.0; num_vars];
        for v in 0..num_vars {
            heap.insert(v, &activity);
        }
        Solver {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            value: vec![UNDEF; num_vars],
            level: vec![0; num_vars],
            reason: vec![None; num_vars],
            phase: vec![false; num_vars],
            activity,
            seen: vec![false; num_vars],
            heap,
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            var_inc: 1.0,
            cla_inc: 1.0,
            learnt_count: 0,
            stats: SolverStats::default(),
        }
    }

    #[inline]
    fn lit_value(&self, l: L) -> u8 {
        let v = self.value[var(l)];
        if v == UNDEF {
            UNDEF
        } else {
            v ^ (l & 1) as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn assign(&mut self, l: L, reason: Option<u32>) {
        let v = var(l);
        self.value[v] = 1 ^ (l & 1) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds an input clause at level 0. Returns false on a trivial conflict.
    fn add_clause(&mut self, c: &[Lit]) -> bool {
        let mut lits: Vec<L> = c.iter().map(|&l| to_internal(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == neg(w[1])) {
            return true;
        }
        lits.retain(|&l| self.lit_value(l) != 0);
        if lits.iter().any(|&l| self.lit_value(l) == 1) {
            return true;
        }
        match lits.len() {
            0 => false,
            1 => {
                self.assign(lits[0], None);
                self.propagate().is_none()
            }
            _ => {
                self.attach(lits, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<L>, learnt: bool, lbd: u32) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[neg(lits[0]) as usize].push(Watcher {
            clause: cref,
            blocker: lits[1],
        });
        self.watches[neg(lits[1]) as usize].push(Watcher {
            clause: cref,
            blocker: lits[0],
        });
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        });
        cref
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = neg(p);
            let mut ws = std::mem::take(&mut self.watches[p as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.clause as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                let nw = Watcher {
                    clause: w.clause,
                    blocker: first,
                };
                if first != w.blocker && self.lit_value(first) == 1 {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                // look for a new literal to watch
                let len = self.clauses[cref].lits.len();
                let mut found = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.lit_value(l) != 0 {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[neg(l) as usize].push(nw);
                        found = true;
                        break;
                    }
                }
                if found {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.lit_value(first) == 0 {
                    conflict = Some(w.clause);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.assign(first, Some(w.clause));
                }
            }
            ws.truncate(j);
            // watches pushed for p during the loop cannot exist: a clause is
            // never re-watched on the literal being processed
            debug_assert!(self.watches[p as usize].is_empty());
            self.watches[p as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.update(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP analysis. Returns the learnt clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<L>, u32) {
        let mut learnt: Vec<L> = vec![0];
        let mut path = 0;
        let mut p: Option<L> = None;
        let mut idx = self.trail.len();
        loop {
            self.bump_clause(confl);
            let lits = self.clauses[confl as usize].lits.clone();
            let start = if p.is_some() { 1 } else { 0 };
            for &q in &lits[start..] {
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            // next literal on the trail that is part of the conflict
            loop {
                idx -= 1;
                if self.seen[var(self.trail[idx])] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[var(lit)] = false;
            path -= 1;
            if path == 0 {
                learnt[0] = neg(lit);
                break;
            }
            confl = self.reason[var(lit)].expect("implied literal has a reason");
        }

        // drop literals implied by the rest of the clause
        let marked: Vec<L> = learnt[1..].to_vec();
        let mut out = vec![learnt[0]];
        for &q in &marked {
            let redundant = match self.reason[var(q)] {
                None => false,
                Some(r) => self.clauses[r as usize].lits[1..]
                    .iter()
                    .all(|&x| self.seen[var(x)] || self.level[var(x)] == 0),
            };
            if !redundant {
                out.push(q);
            }
        }
        for &q in &marked {
            self.seen[var(q)] = false;
        }

        let mut bt = 0;
        if out.len() > 1 {
            let mut best = 1;
            for k in 2..out.len() {
                if self.level[var(out[k])] > self.level[var(out[best])] {
                    best = k;
                }
            }
            out.swap(1, best);
            bt = self.level[var(out[1])];
        }
        (out, bt)
    }

    fn lbd(&mut self, lits: &[L]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|&l| self.level[var(l)]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = var(l);
            self.phase[v] = l & 1 == 0;
            self.value[v] = UNDEF;
            self.reason[v] = None;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<L> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == UNDEF {
                return Some(2 * v as L + (!self.phase[v]) as L);
            }
        }
        None
    }

    fn locked(&self, cref: usize) -> bool {
        let c = &self.clauses[cref];
        let l = c.lits[0];
        self.lit_value(l) == 1 && self.reason[var(l)] == Some(cref as u32)
    }

    fn reduce_db(&mut self) {
        let mut cand: Vec<usize> = (0..self.clauses.len())
            .filter(|&k| {
                let c = &self.clauses[k];
                c.learnt && !c.deleted && c.lbd > 2 && !self.locked(k)
            })
            .collect();
        cand.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a], &self.clauses[b]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap())
        });
        let remove = cand.len() / 2;
        for &k in &cand[..remove] {
            let c = &mut self.clauses[k];
            c.deleted = true;
            c.lits.clear();
            c.lits.shrink_to_fit();
            self.learnt_count -= 1;
            self.stats.deleted += 1;
        }
        // purge dangling watchers
        for ws in &mut self.watches {
            ws.retain(|w| !self.clauses[w.clause as usize].deleted);
        }
    }

    fn search(&mut self, budget: Option<u64>) -> SolveResult {
        if self.propagate().is_some() {
            return SolveResult::Unsat;
        }
        let mut restart_no = 0u64;
        let mut next_reduce = 2000u64;
        let mut reduce_step = 300u64;
        loop {
            let limit = luby(restart_no) * RESTART_UNIT;
            let mut conflicts_here = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    self.stats.conflicts += 1;
                    conflicts_here += 1;
                    if self.decision_level() == 0 {
                        return SolveResult::Unsat;
                    }
                    let (learnt, bt) = self.analyze(confl);
                    self.cancel_until(bt);
                    if learnt.len() == 1 {
                        self.assign(learnt[0], None);
                    } else {
                        let lbd = self.lbd(&learnt);
                        let asserting = learnt[0];
                        let cref = self.attach(learnt, true, lbd);
                        self.bump_clause(cref);
                        self.learnt_count += 1;
                        self.stats.learnt += 1;
                        self.assign(asserting, Some(cref));
                    }
                    self.var_inc /= 0.95;
                    self.cla_inc /= 0.999;
                    if budget.is_some_and(|b| self.stats.conflicts >= b) {
                        return SolveResult::Unknown;
                    }
                } else {
                    if conflicts_here >= limit {
                        self.cancel_until(0);
                        self.stats.restarts += 1;
                        restart_no += 1;
                        break;
                    }
                    if self.stats.conflicts >= next_reduce {
                        next_reduce = self.stats.conflicts + 2000 + reduce_step;
                        reduce_step += 300;
                        self.reduce_db();
                    }
                    match self.pick_branch() {
                        None => return SolveResult::Sat(self.model()),
                        Some(l) => {
                            self.stats.decisions += 1;
                            self.trail_lim.push(self.trail.len());
                            self.assign(l, None);
                        }
                    }
                }
            }
        }
    }

    fn model(&self) -> Assignment {
        let mut a = Assignment::new(self.num_vars);
        for v in 0..self.num_vars {
            a.set(v as u32 + 1, self.value[v] == 1);
        }
        a
    }
}

/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, ... (0-based).
pub fn luby(i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = i;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

/// Binary max-heap over variables keyed by activity.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap {
            heap: Vec::with_capacity(n),
            pos: vec![None; n],
        }
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.pos[v].is_some() {
            return;
        }
        self.pos[v] = Some(self.heap.len());
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn update(&mut self, v: usize, act: &[f64]) {
        if let Some(p) = self.pos[v] {
            self.sift_up(p, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.pos[self.heap[0]] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[parent]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r]] > act[self.heap[l]] { r } else { l };
            if act[self.heap[c]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = Some(i);
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: usize, cs: &[&[Lit]]) -> CnfFormula {
        CnfFormula::from_clauses(n, cs.iter()).unwrap()
    }

    #[test]
    fn luby_prefix() {
        let got: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(got, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn trivial_instances() {
        assert!(solve(&cnf(2, &[&[1, 2], &[-1], &[-2]]), None).is_unsat());
        assert!(solve(&cnf(1, &[&[]]), None).is_unsat());
        assert!(solve(&cnf(0, &[]), None).is_sat());
        match solve(&cnf(3, &[&[1, 2], &[-1, 3], &[-3]]), None) {
            SolveResult::Sat(a) => assert_eq!(a.get(2), Some(true)),
            r => panic!("{r:?}"),
        }
    }

    /// Pigeonhole: `n+1` pigeons in `n` holes.
    fn php(n: usize) -> CnfFormula {
        let var = |p: usize, h: usize| (p * n + h + 1) as Lit;
        let mut f = CnfFormula::new((n + 1) * n);
        for p in 0..=n {
            f.push_clause(&(0..n).map(|h| var(p, h)).collect::<Vec<_>>()).unwrap();
        }
        for h in 0..n {
            for p in 0..=n {
                for q in p + 1..=n {
                    f.push_clause(&[-var(p, h), -var(q, h)]).unwrap();
                }
            }
        }
        f
    }

    #[test]
    fn pigeonhole_is_unsat() {
        for n in 2..=6 {
            assert!(solve(&php(n), None).is_unsat(), "php {n}");
        }
    }

    #[test]
    fn budget_gives_unknown() {
        assert_eq!(solve(&php(8), Some(10)), SolveResult::Unknown);
    }
}
