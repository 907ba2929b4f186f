//! Unit propagation and forward subsumption.
//!
//! Units are propagated to a fixpoint and moved out of the formula into the
//! list of fixed literals; satisfied clauses are dropped and false literals
//! stripped. Tautologies are removed. Finally every clause that contains
//! another clause (including an identical earlier one) is deleted.

use serde::Serialize;

use crate::cnf::{CnfFormula, Lit};
use crate::satlite::model::Assignment;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PreprocessStats {
    pub clauses_in: usize,
    pub tautologies: usize,
    pub fixed_vars: usize,
    pub satisfied: usize,
    pub literals_removed: usize,
    pub subsumed: usize,
    pub clauses_out: usize,
}

#[derive(Clone, Debug)]
pub struct Preprocessed {
    /// Remaining clauses; no variable in `fixed` occurs in them.
    pub formula: CnfFormula,
    /// Literals forced by unit propagation, in propagation order.
    pub fixed: Vec<Lit>,
    pub stats: PreprocessStats,
    /// An empty clause was derived.
    pub unsat: bool,
}

impl Preprocessed {
    /// Adds the fixed literals to a model of the reduced formula, giving a
    /// model of the input.
    pub fn lift_model(&self, mut model: Assignment) -> Assignment {
        for &l in &self.fixed {
            model.set(l.unsigned_abs(), l > 0);
        }
        model
    }
}

#[inline]
fn code(l: Lit) -> usize {
    2 * (l.unsigned_abs() as usize - 1) + (l < 0) as usize
}

pub fn preprocess(f: &CnfFormula) -> Preprocessed {
    let n = f.num_vars();
    let mut stats = PreprocessStats {
        clauses_in: f.num_clauses(),
        ..Default::default()
    };

    // normalized copies: sorted, duplicate literals merged, tautologies dropped
    let mut clauses: Vec<Vec<Lit>> = Vec::with_capacity(f.num_clauses());
    for c in f.clauses() {
        let mut c = c.to_vec();
        c.sort_unstable_by_key(|&l| (l.unsigned_abs(), l));
        c.dedup();
        if c.windows(2).any(|w| w[0] == -w[1]) {
            stats.tautologies += 1;
            continue;
        }
        clauses.push(c);
    }

    let mut value: Vec<Option<bool>> = vec![None; n + 1];
    let lit_val = |value: &[Option<bool>], l: Lit| value[l.unsigned_abs() as usize].map(|v| v == (l > 0));

    let mut occurs: Vec<Vec<u32>> = vec![Vec::new(); 2 * n];
    for (k, c) in clauses.iter().enumerate() {
        for &l in c {
            occurs[code(l)].push(k as u32);
        }
    }
    let mut open: Vec<u32> = clauses.iter().map(|c| c.len() as u32).collect();
    let mut satisfied = vec![false; clauses.len()];
    let mut fixed: Vec<Lit> = Vec::new();
    let mut queue: Vec<Lit> = Vec::new();
    let mut unsat = false;

    for c in &clauses {
        match c.len() {
            0 => unsat = true,
            1 => queue.push(c[0]),
            _ => {}
        }
    }

    let mut head = 0;
    while !unsat && head < queue.len() {
        let l = queue[head];
        head += 1;
        match lit_val(&value, l) {
            Some(true) => continue,
            Some(false) => {
                unsat = true;
                break;
            }
            None => {}
        }
        value[l.unsigned_abs() as usize] = Some(l > 0);
        fixed.push(l);
        for &k in &occurs[code(l)] {
            satisfied[k as usize] = true;
        }
        for &k in &occurs[code(-l)] {
            let k = k as usize;
            open[k] -= 1;
            if satisfied[k] {
                continue;
            }
            match open[k] {
                0 => {
                    unsat = true;
                    break;
                }
                1 => {
                    if let Some(&u) = clauses[k].iter().find(|&&u| lit_val(&value, u).is_none()) {
                        queue.push(u);
                    }
                }
                _ => {}
            }
        }
    }
    stats.fixed_vars = fixed.len();

    if unsat {
        let mut formula = CnfFormula::new(n);
        formula.push_clause(&[]).expect("empty clause is valid");
        stats.clauses_out = 1;
        return Preprocessed {
            formula,
            fixed,
            stats,
            unsat,
        };
    }

    // strip false literals from the survivors
    let mut reduced: Vec<Vec<Lit>> = Vec::new();
    for (k, c) in clauses.into_iter().enumerate() {
        if satisfied[k] {
            stats.satisfied += 1;
            continue;
        }
        let before = c.len();
        let c: Vec<Lit> = c.into_iter().filter(|&l| lit_val(&value, l).is_none()).collect();
        stats.literals_removed += before - c.len();
        debug_assert!(c.len() >= 2);
        reduced.push(c);
    }

    let keep = forward_subsumption(&reduced, n);
    let mut formula = CnfFormula::new(n);
    for (c, &k) in reduced.iter().zip(&keep) {
        if k {
            formula.push_clause(c).expect("literals come from a valid formula");
        } else {
            stats.subsumed += 1;
        }
    }
    stats.clauses_out = formula.num_clauses();
    Preprocessed {
        formula,
        fixed,
        stats,
        unsat,
    }
}

fn signature(c: &[Lit]) -> u64 {
    c.iter().fold(0, |s, &l| s | 1 << (code(l) % 64))
}

/// `true` for every clause not subsumed by another one. Clauses must be
/// sorted; among identical clauses the first survives.
fn forward_subsumption(clauses: &[Vec<Lit>], num_vars: usize) -> Vec<bool> {
    let mut order: Vec<usize> = (0..clauses.len()).collect();
    order.sort_by_key(|&k| clauses[k].len());
    let sigs: Vec<u64> = clauses.iter().map(|c| signature(c)).collect();
    // each kept clause is indexed under its first literal only; any subsumer
    // of c has its first literal in c, so scanning the lists of c's literals
    // finds it
    let mut index: Vec<Vec<u32>> = vec![Vec::new(); 2 * num_vars];
    let mut keep = vec![false; clauses.len()];
    for &k in &order {
        let c = &clauses[k];
        let sig = sigs[k];
        let subsumed = c.iter().any(|&l| {
            index[code(l)].iter().any(|&d| {
                let d = d as usize;
                sigs[d] & !sig == 0 && is_sorted_subset(&clauses[d], c)
            })
        });
        if !subsumed {
            keep[k] = true;
            index[code(c[0])].push(k as u32);
        }
    }
    keep
}

fn is_sorted_subset(small: &[Lit], big: &[Lit]) -> bool {
    let key = |l: Lit| (l.unsigned_abs(), l);
    let mut j = 0;
    for &l in small {
        while j < big.len() && key(big[j]) < key(l) {
            j += 1;
        }
        if j == big.len() || big[j] != l {
            return false;
        }
        j += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: usize, cs: &[&[Lit]]) -> CnfFormula {
        CnfFormula::from_clauses(n, cs.iter()).unwrap()
    }

    #[test]
    fn propagates_to_fixpoint() {
        let p = preprocess(&cnf(3, &[&[1], &[1, 2], &[-1, 3]]));
        assert!(!p.unsat);
        assert_eq!(p.fixed, vec![1, 3]);
        assert!(p.formula.is_empty());
        assert_eq!(p.stats.satisfied, 3);
    }

    #[test]
    fn strips_false_literals() {
        let p = preprocess(&cnf(4, &[&[-1], &[1, 2, 3], &[2, 4]]));
        assert_eq!(p.fixed, vec![-1]);
        let cs: Vec<&[Lit]> = p.formula.clauses().collect();
        assert_eq!(cs, vec![&[2, 3][..], &[2, 4][..]]);
        assert_eq!(p.stats.literals_removed, 1);
    }

    #[test]
    fn detects_conflict() {
        assert!(preprocess(&cnf(1, &[&[1], &[-1]])).unsat);
        assert!(preprocess(&cnf(2, &[&[1], &[-1, 2], &[-2]])).unsat);
        assert!(preprocess(&cnf(1, &[&[]])).unsat);
    }

    #[test]
    fn subsumption_and_duplicates() {
        let p = preprocess(&cnf(4, &[&[1, 2, 3], &[2, 1], &[3, 4], &[4, 3], &[1, -1]]));
        let cs: Vec<&[Lit]> = p.formula.clauses().collect();
        assert_eq!(cs, vec![&[1, 2][..], &[3, 4][..]]);
        assert_eq!(p.stats.subsumed, 2);
        assert_eq!(p.stats.tautologies, 1);
    }
}
