//! Clause storage shared by the encoder and the SAT tooling.

use thiserror::Error;

/// A DIMACS literal: `v` for variable `v` true, `-v` for false.
pub type Lit = i32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("literal 0 inside a clause")]
    ZeroLiteral,
    #[error("literal {lit} exceeds variable count {num_vars}")]
    LiteralOutOfRange { lit: Lit, num_vars: usize },
}

/// Anything that consumes clauses one at a time.
pub trait ClauseSink {
    fn clause(&mut self, lits: &[Lit]);
}

/// Counts clauses and literals without storing them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CountingSink {
    pub clauses: u64,
    pub literals: u64,
}

impl ClauseSink for CountingSink {
    #[inline]
    fn clause(&mut self, lits: &[Lit]) {
        self.clauses += 1;
        self.literals += lits.len() as u64;
    }
}

impl<F: FnMut(&[Lit])> ClauseSink for F {
    #[inline]
    fn clause(&mut self, lits: &[Lit]) {
        self(lits)
    }
}

/// A CNF formula in flat storage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    lits: Vec<Lit>,
    // clause k occupies lits[offsets[k]..offsets[k + 1]]
    offsets: Vec<usize>,
}

impl CnfFormula {
    pub fn new(num_vars: usize) -> Self {
        CnfFormula {
            num_vars,
            lits: Vec::new(),
            offsets: vec![0],
        }
    }

    pub fn from_clauses<C: AsRef<[Lit]>>(
        num_vars: usize,
        clauses: impl IntoIterator<Item = C>,
    ) -> Result<Self, CnfError> {
        let mut f = CnfFormula::new(num_vars);
        for c in clauses {
            f.push_clause(c.as_ref())?;
        }
        Ok(f)
    }

    pub fn push_clause(&mut self, lits: &[Lit]) -> Result<(), CnfError> {
        for &l in lits {
            if l == 0 {
                return Err(CnfError::ZeroLiteral);
            }
            if l.unsigned_abs() as usize > self.num_vars {
                return Err(CnfError::LiteralOutOfRange {
                    lit: l,
                    num_vars: self.num_vars,
                });
            }
        }
        self.lits.extend_from_slice(lits);
        self.offsets.push(self.lits.len());
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_literals(&self) -> usize {
        self.lits.len()
    }

    pub fn clause(&self, k: usize) -> &[Lit] {
        &self.lits[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn clauses(&self) -> impl ExactSizeIterator<Item = &[Lit]> + '_ {
        self.offsets.windows(2).map(|w| &self.lits[w[0]..w[1]])
    }

    pub fn is_empty(&self) -> bool {
        self.num_clauses() == 0
    }

    pub fn has_empty_clause(&self) -> bool {
        self.offsets.windows(2).any(|w| w[0] == w[1])
    }
}

impl ClauseSink for CnfFormula {
    fn clause(&mut self, lits: &[Lit]) {
        debug_assert!(lits
            .iter()
            .all(|&l| l != 0 && l.unsigned_abs() as usize <= self.num_vars));
        self.lits.extend_from_slice(lits);
        self.offsets.push(self.lits.len());
    }
}

/// A seeded random formula over `num_vars` variables with clause widths
/// drawn uniformly from `widths`. Used for differential testing.
pub fn random_cnf(
    num_vars: usize,
    num_clauses: usize,
    widths: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> CnfFormula {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut f = CnfFormula::new(num_vars);
    let mut c = Vec::new();
    for _ in 0..num_clauses {
        c.clear();
        for _ in 0..rng.gen_range(widths.clone()) {
            let v = rng.gen_range(1..=num_vars) as Lit;
            c.push(if rng.gen_bool(0.5) { v } else { -v });
        }
        f.push_clause(&c).expect("literals in range");
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let mut f = CnfFormula::new(2);
        assert_eq!(f.push_clause(&[1, 0]), Err(CnfError::ZeroLiteral));
        assert_eq!(
            f.push_clause(&[3]),
            Err(CnfError::LiteralOutOfRange { lit: 3, num_vars: 2 })
        );
        f.push_clause(&[1, -2]).unwrap();
        f.push_clause(&[]).unwrap();
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(f.clause(0), &[1, -2]);
        assert!(f.has_empty_clause());
    }
}
