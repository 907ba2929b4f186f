//! SAT encoding of "three agents, `m` goods, no EFX allocation".
//!
//! Variable `x^i_{AB}` states `v_i(A) < v_i(B)` and exists only for `A < B`
//! in set-number order; an occurrence with `A > B` stands for `¬x^i_{BA}`.
//! The formula is the conjunction of five clause families, emitted in this
//! order: monotonicity, transitivity, item order, leveled valuations, ¬EFX.

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::alloc_enum::enumerate_allocations;
use crate::cnf::{ClauseSink, CnfFormula, CountingSink, Lit};
use crate::goodset::GoodSet;

/// Number of agents in the encoding.
pub const AGENTS: usize = 3;

/// Largest `m` whose variable ids fit a signed 32-bit literal.
pub const MAX_ENCODE_GOODS: usize = 15;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("good count {0} outside 3..={MAX_ENCODE_GOODS}")]
    GoodCount(usize),
    #[error("level threshold {k} exceeds m+1 = {}", .m + 1)]
    LevelTooLarge { m: usize, k: usize },
    #[error("no variable for the pair ({a}, {b})")]
    BadPair { a: u32, b: u32 },
    #[error("agent {0} out of range")]
    BadAgent(usize),
    #[error("variable {0} out of range")]
    BadVar(u32),
}

/// `P(P-1)/2`, the number of pairs `A < B` per agent.
#[inline]
pub fn pairs_per_agent(m: usize) -> u64 {
    let p = 1u64 << m;
    p * (p - 1) / 2
}

/// Total number of variables, `3·P(P-1)/2`.
pub fn num_vars(m: usize) -> u64 {
    AGENTS as u64 * pairs_per_agent(m)
}

/// 1-based position of `(a, b)` among all pairs `a < b < p` in
/// lexicographic order: `p·a − a(a+1)/2 + b − a`.
pub fn pair_index(a: u32, b: u32, p: u32) -> Result<u64, EncodeError> {
    if a >= b || b >= p {
        return Err(EncodeError::BadPair { a, b });
    }
    Ok(pair_index_unchecked(a as u64, b as u64, p as u64))
}

#[inline]
fn pair_index_unchecked(a: u64, b: u64, p: u64) -> u64 {
    p * a - a * (a + 1) / 2 + b - a
}

/// Signed literal for "`v_agent(a) < v_agent(b)`".
pub fn var_id(agent: usize, a: GoodSet, b: GoodSet, m: usize) -> Result<Lit, EncodeError> {
    if agent >= AGENTS {
        return Err(EncodeError::BadAgent(agent));
    }
    if m > MAX_ENCODE_GOODS {
        return Err(EncodeError::GoodCount(m));
    }
    let p = 1u32 << m;
    if a == b || a.bits() >= p || b.bits() >= p {
        return Err(EncodeError::BadPair {
            a: a.bits(),
            b: b.bits(),
        });
    }
    Ok(Vars::new(m).lit(agent, a.bits(), b.bits()))
}

/// Inverse of [`var_id`] on positive ids: `(agent, A, B)` with `A < B`.
pub fn decode_var(var: u32, m: usize) -> Result<(usize, GoodSet, GoodSet), EncodeError> {
    if var == 0 || var as u64 > num_vars(m) {
        return Err(EncodeError::BadVar(var));
    }
    let h = pairs_per_agent(m);
    let agent = ((var as u64 - 1) / h) as usize;
    let mut rest = (var as u64 - 1) % h; // 0-based pair position
    let p = 1u64 << m;
    let mut a = 0u64;
    // row a holds p-1-a pairs
    while rest >= p - 1 - a {
        rest -= p - 1 - a;
        a += 1;
    }
    let b = a + 1 + rest;
    Ok((
        agent,
        GoodSet::from_bits(a as u32),
        GoodSet::from_bits(b as u32),
    ))
}

/// Precomputed indexing for a fixed `m`.
#[derive(Clone, Copy, Debug)]
struct Vars {
    p: u64,
    h: u64,
}

impl Vars {
    fn new(m: usize) -> Self {
        Vars {
            p: 1 << m,
            h: pairs_per_agent(m),
        }
    }

    #[inline]
    fn lit(self, agent: usize, a: u32, b: u32) -> Lit {
        debug_assert_ne!(a, b);
        if a < b {
            (agent as u64 * self.h + pair_index_unchecked(a as u64, b as u64, self.p)) as Lit
        } else {
            -((agent as u64 * self.h + pair_index_unchecked(b as u64, a as u64, self.p)) as Lit)
        }
    }
}

/// The five clause families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Monotonicity,
    Transitivity,
    ItemOrder,
    Leveled,
    NotEfx,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Monotonicity,
        Family::Transitivity,
        Family::ItemOrder,
        Family::Leveled,
        Family::NotEfx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Monotonicity => "monotonicity",
            Family::Transitivity => "transitivity",
            Family::ItemOrder => "item_order",
            Family::Leveled => "leveled",
            Family::NotEfx => "not_efx",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EncodeOptions {
    pub m: usize,
    /// Leveling threshold `k`: every set of size `>= k` beats all smaller sets.
    pub level_k: Option<usize>,
    pub item_order: bool,
    /// Emit transitivity also for triples with `A ⊂ C`. Those clauses
    /// contain the monotonicity unit `x_{AC}` and are satisfied outright.
    pub subset_transitivity: bool,
}

impl EncodeOptions {
    pub fn new(m: usize) -> Self {
        EncodeOptions {
            m,
            level_k: None,
            item_order: false,
            subset_transitivity: false,
        }
    }

    pub fn level(mut self, k: usize) -> Self {
        self.level_k = Some(k);
        self
    }

    pub fn item_order(mut self, on: bool) -> Self {
        self.item_order = on;
        self
    }

    pub fn subset_transitivity(mut self, on: bool) -> Self {
        self.subset_transitivity = on;
        self
    }

    pub fn validate(&self) -> Result<(), EncodeError> {
        if !(3..=MAX_ENCODE_GOODS).contains(&self.m) {
            return Err(EncodeError::GoodCount(self.m));
        }
        if let Some(k) = self.level_k {
            if k > self.m + 1 {
                return Err(EncodeError::LevelTooLarge { m: self.m, k });
            }
        }
        Ok(())
    }

    /// Sets of size `>= threshold` are excluded from transitivity.
    fn threshold(&self) -> usize {
        self.level_k.unwrap_or(self.m + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EncodeStats {
    pub m: usize,
    pub num_vars: u64,
    pub families: Vec<(Family, u64)>,
    pub total_clauses: u64,
    pub total_literals: u64,
}

impl EncodeStats {
    pub fn family(&self, f: Family) -> u64 {
        self.families
            .iter()
            .find(|(g, _)| *g == f)
            .map_or(0, |&(_, c)| c)
    }
}

/// `⋀_i ⋀_{A⊂B} x^i_{AB}`: `3·(3^m − 2^m)` units.
pub fn emit_monotonicity<S: ClauseSink + ?Sized>(m: usize, sink: &mut S) {
    let vars = Vars::new(m);
    let p = 1u32 << m;
    for i in 0..AGENTS {
        for a in 0..p {
            // proper supersets of a, ascending
            let mut b = a;
            while b + 1 < p {
                b = (b + 1) | a;
                sink.clause(&[vars.lit(i, a, b)]);
            }
        }
    }
}

/// `¬x_{AB} ∨ ¬x_{BC} ∨ x_{AC}` over ordered triples of distinct sets that
/// are all smaller than the leveling threshold.
pub fn emit_transitivity<S: ClauseSink + ?Sized>(opts: &EncodeOptions, sink: &mut S) {
    let m = opts.m;
    let vars = Vars::new(m);
    let k = opts.threshold();
    let small: Vec<u32> = (0..1u32 << m)
        .filter(|s| (s.count_ones() as usize) < k)
        .collect();
    for i in 0..AGENTS {
        for &a in &small {
            for &b in &small {
                if b == a {
                    continue;
                }
                let ab = -vars.lit(i, a, b);
                for &c in &small {
                    if c == a || c == b {
                        continue;
                    }
                    if !opts.subset_transitivity && a & c == a {
                        continue;
                    }
                    sink.clause(&[ab, -vars.lit(i, b, c), vars.lit(i, a, c)]);
                }
            }
        }
    }
}

/// `⋀_{i<j} x^0_{{g_i}{g_j}}`.
pub fn emit_item_order<S: ClauseSink + ?Sized>(m: usize, sink: &mut S) {
    let vars = Vars::new(m);
    for x in 0..m {
        for y in x + 1..m {
            sink.clause(&[vars.lit(0, 1 << x, 1 << y)]);
        }
    }
}

/// Units placing every set of size `>= k` above all smaller sets, and
/// ordering sets of equal size `>= k` by set number.
pub fn emit_leveled<S: ClauseSink + ?Sized>(m: usize, k: usize, sink: &mut S) {
    let vars = Vars::new(m);
    let p = 1u32 << m;
    for i in 0..AGENTS {
        for a in 0..p {
            let ca = a.count_ones() as usize;
            for b in 0..p {
                let cb = b.count_ones() as usize;
                if cb < k {
                    continue;
                }
                if ca < cb || (ca == cb && a < b) {
                    sink.clause(&[vars.lit(i, a, b)]);
                }
            }
        }
    }
}

/// One clause per allocation with non-empty bundles, stating that some agent
/// strongly envies some other bundle.
pub fn emit_not_efx<S: ClauseSink + ?Sized>(m: usize, sink: &mut S) {
    let vars = Vars::new(m);
    let mut allocs = enumerate_allocations(AGENTS, m).expect("m >= 3");
    let mut clause = Vec::with_capacity(2 * m);
    while let Some(x) = allocs.next_bundles() {
        clause.clear();
        for i in 0..AGENTS {
            for (j, &xj) in x.iter().enumerate() {
                if j == i {
                    continue;
                }
                for g in xj.goods() {
                    clause.push(-vars.lit(i, xj.without(g).bits(), x[i].bits()));
                }
            }
        }
        sink.clause(&clause);
    }
}

/// Emits one family into `sink`.
pub fn emit_family<S: ClauseSink + ?Sized>(opts: &EncodeOptions, family: Family, sink: &mut S) {
    match family {
        Family::Monotonicity => emit_monotonicity(opts.m, sink),
        Family::Transitivity => emit_transitivity(opts, sink),
        Family::ItemOrder => {
            if opts.item_order {
                emit_item_order(opts.m, sink)
            }
        }
        Family::Leveled => {
            if let Some(k) = opts.level_k {
                emit_leveled(opts.m, k, sink)
            }
        }
        Family::NotEfx => emit_not_efx(opts.m, sink),
    }
}

/// Streams the whole formula into `sink` and returns its statistics.
pub fn emit<S: ClauseSink + ?Sized>(
    opts: &EncodeOptions,
    sink: &mut S,
) -> Result<EncodeStats, EncodeError> {
    opts.validate()?;
    let mut stats = EncodeStats {
        m: opts.m,
        num_vars: num_vars(opts.m),
        families: Vec::with_capacity(5),
        total_clauses: 0,
        total_literals: 0,
    };
    for family in Family::ALL {
        let mut counter = CountingSink::default();
        emit_family(opts, family, &mut |c: &[Lit]| {
            counter.clause(c);
            sink.clause(c);
        });
        stats.families.push((family, counter.clauses));
        stats.total_clauses += counter.clauses;
        stats.total_literals += counter.literals;
    }
    Ok(stats)
}

/// Statistics only; nothing is stored.
pub fn count(opts: &EncodeOptions) -> Result<EncodeStats, EncodeError> {
    emit(opts, &mut CountingSink::default())
}

/// Builds the formula in memory.
pub fn encode(opts: &EncodeOptions) -> Result<(CnfFormula, EncodeStats), EncodeError> {
    opts.validate()?;
    let mut f = CnfFormula::new(num_vars(opts.m) as usize);
    let stats = emit(opts, &mut f)?;
    Ok((f, stats))
}

/// Writes the formula as DIMACS without materializing it: a counting pass
/// fixes the header, a second pass writes the clauses.
pub fn write_dimacs<W: Write>(opts: &EncodeOptions, out: W) -> io::Result<EncodeStats> {
    let stats = count(opts).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let mut w = crate::satlite::dimacs::DimacsWriter::new(out);
    w.comment(&format!(
        "efx encoding m={} k={} item_order={}",
        opts.m,
        opts.level_k.map_or("none".to_string(), |k| k.to_string()),
        opts.item_order
    ))?;
    w.header(stats.num_vars as usize, stats.total_clauses as usize)?;
    emit(opts, &mut w).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let written = w.finish()?;
    if written != stats.total_clauses {
        return Err(io::Error::other(
            "clause count changed between passes",
        ));
    }
    Ok(stats)
}
