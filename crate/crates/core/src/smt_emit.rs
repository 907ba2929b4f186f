//! SMT-LIB 2 (QF_LRA) encoding of "three agents, `m` goods, no EFX
//! allocation", plus a small s-expression reader for checking the output.

use std::fmt;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::alloc_enum::enumerate_allocations;
use crate::encoder::AGENTS;
use crate::goodset::{all_sets, GoodSet};

pub const MIN_SMT_GOODS: usize = 3;
pub const MAX_SMT_GOODS: usize = 8;

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("m = {0} outside {MIN_SMT_GOODS}..={MAX_SMT_GOODS}")]
    GoodCount(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SmtStats {
    pub m: usize,
    pub constants: u64,
    pub positivity: u64,
    pub monotonicity: u64,
    pub item_order: u64,
    /// Allocations in the EFX disjunction.
    pub disjuncts: u64,
    /// Strict inequalities inside the EFX disjunction.
    pub inequalities: u64,
    /// Distinct inequalities inside the EFX disjunction.
    pub distinct_atoms: u64,
    /// Atoms plus one node per conjunction, the disjunction and its negation.
    pub circuit_nodes: u64,
}

fn name(agent: usize, s: GoodSet) -> String {
    format!("v_{agent}_{}", s.bits())
}

/// Writes the script to `out`.
pub fn emit_smtlib_to<W: Write>(m: usize, out: &mut W) -> Result<SmtStats, SmtError> {
    if !(MIN_SMT_GOODS..=MAX_SMT_GOODS).contains(&m) {
        return Err(SmtError::GoodCount(m));
    }
    let mut st = SmtStats {
        m,
        ..Default::default()
    };
    writeln!(out, "; no EFX allocation for {AGENTS} agents and {m} goods")?;
    writeln!(out, "(set-logic QF_LRA)")?;
    for i in 0..AGENTS {
        for s in all_sets(m) {
            writeln!(out, "(declare-const {} Real)", name(i, s))?;
            st.constants += 1;
        }
    }
    writeln!(out, "; positivity")?;
    for i in 0..AGENTS {
        for s in all_sets(m) {
            writeln!(out, "(assert (>= {} 0.0))", name(i, s))?;
            st.positivity += 1;
        }
    }
    writeln!(out, "; monotonicity")?;
    for i in 0..AGENTS {
        for a in all_sets(m) {
            let full = GoodSet::full(m);
            for extra in full.difference(a).subsets().skip(1) {
                writeln!(out, "(assert (< {} {}))", name(i, a), name(i, a.union(extra)))?;
                st.monotonicity += 1;
            }
        }
    }
    writeln!(out, "; item order")?;
    for x in 0..m {
        for y in x + 1..m {
            writeln!(
                out,
                "(assert (< {} {}))",
                name(0, GoodSet::singleton(x)),
                name(0, GoodSet::singleton(y))
            )?;
            st.item_order += 1;
        }
    }
    writeln!(out, "; not EFX")?;
    writeln!(out, "(assert (not (or")?;
    let mut atoms = std::collections::HashSet::new();
    for alloc in enumerate_allocations(AGENTS, m).expect("m in range") {
        let bundles = alloc.bundles();
        write!(out, "  (and")?;
        for (i, &own) in bundles.iter().enumerate() {
            for (j, &other) in bundles.iter().enumerate() {
                if i == j {
                    continue;
                }
                for g in other.goods() {
                    let lhs = other.without(g);
                    write!(out, " (< {} {})", name(i, lhs), name(i, own))?;
                    st.inequalities += 1;
                    atoms.insert((i, lhs, own));
                }
            }
        }
        writeln!(out, ")")?;
        st.disjuncts += 1;
    }
    writeln!(out, ")))")?;
    writeln!(out, "(check-sat)")?;
    st.distinct_atoms = atoms.len() as u64;
    st.circuit_nodes = st.distinct_atoms + st.disjuncts + 2;
    Ok(st)
}

pub fn emit_smtlib(m: usize) -> Result<(String, SmtStats), SmtError> {
    let mut buf = Vec::new();
    let st = emit_smtlib_to(m, &mut buf)?;
    Ok((String::from_utf8(buf).expect("ascii output"), st))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (k, it) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SexpError {
    #[error("unexpected `)` at byte {0}")]
    UnexpectedClose(usize),
    #[error("{0} unclosed `(` at end of input")]
    Unclosed(usize),
    #[error("atom outside any list at byte {0}")]
    BareAtom(usize),
}

/// Reads top-level s-expressions, skipping `;` comments. Every top-level
/// form must be a list.
pub fn parse_sexps(text: &str) -> Result<Vec<Sexp>, SexpError> {
    let bytes = text.as_bytes();
    let mut stack: Vec<Vec<Sexp>> = Vec::new();
    let mut top = Vec::new();
    let mut k = 0;
    while k < bytes.len() {
        match bytes[k] {
            b';' => {
                while k < bytes.len() && bytes[k] != b'\n' {
                    k += 1;
                }
                continue;
            }
            b'(' => stack.push(Vec::new()),
            b')' => {
                let done = stack.pop().ok_or(SexpError::UnexpectedClose(k))?;
                match stack.last_mut() {
                    Some(parent) => parent.push(Sexp::List(done)),
                    None => top.push(Sexp::List(done)),
                }
            }
            c if c.is_ascii_whitespace() => {}
            _ => {
                let start = k;
                while k < bytes.len() && !matches!(bytes[k], b'(' | b')' | b';') && !bytes[k].is_ascii_whitespace() {
                    k += 1;
                }
                let atom = Sexp::Atom(text[start..k].to_string());
                stack.last_mut().ok_or(SexpError::BareAtom(start))?.push(atom);
                continue;
            }
        }
        k += 1;
    }
    if !stack.is_empty() {
        return Err(SexpError::Unclosed(stack.len()));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alloc_enum::count_allocations;

    #[test]
    fn disjunct_and_inequality_counts() {
        let (_, st) = emit_smtlib(7).unwrap();
        assert_eq!((st.disjuncts, st.inequalities), (1806, 25284));
        let (_, st) = emit_smtlib(4).unwrap();
        assert_eq!((st.disjuncts, st.inequalities), (36, 288));
    }

    #[test]
    fn structure() {
        for m in 3..=6 {
            let (text, st) = emit_smtlib(m).unwrap();
            assert_eq!(st.constants, 3 << m);
            assert_eq!(st.disjuncts, count_allocations(3, m).unwrap());
            assert_eq!(st.inequalities, 2 * m as u64 * st.disjuncts);
            assert_eq!(st.monotonicity, 3 * (3u64.pow(m as u32) - (1 << m)));
            let forms = parse_sexps(&text).unwrap();
            let declares = forms
                .iter()
                .filter(|f| matches!(f, Sexp::List(l) if l[0] == Sexp::Atom("declare-const".into())))
                .count() as u64;
            assert_eq!(declares, st.constants);
            assert_eq!(forms.last().unwrap().to_string(), "(check-sat)");
            let printed: Vec<String> = forms.iter().map(|f| f.to_string()).collect();
            assert_eq!(parse_sexps(&printed.join("\n")).unwrap(), forms);
        }
    }

    #[test]
    fn range() {
        assert!(matches!(emit_smtlib(2), Err(SmtError::GoodCount(2))));
        assert!(matches!(emit_smtlib(9), Err(SmtError::GoodCount(9))));
    }

    #[test]
    fn reader_errors() {
        assert_eq!(parse_sexps("(a (b)"), Err(SexpError::Unclosed(1)));
        assert_eq!(parse_sexps("(a))"), Err(SexpError::UnexpectedClose(3)));
        assert_eq!(parse_sexps("x"), Err(SexpError::BareAtom(0)));
        assert_eq!(parse_sexps("; only (comment\n").unwrap(), vec![]);
    }
}
