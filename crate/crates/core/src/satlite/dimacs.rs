//! DIMACS CNF reading and writing.
//!
//! The normalized form written here is the header `p cnf <vars> <clauses>`
//! followed by one clause per line, literals separated by single spaces and
//! terminated by ` 0`. Optional `c` comment lines precede the header.

use std::io::{self, Write};

use thiserror::Error;

use crate::cnf::{ClauseSink, CnfError, CnfFormula, Lit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {line}: malformed header")]
    MalformedHeader { line: usize },
    #[error("line {line}: malformed literal `{token}`")]
    MalformedLiteral { line: usize, token: String },
    #[error("last clause is not terminated by 0")]
    MissingTerminator,
    #[error("header declares {declared} clauses, body has {found}")]
    HeaderMismatch { declared: usize, found: usize },
    #[error("literal {lit} exceeds declared variable count {num_vars}")]
    LiteralOutOfRange { lit: Lit, num_vars: usize },
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut formula: Option<(CnfFormula, usize)> = None;
    let mut current: Vec<Lit> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line_no = no + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if formula.is_some() || parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(DimacsError::MalformedHeader { line: line_no });
            }
            let vars = parts[2].parse::<usize>();
            let clauses = parts[3].parse::<usize>();
            match (vars, clauses) {
                (Ok(v), Ok(c)) => formula = Some((CnfFormula::new(v), c)),
                _ => return Err(DimacsError::MalformedHeader { line: line_no }),
            }
            continue;
        }
        let Some((f, _)) = formula.as_mut() else {
            return Err(DimacsError::MissingHeader);
        };
        for token in trimmed.split_whitespace() {
            let lit: Lit = token.parse().map_err(|_| DimacsError::MalformedLiteral {
                line: line_no,
                token: token.to_string(),
            })?;
            if lit == 0 {
                f.push_clause(&current).map_err(|e| match e {
                    CnfError::LiteralOutOfRange { lit, num_vars } => {
                        DimacsError::LiteralOutOfRange { lit, num_vars }
                    }
                    CnfError::ZeroLiteral => unreachable!(),
                })?;
                current.clear();
            } else {
                current.push(lit);
            }
        }
    }
    let (f, declared) = formula.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::MissingTerminator);
    }
    if f.num_clauses() != declared {
        return Err(DimacsError::HeaderMismatch {
            declared,
            found: f.num_clauses(),
        });
    }
    Ok(f)
}

/// Normalized DIMACS text of `f`.
pub fn write_dimacs(f: &CnfFormula) -> String {
    let mut out = Vec::with_capacity(f.num_literals() * 6 + 32);
    write_dimacs_to(f, &mut out).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("ascii")
}

pub fn write_dimacs_to<W: Write>(f: &CnfFormula, out: W) -> io::Result<()> {
    let mut w = DimacsWriter::new(out);
    w.header(f.num_vars(), f.num_clauses())?;
    for c in f.clauses() {
        w.clause(c);
    }
    w.finish().map(|_| ())
}

/// Buffered clause writer usable as a [`ClauseSink`]. The first I/O error
/// is kept and reported by [`DimacsWriter::finish`].
pub struct DimacsWriter<W: Write> {
    out: io::BufWriter<W>,
    buf: Vec<u8>,
    written: u64,
    error: Option<io::Error>,
}

impl<W: Write> DimacsWriter<W> {
    pub fn new(out: W) -> Self {
        DimacsWriter {
            out: io::BufWriter::with_capacity(1 << 16, out),
            buf: Vec::with_capacity(256),
            written: 0,
            error: None,
        }
    }

    pub fn comment(&mut self, text: &str) -> io::Result<()> {
        for line in text.lines() {
            writeln!(self.out, "c {line}")?;
        }
        Ok(())
    }

    pub fn header(&mut self, num_vars: usize, num_clauses: usize) -> io::Result<()> {
        writeln!(self.out, "p cnf {num_vars} {num_clauses}")
    }

    /// Flushes and returns the number of clauses written.
    pub fn finish(mut self) -> io::Result<u64> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()?;
        Ok(self.written)
    }
}

fn push_int(buf: &mut Vec<u8>, v: Lit) {
    if v < 0 {
        buf.push(b'-');
    }
    let mut n = v.unsigned_abs();
    let mut digits = [0u8; 10];
    let mut k = digits.len();
    loop {
        k -= 1;
        digits[k] = b'0' + (n % 10) as u8;
        n /= 10;
        if n == 0 {
            break;
        }
    }
    buf.extend_from_slice(&digits[k..]);
}

impl<W: Write> ClauseSink for DimacsWriter<W> {
    fn clause(&mut self, lits: &[Lit]) {
        if self.error.is_some() {
            return;
        }
        self.buf.clear();
        for &l in lits {
            push_int(&mut self.buf, l);
            self.buf.push(b' ');
        }
        self.buf.extend_from_slice(b"0\n");
        match self.out.write_all(&self.buf) {
            Ok(()) => self.written += 1,
            Err(e) => self.error = Some(e),
        }
    }
}
