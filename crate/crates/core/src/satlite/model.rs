//! Partial assignments and SAT-competition model output (`s` / `v` lines).

use thiserror::Error;

use crate::cnf::{CnfFormula, Lit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("variable {0} assigned both polarities")]
    DuplicateAssignment(u32),
    #[error("literal {lit} exceeds variable count {num_vars}")]
    LiteralOutOfRange { lit: Lit, num_vars: usize },
    #[error("malformed token `{0}` in value line")]
    MalformedLiteral(String),
    #[error("solver reported `{0}`")]
    NotSatisfiable(String),
}

/// Tri-state assignment over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new(num_vars: usize) -> Self {
        Assignment {
            values: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn get(&self, var: u32) -> Option<bool> {
        self.values.get(var as usize - 1).copied().flatten()
    }

    #[inline]
    pub fn set(&mut self, var: u32, value: bool) {
        self.values[var as usize - 1] = Some(value);
    }

    pub fn unset(&mut self, var: u32) {
        self.values[var as usize - 1] = None;
    }

    /// Assigns the literal; fails if the variable already has the other value.
    pub fn assign_lit(&mut self, lit: Lit) -> Result<(), ModelError> {
        let var = lit.unsigned_abs();
        if var == 0 || var as usize > self.values.len() {
            return Err(ModelError::LiteralOutOfRange {
                lit,
                num_vars: self.values.len(),
            });
        }
        match self.get(var) {
            Some(v) if v != (lit > 0) => Err(ModelError::DuplicateAssignment(var)),
            _ => {
                self.set(var, lit > 0);
                Ok(())
            }
        }
    }

    #[inline]
    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.get(lit.unsigned_abs()).map(|v| v == (lit > 0))
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn assigned(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Index of the first clause with no true literal.
    pub fn first_unsatisfied(&self, f: &CnfFormula) -> Option<usize> {
        f.clauses()
            .position(|c| !c.iter().any(|&l| self.lit_value(l) == Some(true)))
    }

    pub fn satisfies(&self, f: &CnfFormula) -> bool {
        self.first_unsatisfied(f).is_none()
    }

    /// Assigned literals in variable order.
    pub fn literals(&self) -> impl Iterator<Item = Lit> + '_ {
        self.values.iter().enumerate().filter_map(|(k, v)| {
            v.map(|b| if b { k as Lit + 1 } else { -(k as Lit + 1) })
        })
    }

    /// `s SATISFIABLE` followed by `v` lines of at most `per_line` literals.
    pub fn to_model_text(&self, per_line: usize) -> String {
        let mut out = String::from("s SATISFIABLE\n");
        let lits: Vec<Lit> = self.literals().collect();
        for chunk in lits.chunks(per_line.max(1)) {
            out.push('v');
            for l in chunk {
                out.push(' ');
                out.push_str(&l.to_string());
            }
            out.push('\n');
        }
        out.push_str("v 0\n");
        out
    }
}

/// Reads `v` lines into an assignment over `num_vars` variables. Repeating a
/// literal is harmless; assigning both polarities is an error. `c` lines and
/// other text are ignored; an `s` line other than `SATISFIABLE` is an error.
pub fn parse_model(text: &str, num_vars: usize) -> Result<Assignment, ModelError> {
    let mut a = Assignment::new(num_vars);
    for line in text.lines() {
        let line = line.trim();
        if let Some(status) = line.strip_prefix('s') {
            let status = status.trim();
            if status != "SATISFIABLE" {
                return Err(ModelError::NotSatisfiable(status.to_string()));
            }
            continue;
        }
        let Some(body) = line.strip_prefix('v') else {
            continue;
        };
        for token in body.split_whitespace() {
            let lit: Lit = token
                .parse()
                .map_err(|_| ModelError::MalformedLiteral(token.to_string()))?;
            if lit != 0 {
                a.assign_lit(lit)?;
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line() {
        let a = parse_model("v 1 -2 0", 2).unwrap();
        assert_eq!(a.get(1), Some(true));
        assert_eq!(a.get(2), Some(false));
    }

    #[test]
    fn multi_line_matches_single_line() {
        let one = parse_model("s SATISFIABLE\nv 1 -2 3 -4 0\n", 5).unwrap();
        let many = parse_model("c solver\ns SATISFIABLE\nv 1 -2\nv  3\nv -4 0\n", 5).unwrap();
        assert_eq!(one, many);
        assert_eq!(one.get(5), None);
    }

    #[test]
    fn duplicates() {
        assert!(parse_model("v 1 1 0", 1).is_ok());
        assert_eq!(parse_model("v 1 -1 0", 1), Err(ModelError::DuplicateAssignment(1)));
        assert_eq!(
            parse_model("v 3 0", 2),
            Err(ModelError::LiteralOutOfRange { lit: 3, num_vars: 2 })
        );
        assert!(matches!(
            parse_model("s UNSATISFIABLE\n", 2),
            Err(ModelError::NotSatisfiable(_))
        ));
    }

    #[test]
    fn text_roundtrip() {
        let mut a = Assignment::new(30);
        for v in 1..=30u32 {
            if v % 3 != 0 {
                a.set(v, v % 2 == 0);
            }
        }
        let text = a.to_model_text(7);
        assert_eq!(parse_model(&text, 30).unwrap(), a);
    }
}
