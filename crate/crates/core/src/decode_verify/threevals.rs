//! Text formats for valuation tables.
//!
//! Rank tables: `n` blocks of `2^m` lines `<set-number> <bitstring> <rank>`,
//! each block listed by increasing rank. The bitstring's leftmost character
//! is good `m-1`.
//!
//! Value tables carry a first line `n m` and then `n` blocks of `2^m` lines
//! `<set-number> <bitstring> <value>` in set-number order, values written as
//! integers or fractions `p/q`.

use std::fmt::Write as _;

use num_rational::BigRational;
use thiserror::Error;

use crate::goodset::GoodSet;
use crate::valuation::{RankValuation, RealValuation, ValuationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThreeValsError {
    #[error("expected {expected} lines, found {found}")]
    LineCountMismatch { expected: usize, found: usize },
    #[error("line {line}: set number does not match bitstring")]
    BitstringMismatch { line: usize },
    #[error("line {line}: rank not increasing")]
    RankNotIncreasing { line: usize },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("block {block}: {source}")]
    Invalid {
        block: usize,
        #[source]
        source: ValuationError,
    },
}

fn data_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

fn parse_row(line: usize, row: &str, m: usize) -> Result<(GoodSet, &str), ThreeValsError> {
    let mut parts = row.split_whitespace();
    let (Some(num), Some(bits), Some(val), None) = (parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return Err(ThreeValsError::Malformed {
            line,
            msg: "expected three columns".into(),
        });
    };
    let num: u32 = num.parse().map_err(|_| ThreeValsError::Malformed {
        line,
        msg: format!("bad set number `{num}`"),
    })?;
    if bits.len() != m || num >= 1 << m {
        return Err(ThreeValsError::BitstringMismatch { line });
    }
    match GoodSet::parse_bitstring(bits) {
        Some(s) if s.bits() == num => Ok((s, val)),
        _ => Err(ThreeValsError::BitstringMismatch { line }),
    }
}

pub fn load_threevals(text: &str, n: usize, m: usize) -> Result<Vec<RankValuation>, ThreeValsError> {
    let rows = data_lines(text);
    let p = 1usize << m;
    if rows.len() != n * p {
        return Err(ThreeValsError::LineCountMismatch {
            expected: n * p,
            found: rows.len(),
        });
    }
    let mut out = Vec::with_capacity(n);
    for (block, chunk) in rows.chunks(p).enumerate() {
        let mut rank = vec![u32::MAX; p];
        for (expected, &(line, row)) in chunk.iter().enumerate() {
            let (set, r) = parse_row(line, row, m)?;
            let r: usize = r.parse().map_err(|_| ThreeValsError::Malformed {
                line,
                msg: format!("bad rank `{r}`"),
            })?;
            if r != expected {
                return Err(ThreeValsError::RankNotIncreasing { line });
            }
            if rank[set.index()] != u32::MAX {
                return Err(ThreeValsError::Invalid {
                    block,
                    source: ValuationError::NotAPermutation,
                });
            }
            rank[set.index()] = r as u32;
        }
        out.push(
            RankValuation::from_ranks(m, rank).map_err(|source| ThreeValsError::Invalid { block, source })?,
        );
    }
    Ok(out)
}

pub fn dump_threevals(vals: &[RankValuation]) -> String {
    let mut out = String::new();
    for v in vals {
        for (r, s) in v.order().into_iter().enumerate() {
            writeln!(out, "{} {} {}", s.bits(), s.bitstring(v.m()), r).unwrap();
        }
    }
    out
}

pub fn load_value_table(text: &str) -> Result<Vec<RealValuation>, ThreeValsError> {
    let rows = data_lines(text);
    let Some(&(hline, header)) = rows.first() else {
        return Err(ThreeValsError::Malformed {
            line: 1,
            msg: "missing `n m` header".into(),
        });
    };
    let dims: Vec<usize> = header.split_whitespace().filter_map(|t| t.parse().ok()).collect();
    let [n, m] = dims[..] else {
        return Err(ThreeValsError::Malformed {
            line: hline,
            msg: "header must be `n m`".into(),
        });
    };
    if m > crate::goodset::MAX_GOODS {
        return Err(ThreeValsError::Malformed {
            line: hline,
            msg: format!("too many goods: {m}"),
        });
    }
    let p = 1usize << m;
    let body = &rows[1..];
    if body.len() != n * p {
        return Err(ThreeValsError::LineCountMismatch {
            expected: n * p,
            found: body.len(),
        });
    }
    let mut out = Vec::with_capacity(n);
    for (block, chunk) in body.chunks(p).enumerate() {
        let mut values = Vec::with_capacity(p);
        for (expected, &(line, row)) in chunk.iter().enumerate() {
            let (set, val) = parse_row(line, row, m)?;
            if set.index() != expected {
                return Err(ThreeValsError::Malformed {
                    line,
                    msg: "value tables list sets in set-number order".into(),
                });
            }
            let x: BigRational = val.parse().map_err(|_| ThreeValsError::Malformed {
                line,
                msg: format!("bad value `{val}`"),
            })?;
            values.push(x);
        }
        out.push(RealValuation::new(m, values).map_err(|source| ThreeValsError::Invalid { block, source })?);
    }
    Ok(out)
}

pub fn dump_value_table(vals: &[RealValuation]) -> String {
    let m = vals.first().map_or(0, |v| v.m());
    let mut out = format!("{} {}\n", vals.len(), m);
    for v in vals {
        for (i, x) in v.values().iter().enumerate() {
            let s = GoodSet::from_bits(i as u32);
            writeln!(out, "{} {} {}", i, s.bitstring(m), x).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_ranks() {
        let vals: Vec<RankValuation> = (0..3).map(|s| RankValuation::random(4, s).unwrap()).collect();
        let text = dump_threevals(&vals);
        assert_eq!(load_threevals(&text, 3, 4).unwrap(), vals);
        assert_eq!(dump_threevals(&load_threevals(&text, 3, 4).unwrap()), text);
    }

    #[test]
    fn rank_errors() {
        let v = RankValuation::numeric(2).unwrap();
        let text = dump_threevals(&[v]);
        assert_eq!(
            load_threevals(&text, 2, 2),
            Err(ThreeValsError::LineCountMismatch { expected: 8, found: 4 })
        );
        let bad_bits = text.replacen("1 01 1", "1 10 1", 1);
        assert_eq!(load_threevals(&bad_bits, 1, 2), Err(ThreeValsError::BitstringMismatch { line: 2 }));
        let bad_rank = text.replacen("1 01 1", "1 01 2", 1);
        assert_eq!(load_threevals(&bad_rank, 1, 2), Err(ThreeValsError::RankNotIncreasing { line: 2 }));
        // {g0,g1} below {g0}
        let non_monotone = "0 00 0\n3 11 1\n1 01 2\n2 10 3\n";
        assert!(matches!(
            load_threevals(non_monotone, 1, 2),
            Err(ThreeValsError::Invalid { block: 0, .. })
        ));
    }

    #[test]
    fn roundtrip_values() {
        let v = RealValuation::from_integers(2, &[0, 3, 1, 5]).unwrap();
        let half = RealValuation::new(
            1,
            vec![BigRational::from_integer(0.into()), BigRational::new(1.into(), 2.into())],
        );
        let text = dump_value_table(&[v.clone(), v.clone()]);
        assert!(text.starts_with("2 2\n"));
        assert_eq!(load_value_table(&text).unwrap(), vec![v.clone(), v]);
        let text = dump_value_table(&[half.unwrap()]);
        assert_eq!(text, "1 1\n0 0 0\n1 1 1/2\n");
        assert_eq!(dump_value_table(&load_value_table(&text).unwrap()), text);
    }
}
