//! Turning truth assignments over `x^i_{AB}` into rank valuations and back.

use thiserror::Error;

use crate::encoder::{num_vars, var_id, AGENTS};
use crate::goodset::{all_sets, GoodSet};
use crate::satlite::Assignment;
use crate::valuation::{RankValuation, Valuation, ValuationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("variable {0} is unassigned")]
    IncompleteAssignment(u32),
    #[error("agent {agent}: {a} < {b} < {c} < {a} is a cycle")]
    NotATotalOrder {
        agent: usize,
        a: GoodSet,
        b: GoodSet,
        c: GoodSet,
    },
    #[error("agent {agent}: {lower} is a subset of {upper} but ranks above it")]
    MonotonicityViolated {
        agent: usize,
        lower: GoodSet,
        upper: GoodSet,
    },
    #[error("assignment has {found} variables, expected {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("expected {AGENTS} valuations over the same goods")]
    BadValuations,
}

/// Reads the three linear orders fixed by `a`. The rank of a set is the
/// number of sets it beats.
pub fn decode_valuations(a: &Assignment, m: usize) -> Result<Vec<RankValuation>, DecodeError> {
    let expected = num_vars(m) as usize;
    if a.num_vars() < expected {
        return Err(DecodeError::SizeMismatch {
            expected,
            found: a.num_vars(),
        });
    }
    let p = 1usize << m;
    let mut out = Vec::with_capacity(AGENTS);
    for agent in 0..AGENTS {
        // less[a][b] : v(a) < v(b)
        let mut less = vec![false; p * p];
        for x in 0..p {
            for y in x + 1..p {
                let lit = var_id(agent, GoodSet::from_bits(x as u32), GoodSet::from_bits(y as u32), m)
                    .expect("valid pair");
                let value = a
                    .get(lit as u32)
                    .ok_or(DecodeError::IncompleteAssignment(lit as u32))?;
                less[x * p + y] = value;
                less[y * p + x] = !value;
            }
        }
        let rank: Vec<u32> = (0..p)
            .map(|x| (0..p).filter(|&y| y != x && less[y * p + x]).count() as u32)
            .collect();
        let mut seen = vec![false; p];
        let total = rank.iter().all(|&r| !std::mem::replace(&mut seen[r as usize], true));
        if !total {
            let (x, y, z) = find_cycle(&less, p).expect("a tournament with equal scores has a 3-cycle");
            return Err(DecodeError::NotATotalOrder {
                agent,
                a: GoodSet::from_bits(x as u32),
                b: GoodSet::from_bits(y as u32),
                c: GoodSet::from_bits(z as u32),
            });
        }
        match RankValuation::from_ranks(m, rank) {
            Ok(v) => out.push(v),
            Err(ValuationError::MonotonicityViolated { lower, upper }) => {
                return Err(DecodeError::MonotonicityViolated { agent, lower, upper })
            }
            Err(e) => unreachable!("ranks were checked to be a permutation: {e}"),
        }
    }
    Ok(out)
}

fn find_cycle(less: &[bool], p: usize) -> Option<(usize, usize, usize)> {
    for x in 0..p {
        for y in 0..p {
            if y == x || !less[x * p + y] {
                continue;
            }
            for z in 0..p {
                if z != x && z != y && less[y * p + z] && less[z * p + x] {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

/// The assignment describing three valuations: `x^i_{AB}` is true iff
/// `v_i(A) < v_i(B)`.
pub fn encode_assignment(vals: &[RankValuation]) -> Result<Assignment, DecodeError> {
    if vals.len() != AGENTS || vals.iter().any(|v| v.goods() != vals[0].goods()) {
        return Err(DecodeError::BadValuations);
    }
    let m = vals[0].goods();
    let mut a = Assignment::new(num_vars(m) as usize);
    for (agent, v) in vals.iter().enumerate() {
        for x in all_sets(m) {
            for y in all_sets(m).filter(|&y| y > x) {
                let lit = var_id(agent, x, y, m).expect("valid pair");
                a.set(lit as u32, v.rank(x) < v.rank(y));
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_order_decodes_to_identity() {
        let m = 3;
        let mut a = Assignment::new(num_vars(m) as usize);
        for v in 1..=num_vars(m) as u32 {
            a.set(v, true);
        }
        let vals = decode_valuations(&a, m).unwrap();
        for v in vals {
            assert_eq!(v, RankValuation::numeric(3).unwrap());
        }
    }

    #[test]
    fn roundtrip() {
        for seed in 0..5 {
            let vals: Vec<RankValuation> =
                (0..3).map(|i| RankValuation::random(4, seed * 3 + i).unwrap()).collect();
            let a = encode_assignment(&vals).unwrap();
            assert_eq!(decode_valuations(&a, 4).unwrap(), vals);
        }
    }

    #[test]
    fn cycle_is_reported() {
        let m = 3;
        let mut a = encode_assignment(&vec![RankValuation::numeric(m).unwrap(); 3]).unwrap();
        // {g0} < {g1} < {g2} < {g0}
        let lit = var_id(1, GoodSet::from_bits(1), GoodSet::from_bits(4), m).unwrap();
        a.set(lit as u32, false);
        match decode_valuations(&a, m) {
            Err(DecodeError::NotATotalOrder { agent: 1, .. }) => {}
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn missing_variable_is_reported() {
        let mut a = encode_assignment(&vec![RankValuation::numeric(3).unwrap(); 3]).unwrap();
        a.unset(7);
        assert_eq!(decode_valuations(&a, 3), Err(DecodeError::IncompleteAssignment(7)));
    }

    #[test]
    fn monotonicity_is_checked() {
        let m = 3;
        let mut a = encode_assignment(&vec![RankValuation::numeric(m).unwrap(); 3]).unwrap();
        // swap {g0,g1,g2} (7) and {g1,g2} (6) for agent 0
        let lit = var_id(0, GoodSet::from_bits(6), GoodSet::from_bits(7), m).unwrap();
        a.set(lit as u32, false);
        assert!(matches!(
            decode_valuations(&a, m),
            Err(DecodeError::MonotonicityViolated { agent: 0, .. })
        ));
    }
}
