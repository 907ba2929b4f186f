//! Computational tools for EFX (envy-freeness up to any good) allocations
//! under ordinal, monotone valuations.

pub mod alloc_enum;
pub mod cli;
pub mod cnf;
pub mod constructions;
pub mod data;
pub mod decode_verify;
pub mod encoder;
pub mod fairness;
pub mod goodset;
pub mod satlite;
pub mod selfcheck;
pub mod smt_emit;
pub mod tri_solver;
pub mod valuation;

pub use cnf::{CnfFormula, Lit};
pub use fairness::{Allocation, FairnessError};
pub use goodset::GoodSet;
pub use valuation::{RankValuation, RealValuation, Valuation, ValuationError};
