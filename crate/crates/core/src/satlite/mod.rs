//! DIMACS I/O, preprocessing, a CDCL solver and model parsing.

pub mod dimacs;
pub mod model;
pub mod preprocess;
pub mod solver;

pub use dimacs::{parse_dimacs, write_dimacs, DimacsError};
pub use model::{parse_model, Assignment, ModelError};
pub use preprocess::{preprocess, PreprocessStats, Preprocessed};
pub use solver::{solve, solve_with_stats, SolveResult, SolverStats};
