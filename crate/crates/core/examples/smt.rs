//! Writes the SMT-LIB 2 linear real arithmetic encoding for an external
//! solver such as z3.
//!
//!     cargo run --release --example smt -- 6 efx6.smt2 && z3 efx6.smt2

use efx_core::smt_emit::emit_smtlib;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let m: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(5);
    let path = args.get(1).cloned().unwrap_or_else(|| format!("efx{m}.smt2"));
    let (text, st) = emit_smtlib(m).unwrap();
    std::fs::write(&path, text).unwrap();
    println!(
        "{path}: {} reals, {} disjuncts, {} inequalities, {} circuit nodes",
        st.constants, st.disjuncts, st.inequalities, st.circuit_nodes
    );
    println!("expected answer: unsat for m <= 6 (an EFX allocation always exists)");
}
