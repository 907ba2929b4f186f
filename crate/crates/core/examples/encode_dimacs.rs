//! Writes the "no EFX allocation" formula as DIMACS and prints its size.
//!
//!     cargo run --release --example encode_dimacs -- 6 5 efx6.cnf
//!
//! Arguments: goods, leveling threshold (0 for none), output path.

use std::fs::File;
use std::io::BufWriter;

use efx_core::encoder::{write_dimacs, EncodeOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let m: usize = args.first().map_or(Ok(6), |s| s.parse())?;
    let k: usize = args.get(1).map_or(Ok(m - 1), |s| s.parse())?;
    let path = args.get(2).cloned().unwrap_or_else(|| format!("efx{m}.cnf"));

    let mut opts = EncodeOptions::new(m).item_order(true);
    if k > 0 {
        opts = opts.level(k);
    }
    let stats = write_dimacs(&opts, BufWriter::new(File::create(&path)?))?;
    println!("{path}: {} variables, {} clauses", stats.num_vars, stats.total_clauses);
    for (family, n) in &stats.families {
        println!("  {:<13} {n}", family.name());
    }
    Ok(())
}
