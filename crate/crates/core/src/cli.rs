//! Command-line front end. Every subcommand reads its inputs, calls into the
//! library and prints the result.
//!
//! Exit codes: 0 success, 1 domain failure (an expectation did not hold),
//! 2 usage or I/O error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::constructions::{extend_counterexample, is_submodular, submodular_realize, DyadicValuation};
use crate::decode_verify::{
    count_mms_quadruples, count_mms_violations, decode_valuations, dump_threevals, dump_value_table,
    find_mms_violations, load_threevals, load_value_table, marginal_matrix_csv, marginal_values, verify,
    VerifyOptions,
};
use crate::encoder::{self, EncodeOptions};
use crate::satlite::{self, parse_dimacs, parse_model, preprocess, SolveResult};
use crate::valuation::{RankValuation, RealValuation};

/// Version of the `--json` output layouts.
pub const JSON_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "efx", version, about = "EFX existence tooling: SAT encoding, verification, constructions")]
pub struct Cli {
    /// Machine-readable output (versioned JSON) instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for parallel verification (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct EncodeArgs {
    /// Number of goods.
    #[arg(short, long)]
    pub m: usize,
    /// Leveling threshold.
    #[arg(short, long)]
    pub k: Option<usize>,
    /// Order agent 0's singletons by good index.
    #[arg(long)]
    pub item_order: bool,
    /// Also emit transitivity clauses for triples with A ⊂ C.
    #[arg(long)]
    pub subset_transitivity: bool,
}

impl EncodeArgs {
    fn options(&self) -> EncodeOptions {
        let mut o = EncodeOptions::new(self.m)
            .item_order(self.item_order)
            .subset_transitivity(self.subset_transitivity);
        if let Some(k) = self.k {
            o = o.level(k);
        }
        o
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the DIMACS formula "three agents, m goods, no EFX allocation".
    Encode {
        #[command(flatten)]
        enc: EncodeArgs,
        /// Output file (default: standard output).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Unit propagation, tautology removal and subsumption on a DIMACS file.
    Preprocess {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve a DIMACS file with the built-in CDCL solver.
    Sat {
        #[arg(short, long)]
        input: PathBuf,
        /// Preprocess before solving.
        #[arg(long)]
        preprocess: bool,
        /// Give up after this many conflicts.
        #[arg(long)]
        budget: Option<u64>,
        /// Write the model here when satisfiable.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Exit 1 unless the answer is this (`sat` or `unsat`).
        #[arg(long)]
        expect: Option<String>,
    },
    /// Turn a SAT model into three rank tables.
    Decode {
        #[arg(short, long)]
        m: usize,
        /// Model text with `v` lines.
        #[arg(long)]
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check every allocation for EFX.
    Verify {
        /// Rank tables or a value table.
        #[arg(long)]
        vals: PathBuf,
        /// Exit 1 if any EFX allocation exists.
        #[arg(long)]
        expect_none: bool,
        /// Also scan allocations with empty bundles.
        #[arg(long)]
        include_empty: bool,
    },
    /// Marginal values and MMS violations of rank tables.
    Stats {
        #[arg(long)]
        vals: PathBuf,
        /// Good whose marginals are summarized.
        #[arg(long, default_value_t = 0)]
        good: usize,
        /// Write the marginal matrix of each agent as CSV to `<prefix><agent>.csv`.
        #[arg(long)]
        csv_prefix: Option<PathBuf>,
        /// Print at most this many MMS violations per agent.
        #[arg(long, default_value_t = 5)]
        show: usize,
    },
    /// Dyadic submodular function with the same order as one agent's ranks.
    Submodular {
        #[arg(long)]
        vals: PathBuf,
        #[arg(long, default_value_t = 0)]
        agent: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a dyadic value table for submodularity.
    CheckSubmodular {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        m: usize,
    },
    /// Extend a three-agent instance to n agents with extra goods.
    Extend {
        #[arg(long)]
        vals: PathBuf,
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the three-agent tEFX / EF1+EEFX algorithm.
    Solve3 {
        /// Rank tables; omit to draw random valuations.
        #[arg(long)]
        vals: Option<PathBuf>,
        /// Goods for random valuations.
        #[arg(short, long, default_value_t = 6)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the SMT-LIB 2 (QF_LRA) encoding.
    Smt {
        #[arg(short, long)]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the reproduction checks and report one line per criterion.
    Selfcheck {
        /// Only these criteria (1 to 12).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source,
    }
}

/// Valuations read from either format.
enum Vals {
    Ranks(Vec<RankValuation>),
    Values(Vec<RealValuation>),
}

impl Vals {
    fn load(path: &Path) -> Result<Vals> {
        let text = read(path)?;
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| usage(format!("{}: empty valuation file", path.display())))?;
        let cols: Vec<&str> = first.split_whitespace().collect();
        let bad = |e: crate::decode_verify::ThreeValsError| usage(format!("{}: {e}", path.display()));
        match cols.len() {
            2 => Ok(Vals::Values(load_value_table(&text).map_err(bad)?)),
            3 => {
                let m = cols[1].len();
                let rows = text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .count();
                if m > crate::goodset::MAX_GOODS || rows % (1 << m) != 0 {
                    return Err(usage(format!("{}: {rows} rows do not fill blocks of 2^{m}", path.display())));
                }
                Ok(Vals::Ranks(load_threevals(&text, rows >> m, m).map_err(bad)?))
            }
            _ => Err(usage(format!("{}: unrecognized valuation format", path.display()))),
        }
    }

    fn ranks(self, path: &Path) -> Result<Vec<RankValuation>> {
        match self {
            Vals::Ranks(v) => Ok(v),
            Vals::Values(v) => v
                .iter()
                .map(|x| x.to_rank())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| usage(format!("{}: values have ties, rank tables required", path.display()))),
        }
    }
}

fn json_line(out: &mut dyn Write, v: serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).map_err(stdout_err)
}

fn emit<T: Serialize>(out: &mut dyn Write, json: bool, kind: &str, data: &T, text: impl FnOnce() -> String) -> Result<()> {
    if json {
        json_line(out, json!({ "schema_version": JSON_SCHEMA_VERSION, "kind": kind, "data": data }))
    } else {
        out.write_all(text().as_bytes()).map_err(stdout_err)
    }
}

fn output_or_stdout(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => out.write_all(text.as_bytes()).map_err(stdout_err),
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let json = cli.json;
    match cli.command {
        Command::Encode { enc, output } => {
            let opts = enc.options();
            opts.validate().map_err(usage)?;
            let stats = match &output {
                Some(p) => {
                    let file = fs::File::create(p).map_err(|source| CliError::Io {
                        path: p.clone(),
                        source,
                    })?;
                    encoder::write_dimacs(&opts, io::BufWriter::new(file)).map_err(|source| CliError::Io {
                        path: p.clone(),
                        source,
                    })?
                }
                None => encoder::write_dimacs(&opts, &mut *out).map_err(stdout_err)?,
            };
            // with the formula on stdout the summary goes to stderr
            let mut err = io::stderr();
            let sink: &mut dyn Write = if output.is_some() { out } else { &mut err };
            let fams: Vec<_> = stats.families.iter().map(|(f, n)| json!({"family": f.name(), "clauses": n})).collect();
            emit(
                sink,
                json,
                "encode",
                &json!({"m": stats.m, "variables": stats.num_vars, "clauses": stats.total_clauses,
                        "literals": stats.total_literals, "families": fams}),
                || {
                    let mut s = format!("variables {}\nclauses {}\n", stats.num_vars, stats.total_clauses);
                    for (f, n) in &stats.families {
                        s += &format!("  {} {n}\n", f.name());
                    }
                    s
                },
            )
        }
        Command::Preprocess { input, output } => {
            let f = parse_dimacs(&read(&input)?).map_err(|e| usage(format!("{}: {e}", input.display())))?;
            let p = preprocess(&f);
            if let Some(path) = &output {
                write_file(path, &satlite::write_dimacs(&p.formula))?;
            }
            emit(out, json, "preprocess", &json!({"stats": p.stats, "unsat": p.unsat, "fixed": p.fixed.len()}), || {
                let s = &p.stats;
                format!(
                    "clauses in {}\ntautologies {}\nfixed variables {}\nsatisfied {}\nliterals removed {}\nsubsumed {}\nclauses out {}\n{}",
                    s.clauses_in, s.tautologies, s.fixed_vars, s.satisfied, s.literals_removed, s.subsumed, s.clauses_out,
                    if p.unsat { "empty clause derived\n" } else { "" }
                )
            })
        }
        Command::Sat {
            input,
            preprocess: pre,
            budget,
            output,
            expect,
        } => {
            let f = parse_dimacs(&read(&input)?).map_err(|e| usage(format!("{}: {e}", input.display())))?;
            let (result, stats) = if pre {
                let p = preprocess(&f);
                if p.unsat {
                    (SolveResult::Unsat, Default::default())
                } else {
                    match satlite::solve_with_stats(&p.formula, budget) {
                        (SolveResult::Sat(m), s) => (SolveResult::Sat(p.lift_model(m)), s),
                        other => other,
                    }
                }
            } else {
                satlite::solve_with_stats(&f, budget)
            };
            let answer = match &result {
                SolveResult::Sat(m) => {
                    assert!(m.satisfies(&f), "model must satisfy the input");
                    "sat"
                }
                SolveResult::Unsat => "unsat",
                SolveResult::Unknown => "unknown",
            };
            if let (SolveResult::Sat(m), Some(p)) = (&result, &output) {
                write_file(p, &m.to_model_text(20))?;
            }
            emit(out, json, "sat", &json!({"answer": answer, "stats": stats}), || {
                let line = match answer {
                    "sat" => "s SATISFIABLE",
                    "unsat" => "s UNSATISFIABLE",
                    _ => "s UNKNOWN",
                };
                format!("{line}\nc conflicts {} decisions {}\n", stats.conflicts, stats.decisions)
            })?;
            match expect.as_deref() {
                None => Ok(()),
                Some(e) if e == answer => Ok(()),
                Some(e @ ("sat" | "unsat")) => Err(CliError::Domain(format!("expected {e}, got {answer}"))),
                Some(e) => Err(usage(format!("--expect takes sat or unsat, not `{e}`"))),
            }
        }
        Command::Decode { m, model, output } => {
            if !(1..=encoder::MAX_ENCODE_GOODS).contains(&m) {
                return Err(usage(format!("m = {m} out of range")));
            }
            let a = parse_model(&read(&model)?, encoder::num_vars(m) as usize)
                .map_err(|e| usage(format!("{}: {e}", model.display())))?;
            let vals = decode_valuations(&a, m).map_err(|e| CliError::Domain(e.to_string()))?;
            output_or_stdout(out, output.as_deref(), &dump_threevals(&vals))
        }
        Command::Verify {
            vals,
            expect_none,
            include_empty,
        } => {
            let opts = VerifyOptions {
                include_empty_bundles: include_empty,
                parallel: true,
            };
            let report = match Vals::load(&vals)? {
                Vals::Ranks(v) => verify(&v, opts),
                Vals::Values(v) => verify(&v, opts),
            }
            .map_err(usage)?;
            if json {
                writeln!(out, "{}", report.to_json()).map_err(stdout_err)?;
            } else {
                writeln!(out, "{}EFX count: {} / {}", report.to_text(), report.efx_count, report.scanned)
                    .map_err(stdout_err)?;
            }
            if expect_none && report.efx_count > 0 {
                return Err(CliError::Domain(format!("{} EFX allocations found", report.efx_count)));
            }
            Ok(())
        }
        Command::Stats {
            vals,
            good,
            csv_prefix,
            show,
        } => {
            let v = Vals::load(&vals)?.ranks(&vals)?;
            let mut agents = Vec::new();
            for (i, vi) in v.iter().enumerate() {
                let m = vi.m();
                let mut marg = Vec::new();
                for size in 1..=m {
                    let mv = marginal_values(vi, good, size).map_err(usage)?;
                    marg.push(json!({"size": size, "min": mv[0], "max": mv[mv.len() - 1], "count": mv.len()}));
                }
                let shown: Vec<_> = find_mms_violations(vi, Some(show))
                    .into_iter()
                    .map(|q| json!({"a": q.a, "b": q.b, "c": q.c, "d": q.d, "values": q.values(vi)}))
                    .collect();
                agents.push(json!({
                    "agent": i,
                    "good": good,
                    "marginals": marg,
                    "mms_violations": count_mms_violations(vi),
                    "mms_quadruples": count_mms_quadruples(vi),
                    "mms_examples": shown,
                }));
                if let Some(prefix) = &csv_prefix {
                    let mut p = prefix.clone().into_os_string();
                    p.push(format!("{i}.csv"));
                    write_file(Path::new(&p), &marginal_matrix_csv(vi))?;
                }
            }
            emit(out, json, "stats", &agents, || {
                let mut s = String::new();
                for a in &agents {
                    s += &format!("agent {} good g{}\n", a["agent"], a["good"]);
                    for mg in a["marginals"].as_array().unwrap() {
                        s += &format!("  size {} marginal min {} max {}\n", mg["size"], mg["min"], mg["max"]);
                    }
                    s += &format!(
                        "  MMS violations {} (ordered quadruples {})\n",
                        a["mms_violations"], a["mms_quadruples"]
                    );
                    let i = a["agent"].as_u64().unwrap() as usize;
                    for q in find_mms_violations(&v[i], Some(show)) {
                        let [va, vb, vc, vd] = q.values(&v[i]);
                        s += &format!("    {} {} beat {} {}: {va} {vb} vs {vc} {vd}\n", q.a, q.b, q.c, q.d);
                    }
                }
                s
            })
        }
        Command::Submodular { vals, agent, output } => {
            let v = Vals::load(&vals)?.ranks(&vals)?;
            let vi = v
                .get(agent)
                .ok_or_else(|| usage(format!("agent {agent} not in a file with {} agents", v.len())))?;
            let f = submodular_realize(vi);
            output_or_stdout(out, output.as_deref(), &f.to_text())
        }
        Command::CheckSubmodular { input, m } => {
            let f = DyadicValuation::from_text(&read(&input)?, m).map_err(|e| usage(format!("{}: {e}", input.display())))?;
            match is_submodular(&f) {
                Ok(()) => emit(out, json, "check-submodular", &json!({"submodular": true}), || "submodular\n".into()),
                Err(w) => {
                    emit(out, json, "check-submodular", &json!({"submodular": false, "witness": w}), || {
                        format!("not submodular: S={} T={} g{}\n", w.s, w.t, w.good)
                    })?;
                    Err(CliError::Domain("not submodular".into()))
                }
            }
        }
        Command::Extend { vals, n, output } => {
            let v = Vals::load(&vals)?.ranks(&vals)?;
            let ext = extend_counterexample(&v, n).map_err(usage)?;
            output_or_stdout(out, output.as_deref(), &dump_value_table(&ext))
        }
        Command::Solve3 { vals, m, seed } => {
            let v = match &vals {
                Some(p) => Vals::load(p)?.ranks(p)?,
                None => (0..3)
                    .map(|i| RankValuation::random(m, seed.wrapping_mul(3).wrapping_add(i)))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(usage)?,
            };
            let r = crate::tri_solver::solve_three(&v).map_err(|e| CliError::Domain(e.to_string()))?;
            emit(out, json, "solve3", &r, || {
                let mut s = String::new();
                for (i, b) in r.allocation.bundles().iter().enumerate() {
                    s += &format!("agent {i} {b}\n");
                }
                s += &format!("verified {}\nrounds {}\n", r.tag, r.rounds);
                s
            })
        }
        Command::Smt { m, output } => {
            let mut buf = Vec::new();
            let st = crate::smt_emit::emit_smtlib_to(m, &mut buf).map_err(usage)?;
            let text = String::from_utf8(buf).expect("ascii");
            let summary = || {
                format!(
                    "constants {}\ndisjuncts {}\ninequalities {}\ncircuit nodes {}\n",
                    st.constants, st.disjuncts, st.inequalities, st.circuit_nodes
                )
            };
            match &output {
                Some(p) => write_file(p, &text)?,
                None => out.write_all(text.as_bytes()).map_err(stdout_err)?,
            }
            let mut err = io::stderr();
            let sink: &mut dyn Write = if output.is_some() { out } else { &mut err };
            emit(sink, json, "smt", &st, summary)
        }
        Command::Selfcheck { only } => {
            let ids: Vec<u8> = if only.is_empty() { (1..=12).collect() } else { only };
            if let Some(bad) = ids.iter().find(|&&i| !(1..=12).contains(&i)) {
                return Err(usage(format!("no criterion {bad}")));
            }
            let mut failed = 0;
            let mut all = Vec::new();
            for id in ids {
                let o = crate::selfcheck::run(id);
                failed += !o.pass as usize;
                if !json {
                    writeln!(out, "{o}").map_err(stdout_err)?;
                }
                all.push(o);
            }
            if json {
                json_line(out, json!({"schema_version": JSON_SCHEMA_VERSION, "kind": "selfcheck", "data": all}))?;
            }
            if failed > 0 {
                Err(CliError::Domain(format!("{failed} criteria failed")))
            } else {
                Ok(())
            }
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code. Output goes to `out`, diagnostics to standard error.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        // only the first call in a process can size the global pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("efx: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    run_with(argv, &mut lock)
}
