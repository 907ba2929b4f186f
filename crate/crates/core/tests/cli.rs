use std::path::Path;

use efx_core::cli::run_with;

const CE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/counterexample8.txt");

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run_with(std::iter::once("efx").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn verify_counterexample() {
    let (code, out) = run(&["verify", "--vals", CE, "--expect-none"]);
    assert_eq!(code, 0);
    assert!(out.contains("EFX count: 0 / 5796"), "{out}");
    let (code, out) = run(&["--json", "verify", "--vals", CE]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["efx_count"], 0);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn expect_none_fails_when_efx_exists() {
    let dir = tempfile::tempdir().unwrap();
    let vals = p(dir.path(), "vals.txt");
    let v = efx_core::RankValuation::numeric(4).unwrap();
    std::fs::write(&vals, efx_core::decode_verify::dump_threevals(&[v.clone(), v.clone(), v])).unwrap();
    let (code, _) = run(&["verify", "--vals", &vals, "--expect-none"]);
    assert_eq!(code, 1);
}

#[test]
fn encode_preprocess_solve() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = p(dir.path(), "f.cnf");
    let red = p(dir.path(), "r.cnf");
    let (code, out) = run(&["encode", "-m", "6", "-k", "5", "-o", &cnf]);
    assert_eq!(code, 0);
    assert!(out.contains("clauses 461835"), "{out}");
    let (code, out) = run(&["preprocess", "-i", &cnf, "-o", &red]);
    assert_eq!(code, 0);
    assert!(out.contains("clauses out 110520"), "{out}");
    let small = p(dir.path(), "s.cnf");
    run(&["encode", "-m", "4", "-k", "2", "--item-order", "-o", &small]);
    assert_eq!(run(&["sat", "-i", &small, "--expect", "unsat"]).0, 0);
    assert_eq!(run(&["sat", "-i", &small, "--preprocess", "--expect", "sat"]).0, 1);
}

#[test]
fn sat_model_and_decode() {
    let dir = tempfile::tempdir().unwrap();
    let vals = efx_core::data::counterexample8();
    let a = efx_core::decode_verify::encode_assignment(&vals).unwrap();
    let model = p(dir.path(), "model.txt");
    std::fs::write(&model, a.to_model_text(16)).unwrap();
    let out_vals = p(dir.path(), "vals.txt");
    assert_eq!(run(&["decode", "-m", "8", "--model", &model, "-o", &out_vals]).0, 0);
    assert_eq!(std::fs::read_to_string(&out_vals).unwrap(), efx_core::data::counterexample8_text());

    let cnf = p(dir.path(), "t.cnf");
    std::fs::write(&cnf, "p cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
    let m = p(dir.path(), "m.txt");
    let (code, out) = run(&["sat", "-i", &cnf, "-o", &m]);
    assert_eq!(code, 0);
    assert!(out.starts_with("s SATISFIABLE"));
    assert!(std::fs::read_to_string(&m).unwrap().ends_with("v 0\n"));
}

#[test]
fn constructions() {
    let dir = tempfile::tempdir().unwrap();
    let d = p(dir.path(), "d.txt");
    assert_eq!(run(&["submodular", "--vals", CE, "--agent", "2", "-o", &d]).0, 0);
    assert_eq!(run(&["check-submodular", "-i", &d, "-m", "8"]).0, 0);
    let bad = p(dir.path(), "bad.txt");
    std::fs::write(&bad, "0 0\n1 1\n2 1\n3 3\n").unwrap();
    let (code, out) = run(&["check-submodular", "-i", &bad, "-m", "2"]);
    assert_eq!(code, 1);
    assert!(out.contains("not submodular"));

    let ext = p(dir.path(), "ext.txt");
    assert_eq!(run(&["extend", "--vals", CE, "-n", "4", "-o", &ext]).0, 0);
    let (code, out) = run(&["verify", "--vals", &ext, "--expect-none"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("EFX count: 0 / 186480"));
}

#[test]
fn solve3_stats_smt() {
    let (code, out) = run(&["solve3", "--vals", CE]);
    assert_eq!(code, 0);
    assert!(out.contains("verified tEFX"), "{out}");
    let (code, out) = run(&["--json", "solve3", "-m", "5", "--seed", "9"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "solve3");

    let (code, out) = run(&["stats", "--vals", CE, "--show", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("size 4 marginal min 11 max 131"));
    assert!(out.contains("MMS violations 1363 (ordered quadruples 5452)"));

    let dir = tempfile::tempdir().unwrap();
    let smt = p(dir.path(), "m7.smt2");
    let (code, out) = run(&["smt", "-m", "7", "-o", &smt]);
    assert_eq!(code, 0);
    assert!(out.contains("disjuncts 1806\ninequalities 25284"), "{out}");
}

#[test]
fn usage_errors() {
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["nope"]).0, 2);
    assert_eq!(run(&["verify"]).0, 2);
    assert_eq!(run(&["verify", "--vals", "/nonexistent/file"]).0, 2);
    assert_eq!(run(&["smt", "-m", "12"]).0, 2);
    assert_eq!(run(&["encode", "-m", "4", "-k", "9"]).0, 2);
    assert_eq!(run(&["selfcheck", "--only", "13"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn selfcheck_subset() {
    let (code, out) = run(&["selfcheck", "--only", "1,2,11"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.contains(" PASS ")).count(), 3);
}
